"""Reading invariance off a causal graph.

An intervention node I_V indexes the shifts applied to V.  A conditioning
set Z is stable when I_V and Y are d-separated given Z, so P(Y|Z) cannot
change under those shifts.
"""
from antishift import graph

for name in ("causal_1b", "spurious_1a"):
    dag = graph.builtin(name)
    report = graph.stable_sets(dag, "I_V", "Y")
    sets = [("{" + ", ".join(sorted(s)) + "}") for s in report.stable_sets]
    print(f"{name}: edges {sorted(dag.edges)}")
    print(f"  stable sets: {sets} out of {report.candidates_examined} candidates")

# Conditioning on X opens the collider V -> X <- Y in the spurious graph.
spurious = graph.builtin("spurious_1a")
print("\nI_V _||_ Y         :", graph.d_separated(spurious, "I_V", "Y"))
print("I_V _||_ Y | X     :", graph.d_separated(spurious, "I_V", "Y", {"X"}))

# With two covariates every stable set has to contain both of them.
multi = graph.multi_covariate(2)
print("\ntwo covariates:", [sorted(s) for s in graph.stable_sets(multi, "I_V", "Y").stable_sets])
