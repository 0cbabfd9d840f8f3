"""Which quantities survive a change of P(V) in a causal model?

Under a causal shift only P(V) moves.  P(X|V) and P(Y|X,V) are unchanged
to the last bit, whereas P(Y|X) and P(Y) move.  The oracle check measures
all of them on a grid of x values and target marginals.
"""
import numpy as np

from antishift import dgp, posterior
from antishift.runner import oracle_check, scenario

source = scenario(1).dgp_source
report = oracle_check(source)
for line in report.lines():
    print(line)

# A closer look at the posterior that does move.
target = dgp.shift(source, 0.9)
xs = np.array([-3.0, -1.0, 0.0, 1.0, 3.0])
print("\n   x   Ps(Y=1|x)  Pt(Y=1|x)  Ps(Y=1|x,V=1)  Pt(Y=1|x,V=1)")
for x, a, b, c, d in zip(xs, posterior.posterior_yx(source, xs), posterior.posterior_yx(target, xs),
                         posterior.posterior_yxv(source, xs, 1), posterior.posterior_yxv(target, xs, 1)):
    print(f"{x:5.1f} {a:10.4f} {b:10.4f} {c:14.4f} {d:14.4f}")
