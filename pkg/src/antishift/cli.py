"""Command line entry point (``antishift`` or ``python -m antishift``).

On failure every subcommand exits with status 2 and writes a single JSON line
``{"error": <type>, "message": <text>}`` to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import dgp, graph, posterior, runner, shiftcheck
from .learn import HyperSearchSpace, TrainConfig, random_search


def _floats(values: list[str]) -> list[float]:
    out = []
    for v in values:
        out += [float(s) for s in v.split(",") if s.strip()]
    return out


def _names(values: list[str]) -> list[str]:
    out = []
    for v in values:
        out += [s.strip() for s in v.split(",") if s.strip()]
    return out


def _load_graph(spec: str) -> graph.Dag:
    if spec.startswith("builtin:"):
        return graph.builtin(spec.split(":", 1)[1])
    return graph.load_graph(spec)


def _train_config(args) -> TrainConfig:
    return TrainConfig(steps=args.steps, batch_size=args.batch_size)


def cmd_posterior_eval(args) -> None:
    model = dgp.load_config(args.config)
    if args.v == "none":
        score = posterior.posterior_yx(model, args.x)
    else:
        score = posterior.posterior_yxv(model, args.x, int(args.v))
    print(repr(float(score)))


def cmd_dsep(args) -> None:
    dag = _load_graph(args.graph)
    print(str(graph.d_separated(dag, args.a, args.b, _names(args.given))).lower())


def cmd_stable_sets(args) -> None:
    report = graph.stable_sets(_load_graph(args.graph), args.intervention, args.target)
    for s in report.stable_sets:
        print("{" + ", ".join(sorted(s)) + "}")
    print(f"# {len(report.stable_sets)} stable of {report.candidates_examined} candidates")


def cmd_hypersearch(args) -> None:
    scn = runner.scenario(args.scenario, args.p_source)
    space = HyperSearchSpace(tuple(args.lr_range), tuple(args.alpha_range), args.draws)
    result = random_search(scn.dgp_source, space, args.kind, args.grid, args.seed,
                           base_config=_train_config(args), n_eval=args.n_eval, n_jobs=args.jobs)
    result.write_csv(args.out)
    best = result.best_config
    print(f"best ({result.selection}): learning_rate={best.learning_rate!r} "
          f"alpha={best.mmd_weight!r} score={result.best_score!r}")


def cmd_sweep(args) -> None:
    predictors = runner.ANALYTIC + (tuple(runner.LEARNED) if args.learned else ())
    scn = runner.scenario(args.scenario, args.p_source, p_grid=tuple(args.grid),
                          predictors=predictors, replicates=args.replicates, n_eval=args.n_eval)
    base = _train_config(args)
    configs = {k: replace(c, steps=base.steps, batch_size=base.batch_size)
               for k, c in runner.DEFAULT_LEARNED_CONFIGS.items()}
    out = runner.run_sweep(scn, args.seed, learned_configs=configs)
    out.write_csv(args.out)
    print(f"wrote {len(out.records)} records to {args.out} ({len(out.failures)} failed cells)")


def cmd_oracle_check(args) -> None:
    scn = runner.scenario(args.scenario, args.p_source)
    p_targets = args.p_target or runner.DEFAULT_GRID
    for line in runner.oracle_check(scn.dgp_source, p_targets).lines():
        print(line)


def cmd_verify_shift(args) -> None:
    sources = shiftcheck.read_tables(args.source)
    if len(sources) != 1:
        raise ValueError(f"{args.source}: expected exactly one set, found {len(sources)}")
    source = sources[0]
    targets = []
    for path in args.targets:
        targets += shiftcheck.read_tables(path, source.vocabulary)
    report = shiftcheck.audit(source, targets, args.tolerance, args.min_bin)
    if args.out:
        report.write_csv(args.out)
    for label, dev in report.max_deviation.items():
        print(f"{label}: max |dP(Y|V)| = {dev:.4f}")
    print(f"verdict: {report.verdict} (tolerance {report.tolerance}, min bin {report.min_bin})")
    print(f"note: {report.note}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="antishift", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("posterior", help="closed-form posteriors")
    psub = p.add_subparsers(dest="action", required=True)
    pe = psub.add_parser("eval", help="print P(Y=1|X=x[,V=v])")
    pe.add_argument("--config", required=True)
    pe.add_argument("--x", type=float, required=True)
    pe.add_argument("--v", choices=["0", "1", "none"], default="none")
    pe.set_defaults(func=cmd_posterior_eval)

    p = sub.add_parser("dsep", help="d-separation query")
    p.add_argument("--graph", required=True, help="TOML file or builtin:<causal_1b|spurious_1a>")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--given", nargs="*", default=[])
    p.set_defaults(func=cmd_dsep)

    p = sub.add_parser("stable-sets", help="enumerate stable conditioning sets")
    p.add_argument("--graph", required=True)
    p.add_argument("--intervention", default="I_V")
    p.add_argument("--target", default="Y")
    p.set_defaults(func=cmd_stable_sets)

    def training_args(p):
        p.add_argument("--steps", type=int, default=1024)
        p.add_argument("--batch-size", type=int, default=2**14)

    p = sub.add_parser("hypersearch", help="random search for learned predictors")
    p.add_argument("--scenario", type=int, required=True, choices=[1, 2, 3])
    p.add_argument("--p-source", type=float)
    p.add_argument("--kind", required=True, choices=["plain-x", "plain-xv", "invariant"])
    p.add_argument("--draws", type=int, default=64)
    p.add_argument("--grid", nargs="+", default=list(map(str, runner.DEFAULT_GRID)))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--n-eval", type=int, default=2**14)
    p.add_argument("--lr-range", type=float, nargs=2, default=[10**-2.5, 10.0])
    p.add_argument("--alpha-range", type=float, nargs=2, default=[1e-10, 1.0])
    p.add_argument("--jobs", type=int, default=1)
    training_args(p)
    p.set_defaults(func=cmd_hypersearch)

    p = sub.add_parser("sweep", help="evaluate predictors across the shift grid")
    p.add_argument("--scenario", type=int, required=True, choices=[1, 2, 3])
    p.add_argument("--p-source", type=float)
    p.add_argument("--learned", action="store_true")
    p.add_argument("--grid", nargs="+", default=list(map(str, runner.DEFAULT_GRID)))
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--n-eval", type=int, default=2**16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    training_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle-check", help="numeric check of the invariance identities")
    p.add_argument("--scenario", type=int, default=1, choices=[1, 2])
    p.add_argument("--p-source", type=float)
    p.add_argument("--p-target", type=float, nargs="*")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("verify-shift", help="audit P(Y|V) constancy across shifted sets")
    p.add_argument("--source", required=True)
    p.add_argument("--targets", nargs="+", required=True)
    p.add_argument("--tolerance", type=float, default=shiftcheck.DEFAULT_TOLERANCE)
    p.add_argument("--min-bin", type=int, default=shiftcheck.DEFAULT_MIN_BIN)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_shift)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if hasattr(args, "grid"):
            args.grid = _floats(args.grid)
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - reported as a machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
