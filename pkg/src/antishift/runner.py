"""Scenario registry, shift sweeps and numeric checks of the invariance argument."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.integrate import quad

from . import __version__
from . import dgp as _dgp
from . import metrics, posterior
from ._util import derive_seed
from .errors import AntishiftError, SweepFailedError
from .learn import TrainConfig
from .learn.search import train_kind
from .posterior import ClosedFormPredictor

log = logging.getLogger(__name__)

DEFAULT_GRID = tuple(round(0.05 * i, 2) for i in range(1, 20))
ANALYTIC = ("Ps(Y|X)", "Ps(Y|X,V)", "Pt(Y|X)", "Pt(Y|X,V)")
LEARNED = {"Psl(Y|X)": "plain-x", "Psl(Y|X,V)": "plain-xv", "Pm(Y|X)": "invariant"}
DEFAULT_LEARNED_CONFIGS = {
    "plain-x": TrainConfig(learning_rate=1e-2),
    "plain-xv": TrainConfig(learning_rate=1e-2),
    "invariant": TrainConfig(learning_rate=1e-2, mmd_weight=1e-2),
}


@dataclass(frozen=True)
class Scenario:
    id: int
    dgp_source: object
    p_grid: tuple[float, ...] = DEFAULT_GRID
    predictors: tuple[str, ...] = ANALYTIC
    replicates: int = 10
    n_eval: int = 2**16

    def __post_init__(self):
        grid = tuple(float(p) for p in self.p_grid)
        if not grid or any(not 0.0 <= p <= 1.0 for p in grid) or any(np.diff(grid) <= 0):
            raise ValueError("p_grid must be nonempty, strictly increasing and inside [0, 1]")
        object.__setattr__(self, "p_grid", grid)
        unknown = set(self.predictors) - set(ANALYTIC) - set(LEARNED)
        if unknown:
            raise ValueError(f"unknown predictors {sorted(unknown)}")
        if self.replicates < 1 or self.n_eval < 2:
            raise ValueError("replicates must be >= 1 and n_eval >= 2")

    @property
    def p_source(self) -> float:
        return self.dgp_source.p


def scenario(id: int, p_source: float | None = None, **overrides) -> Scenario:
    """The three simulation settings.

    Scenario 2 is quoted with two different source marginals (0.5 in the
    parameter list, 0.1 on its figures); 0.1 is used unless ``p_source`` says
    otherwise.
    """
    if id == 1:
        d = _dgp.CausalDgp(p=0.4, p0=0.2, p1=0.9, mu=((-1.0, 3.0), (1.0, -3.0)))
    elif id == 2:
        d = _dgp.CausalDgp(p=0.1, p0=0.15, p1=0.3, mu=((-1.0, 0.07), (0.92, 1.38)))
    elif id == 3:
        d = _dgp.SpuriousDgp(p2=0.22, p=0.2, mu=((-3.4, -1.7), (-0.5, 0.0)))
    else:
        raise ValueError(f"unknown scenario {id!r}; expected 1, 2 or 3")
    if p_source is not None:
        d = _dgp.shift(d, p_source)
    return Scenario(id=id, dgp_source=d, **overrides)


@dataclass
class SweepOutput:
    records: list[metrics.MetricRecord]
    provenance: dict
    failures: list[dict] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.provenance.items():
            buf.write(f"# {key}: {value}\n")
        writer = csv.DictWriter(buf, fieldnames=metrics.RECORD_FIELDS, quoting=csv.QUOTE_MINIMAL,
                                lineterminator="\n")
        writer.writeheader()
        for rec in self.records:
            row = rec.as_row()
            for key in ("p_source", "p_target", "value"):
                row[key] = repr(float(row[key]))
            writer.writerow(row)
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def select(self, predictor: str, metric: str, replicate: int | None = None) -> dict[float, float]:
        """``{p_target: value}``, averaged over replicates unless one is given."""
        vals: dict[float, list[float]] = {}
        for r in self.records:
            if r.predictor == predictor and r.metric == metric and (
                replicate is None or r.replicate == replicate
            ):
                vals.setdefault(r.p_target, []).append(r.value)
        return {p: float(np.mean(v)) for p, v in sorted(vals.items())}


def _analytic_predictor(name: str, source, target) -> ClosedFormPredictor:
    model = source if name.startswith("Ps") else target
    return ClosedFormPredictor(model, "XV" if name.endswith("X,V)") else "X")


def run_sweep(
    scn: Scenario,
    seed: int = 0,
    *,
    learned_configs: dict[str, TrainConfig] | None = None,
) -> SweepOutput:
    """Evaluate every predictor of ``scn`` at every target ``p`` in its grid.

    All predictors at one ``(p, replicate)`` cell see the same target draw.
    Learned predictors are trained once per replicate on the source model.
    """
    configs = {**DEFAULT_LEARNED_CONFIGS, **(learned_configs or {})}
    source = scn.dgp_source
    analytic = [p for p in scn.predictors if p in ANALYTIC]
    learned = [p for p in scn.predictors if p in LEARNED]
    records: list[metrics.MetricRecord] = []
    failures: list[dict] = []
    n_cells = 0
    common = dict(scenario=scn.id, p_source=source.p)

    def evaluate(make_predictor, name, i, p, rep):
        nonlocal n_cells
        n_cells += 1
        try:
            target = _dgp.shift(source, p)
            records.extend(metrics.evaluate(make_predictor(target), target,
                                            scn.n_eval, derive_seed(seed, i, rep),
                                            predictor_id=name, replicate=rep, **common))
        except AntishiftError as exc:
            failures.append({"predictor": name, "p_target": p, "replicate": rep, "error": str(exc)})

    for i, p in enumerate(scn.p_grid):
        for name in analytic:
            evaluate(lambda t, name=name: _analytic_predictor(name, source, t), name, i, p, 0)

    for k, name in enumerate(learned):
        kind = LEARNED[name]
        for rep in range(scn.replicates):
            cfg = replace(configs[kind], seed=derive_seed(seed, 10_000 + k, rep))
            try:
                model = train_kind(kind, source, cfg)
            except AntishiftError as exc:
                n_cells += len(scn.p_grid)
                failures += [{"predictor": name, "p_target": p, "replicate": rep, "error": str(exc)}
                             for p in scn.p_grid]
                continue
            for i, p in enumerate(scn.p_grid):
                evaluate(lambda _t, model=model: model, name, i, p, rep)

    if n_cells and len(failures) > 0.1 * n_cells:
        raise SweepFailedError(f"{len(failures)} of {n_cells} cells failed; first: {failures[0]}")
    records.sort(key=lambda r: (r.p_target, r.predictor, r.metric, r.replicate))
    settings = {
        "scenario": scn.id,
        "dgp": _dgp.to_config(source),
        "p_grid": list(scn.p_grid),
        "predictors": list(scn.predictors),
        "replicates": scn.replicates,
        "n_eval": scn.n_eval,
        "learned_configs": {k: asdict(configs[k]) for k in sorted(configs)} if learned else {},
        "seed": seed,
    }
    digest = hashlib.sha256(json.dumps(settings, sort_keys=True).encode()).hexdigest()
    provenance = {
        "tool": "antishift sweep",
        "version": __version__,
        "config_sha256": digest,
        "seed": seed,
        "cells": n_cells,
        "failures": len(failures),
    }
    for f in failures:
        log.warning("cell failed: %s", f)
    return SweepOutput(records, provenance, failures)


@dataclass
class OracleReport:
    p_source: float
    p_targets: tuple[float, ...]
    max_dev_x_given_v: float
    max_norm_err_x_given_v: float
    max_dev_y_given_xv: float
    max_dev_y_given_x: float
    max_dev_y: float
    witness_x: float

    def lines(self) -> list[str]:
        return [f"{k}: {v}" for k, v in asdict(self).items()]


def density_x_given_v(d, x, v: int):
    """p(x | V=v) = sum_y p(x | y, v) P(y | v)."""
    q = _dgp.cond_y_given_v(d, v)
    return _dgp.likelihood(d, x, 1, v) * q + _dgp.likelihood(d, x, 0, v) * (1.0 - q)


def oracle_check(d, p_targets=DEFAULT_GRID, x_grid=None) -> OracleReport:
    """Measure how far each quantity moves between ``d`` and its shifted versions.

    Returns the largest deviations over ``x_grid`` (default -6..6 step 0.1),
    V in {0, 1} and the target ``p`` values.  For a causal model the first
    three are invariant; the last two witness non-invariance.
    """
    if d.family != "cause":
        raise ValueError("oracle_check applies to causal models")
    x = np.round(np.arange(-60, 61) * 0.1, 10) if x_grid is None else np.asarray(x_grid, float)
    p_targets = tuple(float(p) for p in np.atleast_1d(p_targets))
    lo = min(min(r) for r in d.mu) - 10.0
    hi = max(max(r) for r in d.mu) + 10.0
    dev_xv = dev_yxv = dev_yx = dev_y = norm_err = 0.0
    witness_x = float("nan")
    src_yx = posterior.posterior_yx(d, x)
    for p in p_targets:
        t = _dgp.shift(d, p)
        for v in (0, 1):
            dev_xv = max(dev_xv, float(np.max(np.abs(density_x_given_v(t, x, v) - density_x_given_v(d, x, v)))))
            total, _ = quad(lambda s: density_x_given_v(t, s, v), lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)
            norm_err = max(norm_err, abs(total - 1.0))
            pv = _dgp.marginal_v(t) if v == 1 else 1.0 - _dgp.marginal_v(t)
            if pv > 0.0:
                dev_yxv = max(dev_yxv, float(np.max(np.abs(
                    posterior.posterior_yxv(t, x, v) - posterior.posterior_yxv(d, x, v)))))
        gap = np.abs(posterior.posterior_yx(t, x) - src_yx)
        if gap.max() > dev_yx:
            dev_yx = float(gap.max())
            witness_x = float(x[int(np.argmax(gap))])
        dev_y = max(dev_y, abs(posterior.marginal_y(t) - posterior.marginal_y(d)))
    return OracleReport(d.p, p_targets, dev_xv, norm_err, dev_yxv, dev_yx, dev_y, witness_x)
