"""Random hyperparameter search scored by area under the accuracy-vs-shift curve.

Selection looks at target-distribution accuracy across the whole shift grid,
which a practitioner would not normally have while training.  Results carry
``selection = "oracle-selected"`` to make that explicit.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from .. import dgp as _dgp
from .. import metrics
from .._util import derive_seed, parallel_map
from ..errors import AntishiftError, SearchFailedError
from .train import TrainConfig, train_invariant, train_plain

log = logging.getLogger(__name__)

KINDS = ("plain-x", "plain-xv", "invariant")
CSV_COLUMNS = ("draw", "learning_rate", "alpha", "score", "final_loss", "seed")


@dataclass(frozen=True)
class HyperSearchSpace:
    """Log-uniform ranges for the learning rate and the MMD weight."""

    lr_range: tuple[float, float] = (10**-2.5, 10**1)
    alpha_range: tuple[float, float] = (1e-10, 1.0)
    draws: int = 64

    def __post_init__(self):
        for name in ("lr_range", "alpha_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo < hi):
                raise ValueError(f"{name} needs 0 < lower < upper, got {(lo, hi)}")
        if self.draws < 1:
            raise ValueError("draws must be >= 1")

    def sample(self, seed: int) -> list[tuple[float, float]]:
        rng = np.random.default_rng(seed)
        out = []
        for _ in range(self.draws):
            lr = 10 ** rng.uniform(*np.log10(self.lr_range))
            alpha = 10 ** rng.uniform(*np.log10(self.alpha_range))
            out.append((float(lr), float(alpha)))
        return out


@dataclass
class DrawResult:
    draw: int
    learning_rate: float
    alpha: float
    score: float
    final_loss: float
    seed: int
    accuracies: list[float] = field(default_factory=list)
    error: str | None = None


@dataclass
class SearchResult:
    best_config: TrainConfig
    best_score: float
    draws: list[DrawResult]
    selection: str = "oracle-selected"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for d in self.draws:
                writer.writerow([d.draw, repr(d.learning_rate), repr(d.alpha),
                                 repr(d.score), repr(d.final_loss), d.seed])


def train_kind(kind: str, dgp_source, config: TrainConfig):
    if kind == "plain-x":
        return train_plain(dgp_source, "X", config)
    if kind == "plain-xv":
        return train_plain(dgp_source, "XV", config)
    if kind == "invariant":
        return train_invariant(dgp_source, config)
    raise ValueError(f"unknown predictor kind {kind!r}; expected one of {KINDS}")


def curve_score(predictor, dgp_source, eval_grid, n_eval: int, eval_seeds) -> tuple[float, list[float]]:
    """Area under accuracy-vs-p (a single grid point scores as its accuracy)."""
    accs = []
    for p, s in zip(eval_grid, eval_seeds):
        _, acc = metrics.evaluate(predictor, _dgp.shift(dgp_source, p), n_eval, s)
        accs.append(acc.value)
    if len(accs) == 1:
        return accs[0], accs
    return metrics.area_under_curve(eval_grid, accs), accs


def _run_draw(args, *, kind, dgp_source, base, eval_grid, n_eval, eval_seeds) -> DrawResult:
    index, lr, alpha, seed = args
    config = replace(base, learning_rate=lr, mmd_weight=alpha, seed=seed)
    try:
        pred = train_kind(kind, dgp_source, config)
        score, accs = curve_score(pred, dgp_source, eval_grid, n_eval, eval_seeds)
    except (AntishiftError, FloatingPointError) as exc:
        log.warning("draw %d failed: %s", index, exc)
        return DrawResult(index, lr, alpha, math.nan, math.nan, seed, error=str(exc))
    return DrawResult(index, lr, alpha, score, pred.final_loss, seed, accs)


def random_search(
    dgp_source,
    space: HyperSearchSpace,
    predictor_kind: str,
    eval_grid,
    seed: int,
    *,
    base_config: TrainConfig | None = None,
    n_eval: int = 2**14,
    n_jobs: int = 1,
) -> SearchResult:
    """Train one model per drawn configuration and keep the best-scoring one.

    Plain predictors ignore the drawn MMD weight (it is reported as 0).  Every
    draw is evaluated on the same target samples.  Ties go to the earliest
    draw; failed draws are logged and skipped.
    """
    if predictor_kind not in KINDS:
        raise ValueError(f"unknown predictor kind {predictor_kind!r}; expected one of {KINDS}")
    eval_grid = [float(p) for p in eval_grid]
    if not eval_grid:
        raise ValueError("eval_grid must be nonempty")
    base = base_config or TrainConfig()
    eval_seeds = [derive_seed(seed, 1, i) for i in range(len(eval_grid))]
    tasks = []
    for i, (lr, alpha) in enumerate(space.sample(derive_seed(seed, 0))):
        if predictor_kind != "invariant":
            alpha = 0.0
        tasks.append((i, lr, alpha, derive_seed(seed, 2, i)))
    fn = partial(_run_draw, kind=predictor_kind, dgp_source=dgp_source, base=base,
                 eval_grid=eval_grid, n_eval=n_eval, eval_seeds=eval_seeds)
    results = sorted(parallel_map(fn, tasks, n_jobs), key=lambda d: d.draw)
    ok = [d for d in results if d.error is None]
    if not ok:
        raise SearchFailedError(f"all {len(results)} draws failed")
    best = max(ok, key=lambda d: (d.score, -d.draw))
    best_config = replace(base, learning_rate=best.learning_rate, mmd_weight=best.alpha,
                          seed=best.seed)
    return SearchResult(best_config, best.score, results)
