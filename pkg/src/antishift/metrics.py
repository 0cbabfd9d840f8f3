"""Evaluation of predictors on target distributions."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from . import dgp as _dgp
from .errors import SingleClassError

METRICS = ("auc", "accuracy")
RECORD_FIELDS = (
    "scenario",
    "family",
    "p_source",
    "p_target",
    "predictor",
    "metric",
    "value",
    "replicate",
    "seed",
    "n_eval",
)


@dataclass(frozen=True)
class MetricRecord:
    scenario: object
    family: str
    p_source: float
    p_target: float
    predictor: str
    metric: str
    value: float
    replicate: int
    seed: int
    n_eval: int

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        if not (0.0 <= self.value <= 1.0):
            raise ValueError(f"metric value {self.value} outside [0, 1]")
        if self.n_eval < 1:
            raise ValueError("n_eval must be >= 1")

    def as_row(self) -> dict:
        return asdict(self)


def auc(scores, labels) -> float:
    """Mann-Whitney AUC with ties counted as one half (midrank method)."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have equal length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassError("AUC needs both classes present")
    ranks = rankdata(scores, method="average")
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def accuracy(pred_labels, labels) -> float:
    pred_labels = np.asarray(pred_labels)
    labels = np.asarray(labels)
    if pred_labels.shape != labels.shape:
        raise ValueError("pred_labels and labels must have equal length")
    if labels.size == 0:
        raise ValueError("accuracy of an empty list is undefined")
    return float(np.mean(pred_labels == labels))


def area_under_curve(ps, values) -> float:
    """Trapezoidal area under ``values`` over ``ps``, divided by the width of ``ps``."""
    ps = np.asarray(ps, dtype=float)
    values = np.asarray(values, dtype=float)
    if ps.shape != values.shape or ps.size < 2:
        raise ValueError("ps and values need equal length >= 2")
    if np.any(np.diff(ps) <= 0):
        raise ValueError("ps must be strictly increasing")
    area = np.sum(np.diff(ps) * (values[1:] + values[:-1]) / 2.0)
    return float(area / (ps[-1] - ps[0]))


def score_dataset(predictor, data: _dgp.Dataset) -> tuple[float, float]:
    """(auc, accuracy) of ``predictor`` on ``data``."""
    if getattr(predictor, "conditioning", "XV") == "X":
        scores = predictor.scores(data.x)
    else:
        scores = predictor.scores(data.x, data.v)
    return auc(scores, data.y), accuracy(predictor.labels(scores), data.y)


def evaluate(
    predictor,
    dgp_target,
    n: int = 2**16,
    seed: int = 0,
    *,
    predictor_id: str = "",
    scenario=None,
    p_source: float = float("nan"),
    replicate: int = 0,
) -> tuple[MetricRecord, MetricRecord]:
    """Score ``predictor`` on ``n`` fresh draws from ``dgp_target``.

    A draw containing a single class is retried once with ``seed + 1``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    used_seed = seed
    data = _dgp.sample(dgp_target, n, seed)
    if data.y.min() == data.y.max():
        used_seed = seed + 1
        data = _dgp.sample(dgp_target, n, used_seed)
        if data.y.min() == data.y.max():
            raise SingleClassError(f"single-class draw at seeds {seed} and {seed + 1}")
    auc_value, acc_value = score_dataset(predictor, data)
    common = dict(
        scenario=scenario,
        family=dgp_target.family,
        p_source=p_source,
        p_target=dgp_target.p,
        predictor=predictor_id,
        replicate=replicate,
        seed=used_seed,
        n_eval=n,
    )
    return (
        MetricRecord(metric="auc", value=auc_value, **common),
        MetricRecord(metric="accuracy", value=acc_value, **common),
    )
