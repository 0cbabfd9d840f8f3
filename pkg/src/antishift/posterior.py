"""Closed-form predictive distributions of Y.

All posteriors are evaluated as the logistic function of a log-odds so that
Gaussian tails far from every mean neither underflow nor produce 0/0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp

from . import dgp as _dgp
from .dgp import Dgp, Sample
from .errors import DegenerateConditioningError

CONDITIONINGS = ("XV", "X")


def _check_v_support(dgp: Dgp, v) -> None:
    pv1 = _dgp.marginal_v(dgp)
    for value in np.unique(np.asarray(v, dtype=int)):
        if (pv1 if value == 1 else 1.0 - pv1) == 0.0:
            raise DegenerateConditioningError(f"P(V={value}) = 0 under {dgp!r}")


def posterior_yxv(dgp: Dgp, x, v, y: int = 1):
    """P(Y=y | X=x, V=v).

    Vectorised over ``x`` and ``v``.  When P(Y=1|V=v) is 0 or 1 the prior is
    returned unchanged, without touching the likelihoods.
    """
    _check_v_support(dgp, v)
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=int)
    x, v = np.broadcast_arrays(x, v)
    prior = np.empty(x.shape, dtype=float)
    for value in (0, 1):
        mask = v == value
        if np.any(mask):
            prior[mask] = _dgp.cond_y_given_v(dgp, value)
    mu = _dgp.mu_array(dgp)
    out = np.empty(x.shape, dtype=float)
    degenerate = (prior == 0.0) | (prior == 1.0)
    out[degenerate] = prior[degenerate]
    live = ~degenerate
    if np.any(live):
        xl, vl, pl = x[live], v[live], prior[live]
        # log N(x; mu1) - log N(x; mu0) = ((x - mu0)^2 - (x - mu1)^2) / 2
        llr = 0.5 * ((xl - mu[0, vl]) ** 2 - (xl - mu[1, vl]) ** 2)
        out[live] = expit(llr + np.log(pl) - np.log1p(-pl))
    if y == 0:
        out = 1.0 - out
    return float(out) if out.ndim == 0 else out


def posterior_yx(dgp: Dgp, x, y: int = 1):
    """P(Y=y | X=x), marginalising V out of the joint."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        log_joint = {
            (yy, vv): _dgp.log_likelihood(dgp, x, yy, vv) + np.log(_dgp.joint_yv(dgp, yy, vv))
            for yy in (0, 1)
            for vv in (0, 1)
        }
    num = logsumexp(np.stack([log_joint[1, 0], log_joint[1, 1]]), axis=0)
    den0 = logsumexp(np.stack([log_joint[0, 0], log_joint[0, 1]]), axis=0)
    # P(Y=1|x) = expit(log num - log den0); handles P(Y=1) in {0, 1} as +-inf
    with np.errstate(invalid="ignore"):
        out = expit(num - den0)
    out = np.where(np.isneginf(num), 0.0, np.where(np.isneginf(den0), 1.0, out))
    if y == 0:
        out = 1.0 - out
    return float(out) if out.ndim == 0 else out


def marginal_y(dgp: Dgp) -> float:
    """P(Y=1)."""
    return _dgp.marginal_y(dgp)


@dataclass(frozen=True)
class ClosedFormPredictor:
    """Bayes predictor derived analytically from ``dgp``.

    ``conditioning`` is ``"XV"`` for P(Y|X,V) or ``"X"`` for P(Y|X).
    """

    dgp: Dgp
    conditioning: str = "XV"
    threshold: float = 0.5

    def __post_init__(self):
        if self.conditioning not in CONDITIONINGS:
            raise ValueError(f"conditioning must be one of {CONDITIONINGS}")
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie in (0, 1)")

    def scores(self, x, v=None) -> np.ndarray:
        if self.conditioning == "X":
            return np.asarray(posterior_yx(self.dgp, x), dtype=float)
        if v is None:
            raise ValueError("an XV predictor needs v")
        return np.asarray(posterior_yxv(self.dgp, x, v), dtype=float)

    def labels(self, scores) -> np.ndarray:
        # ties at the threshold go to label 0
        return (np.asarray(scores) > self.threshold).astype(np.int8)


def predict(predictor, sample: Sample) -> dict:
    score = float(predictor.scores(np.array([sample.x]), np.array([sample.v]))[0])
    return {"score": score, "label": int(score > predictor.threshold)}
