"""Training of plain and invariant predictors on fresh draws from a model.

Every step samples a new batch from the source model, so there is no fixed
training set.  Three independent random streams are spawned from the seed:
parameter initialisation, batch sampling and MMD subsampling.  A run with
``alpha == 0`` never touches the third stream, which makes the invariant
trainer coincide with weighted plain training from the same seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .. import dgp as _dgp
from ..errors import BatchCompositionError, TrainingDivergedError
from .mlp import AdamW, Mlp
from .mmd import mmd2_rbf_with_grad
from .weights import balancing_weights

HIDDEN = (16, 16)
CONDITIONINGS = ("X", "XV", "invariant_X")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-2
    mmd_weight: float = 0.0
    steps: int = 1024
    batch_size: int = 2**14
    weight_decay: float = 1e-2
    seed: int = 0
    # MMD is estimated on at most this many representations per V group
    mmd_points: int = 256
    # None: median heuristic on each batch
    bandwidth: float | None = None

    def __post_init__(self):
        if self.learning_rate < 0 or self.mmd_weight < 0 or self.weight_decay < 0:
            raise ValueError("learning_rate, mmd_weight and weight_decay must be nonnegative")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        if self.mmd_points < 2:
            raise ValueError("mmd_points must be >= 2")


@dataclass(frozen=True)
class LossSpec:
    """What the per-batch loss contains.

    ``mmd_index`` holds the batch rows of the V=0 and V=1 groups entering the
    penalty; ``None`` uses every row of each group.
    """

    conditioning: str = "X"
    alpha: float = 0.0
    balance: bool = False
    bandwidth: float | None = None
    mmd_index: tuple[np.ndarray, np.ndarray] | None = None


@dataclass
class LearnedPredictor:
    model: Mlp
    conditioning: str
    train_config: TrainConfig
    final_loss: float
    loss_history: np.ndarray = field(repr=False, default=None)
    mmd_history: np.ndarray = field(repr=False, default=None)
    threshold: float = 0.5

    def __post_init__(self):
        expected = 2 if self.conditioning == "XV" else 1
        if self.model.widths[0] != expected:
            raise ValueError(f"{self.conditioning} needs input width {expected}")

    def scores(self, x, v=None) -> np.ndarray:
        return self.model.predict_proba(make_inputs(self.conditioning, x, v))

    def labels(self, scores) -> np.ndarray:
        return (np.asarray(scores) > self.threshold).astype(np.int8)


def make_inputs(conditioning: str, x, v=None) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if conditioning == "XV":
        if v is None:
            raise ValueError("XV inputs need v")
        return np.column_stack([x, np.asarray(v, dtype=float)])
    return x[:, None]


def loss_and_grad(model: Mlp, batch, spec: LossSpec):
    """Return ``(total_loss, mmd_value, grads)`` for one batch."""
    inputs = make_inputs(spec.conditioning, batch.x, batch.v)
    y = np.asarray(batch.y, dtype=float)
    n = len(y)
    w = balancing_weights(batch) if spec.balance else np.ones(n)
    logits, acts = model.forward(inputs)
    # softplus(z) - y z, stable for large |z|
    ce = np.logaddexp(0.0, logits) - y * logits
    loss = float(np.dot(w, ce) / n)
    d_logits = w * (expit(logits) - y) / n

    mmd_value = 0.0
    d_repr = None
    if spec.alpha > 0:
        rep = acts[-1]
        if spec.mmd_index is None:
            idx0 = np.flatnonzero(np.asarray(batch.v) == 0)
            idx1 = np.flatnonzero(np.asarray(batch.v) == 1)
        else:
            idx0, idx1 = spec.mmd_index
        mmd_value, g0, g1, _ = mmd2_rbf_with_grad(rep[idx0], rep[idx1], spec.bandwidth)
        d_repr = np.zeros_like(rep)
        d_repr[idx0] += spec.alpha * g0
        d_repr[idx1] += spec.alpha * g1
        loss += spec.alpha * mmd_value
    grads = model.backward(acts, d_logits, d_repr)
    return loss, mmd_value, grads


def _fit(dgp_source, conditioning: str, config: TrainConfig, balance: bool, alpha: float):
    init_ss, data_ss, mmd_ss = np.random.SeedSequence(config.seed).spawn(3)
    width_in = 2 if conditioning == "XV" else 1
    model = Mlp.init((width_in, *HIDDEN, 1), np.random.default_rng(init_ss))
    opt = AdamW(model.params, config.learning_rate, config.weight_decay)
    data_rng = np.random.default_rng(data_ss)
    mmd_rng = np.random.default_rng(mmd_ss)
    input_kind = "X" if conditioning == "invariant_X" else conditioning
    losses = np.empty(config.steps)
    mmds = np.zeros(config.steps)
    # divergence is detected explicitly below, so overflow warnings are noise
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(config.steps):
            batch = _dgp.Dataset(*_dgp.draw(dgp_source, config.batch_size, data_rng))
            mmd_index = None
            if conditioning == "invariant_X":
                idx0 = np.flatnonzero(batch.v == 0)
                idx1 = np.flatnonzero(batch.v == 1)
                if len(idx0) < 2 or len(idx1) < 2:
                    raise BatchCompositionError(
                        f"step {step}: V groups of size {len(idx0)} and {len(idx1)}; need >= 2 each"
                    )
                if alpha > 0:
                    k = config.mmd_points
                    if len(idx0) > k:
                        idx0 = np.sort(mmd_rng.choice(idx0, k, replace=False))
                    if len(idx1) > k:
                        idx1 = np.sort(mmd_rng.choice(idx1, k, replace=False))
                    mmd_index = (idx0, idx1)
            spec = LossSpec(input_kind, alpha, balance, config.bandwidth, mmd_index)
            loss, mmd_value, grads = loss_and_grad(model, batch, spec)
            if not np.isfinite(loss):
                raise TrainingDivergedError(f"non-finite loss at step {step} (lr={config.learning_rate})")
            losses[step] = loss
            mmds[step] = mmd_value
            opt.step(grads)
    if not model.all_finite():
        raise TrainingDivergedError(f"non-finite parameters after training (lr={config.learning_rate})")
    return LearnedPredictor(model, conditioning, config, float(losses[-1]), losses, mmds)


def train_plain(dgp_source, conditioning: str, config: TrainConfig, *, balance: bool = False):
    """Minimise (optionally balancing-weighted) cross-entropy for P(Y|X) or P(Y|X,V)."""
    if conditioning not in ("X", "XV"):
        raise ValueError("conditioning must be 'X' or 'XV'")
    return _fit(dgp_source, conditioning, config, balance, 0.0)


def train_invariant(dgp_source, config: TrainConfig):
    """Balancing-weighted cross-entropy on X plus ``mmd_weight`` times the
    squared MMD between the last-hidden-layer representations of the V=0 and
    V=1 rows of each batch."""
    return _fit(dgp_source, "invariant_X", config, True, config.mmd_weight)


def grad_check(model: Mlp, batch, loss_spec: LossSpec, step: float = 1e-5, max_params: int = 2000,
               seed: int = 0) -> float:
    """Max relative error between analytic and central-difference gradients.

    The relative error of each entry uses ``max(|analytic|, |numeric|, 1e-8)``
    as denominator.  Models with more than ``max_params`` scalars are checked
    on a random subset of that many entries.  A median-heuristic bandwidth is
    frozen at the starting parameters so the loss is smooth.
    """
    spec = loss_spec
    if spec.alpha > 0 and spec.bandwidth is None:
        inputs = make_inputs(spec.conditioning, batch.x, batch.v)
        rep = model.forward(inputs)[1][-1]
        v = np.asarray(batch.v)
        idx0, idx1 = spec.mmd_index or (np.flatnonzero(v == 0), np.flatnonzero(v == 1))
        bandwidth = mmd2_rbf_with_grad(rep[idx0], rep[idx1])[3]
        spec = LossSpec(spec.conditioning, spec.alpha, spec.balance, bandwidth, spec.mmd_index)
    work = model.copy()
    _, _, analytic = loss_and_grad(work, batch, spec)
    entries = [(k, i) for k, p in enumerate(work.params) for i in range(p.size)]
    if len(entries) > max_params:
        rng = np.random.default_rng(seed)
        entries = [entries[j] for j in rng.choice(len(entries), max_params, replace=False)]
    worst = 0.0
    for k, i in entries:
        flat = work.params[k].reshape(-1)
        orig = flat[i]
        flat[i] = orig + step
        up = loss_and_grad(work, batch, spec)[0]
        flat[i] = orig - step
        down = loss_and_grad(work, batch, spec)[0]
        flat[i] = orig
        numeric = (up - down) / (2 * step)
        a = analytic[k].reshape(-1)[i]
        err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-8)
        worst = max(worst, err)
    return worst
