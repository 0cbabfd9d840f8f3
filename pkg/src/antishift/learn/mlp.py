"""A small tanh MLP with a hand-written backward pass and an AdamW optimiser."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit


@dataclass
class Mlp:
    """Fully connected net ``widths[0] -> ... -> widths[-1]`` with tanh hidden units.

    The last hidden layer is the representation used by the MMD penalty; the
    output layer is a linear head producing a single logit.
    """

    widths: tuple[int, ...]
    params: list[np.ndarray] = field(repr=False)

    @classmethod
    def init(cls, widths, rng: np.random.Generator) -> "Mlp":
        widths = tuple(int(w) for w in widths)
        if len(widths) < 2 or widths[-1] != 1:
            raise ValueError("widths must end in a single output unit")
        params = []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            params.append(rng.normal(0.0, 1.0 / np.sqrt(fan_in), size=(fan_in, fan_out)))
            params.append(np.zeros(fan_out))
        return cls(widths, params)

    @classmethod
    def zeros(cls, widths) -> "Mlp":
        widths = tuple(int(w) for w in widths)
        params = []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            params += [np.zeros((fan_in, fan_out)), np.zeros(fan_out)]
        return cls(widths, params)

    def copy(self) -> "Mlp":
        return Mlp(self.widths, [p.copy() for p in self.params])

    @property
    def n_layers(self) -> int:
        return len(self.params) // 2

    def forward(self, inputs: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Return ``(logits, activations)``; ``activations[-1]`` is the representation."""
        h = inputs
        acts = [inputs]
        for k in range(self.n_layers - 1):
            h = np.tanh(h @ self.params[2 * k] + self.params[2 * k + 1])
            acts.append(h)
        logits = h @ self.params[-2] + self.params[-1]
        return logits[:, 0], acts

    def backward(
        self, acts: list[np.ndarray], d_logits: np.ndarray, d_repr: np.ndarray | None = None
    ) -> list[np.ndarray]:
        """Parameter gradients given dL/dlogits and an optional extra dL/drepresentation."""
        grads = [None] * len(self.params)
        delta = d_logits[:, None]
        grads[-2] = acts[-1].T @ delta
        grads[-1] = delta.sum(axis=0)
        d_h = delta @ self.params[-2].T
        if d_repr is not None:
            d_h = d_h + d_repr
        for k in range(self.n_layers - 2, -1, -1):
            h = acts[k + 1]
            d_pre = d_h * (1.0 - h * h)
            grads[2 * k] = acts[k].T @ d_pre
            grads[2 * k + 1] = d_pre.sum(axis=0)
            if k > 0:
                d_h = d_pre @ self.params[2 * k].T
        return grads

    def predict_proba(self, inputs: np.ndarray) -> np.ndarray:
        logits, _ = self.forward(inputs)
        return expit(logits)

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.params)


class AdamW:
    """Adam with decoupled weight decay."""

    def __init__(self, params, lr, weight_decay=0.0, betas=(0.9, 0.999), eps=1e-8):
        self.params = params
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = (m / c1) / (np.sqrt(v / c2) + self.eps) + self.weight_decay * p
            p -= self.lr * update
