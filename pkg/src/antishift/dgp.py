"""Generative models for the causal (V -> Y) and spurious (V <- C -> Y) settings.

Both models share the likelihood ``X | Y=y, V=v ~ N(mu[y, v], 1)`` and differ
in how ``(Y, V)`` is generated:

* ``CausalDgp``:   ``V ~ Bern(p)``, ``P(Y=0|V=0) = p0``, ``P(Y=1|V=1) = p1``.
  Shifting replaces ``p`` (the marginal of V) and nothing else.
* ``SpuriousDgp``: ``Y ~ Bern(p2)``, ``P(V=0|Y=0) = P(V=1|Y=1) = p``.
  Shifting replaces ``p`` (the conditional of V given Y) and nothing else.

Random streams
--------------
``sample`` uses ``numpy.random.default_rng(seed)`` (PCG64).  Variables are drawn
in ancestral order, one full vector per variable:

* causal:   ``u_v = rng.random(n)``, ``u_y = rng.random(n)``, ``z = rng.standard_normal(n)``
* spurious: ``u_y = rng.random(n)``, ``u_v = rng.random(n)``, ``z = rng.standard_normal(n)``

Binary variables use the inverse CDF, ``b = 1 if u < P(b=1 | parents) else 0``,
and ``x = mu[y, v] + z`` where ``z`` comes from numpy's ziggurat normal
sampler.  The same ``(dgp, n, seed)`` therefore always gives the same dataset.
"""
from __future__ import annotations

import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Union

import numpy as np

from .errors import ConfigError, DegenerateConditioningError

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

CONFIG_KEYS = frozenset({"family", "p", "p0", "p1", "p2", "mu00", "mu10", "mu01", "mu11"})


def _check_prob(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def _check_mu(mu) -> tuple[tuple[float, float], tuple[float, float]]:
    arr = np.asarray(mu, dtype=float)
    if arr.shape != (2, 2):
        raise ValueError(f"mu must be indexable as mu[y][v] with shape (2, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("mu values must be finite")
    return ((float(arr[0, 0]), float(arr[0, 1])), (float(arr[1, 0]), float(arr[1, 1])))


@dataclass(frozen=True)
class CausalDgp:
    """V -> Y model. ``mu[y][v]`` is the mean of X given Y=y, V=v."""

    p: float
    p0: float
    p1: float
    mu: tuple[tuple[float, float], tuple[float, float]]
    sigma: float = 1.0
    family: str = field(default="cause", init=False)

    def __post_init__(self):
        for name in ("p", "p0", "p1"):
            _check_prob(name, getattr(self, name))
        object.__setattr__(self, "mu", _check_mu(self.mu))
        if self.sigma != 1.0:
            raise ValueError("sigma is fixed at 1")


@dataclass(frozen=True)
class SpuriousDgp:
    """Confounded model. ``p`` is both P(V=0|Y=0) and P(V=1|Y=1)."""

    p2: float
    p: float
    mu: tuple[tuple[float, float], tuple[float, float]]
    sigma: float = 1.0
    family: str = field(default="spur", init=False)

    def __post_init__(self):
        for name in ("p2", "p"):
            _check_prob(name, getattr(self, name))
        object.__setattr__(self, "mu", _check_mu(self.mu))
        if self.sigma != 1.0:
            raise ValueError("sigma is fixed at 1")


Dgp = Union[CausalDgp, SpuriousDgp]


class Sample(NamedTuple):
    v: int
    y: int
    x: float


@dataclass(frozen=True)
class Dataset:
    """Column-stored samples. Iterating yields :class:`Sample` rows."""

    v: np.ndarray
    y: np.ndarray
    x: np.ndarray
    seed: object = None

    def __post_init__(self):
        if not (len(self.v) == len(self.y) == len(self.x)):
            raise ValueError("v, y and x must have equal length")

    @property
    def count(self) -> int:
        return len(self.x)

    def __len__(self) -> int:
        return len(self.x)

    def __iter__(self) -> Iterator[Sample]:
        for v, y, x in zip(self.v.tolist(), self.y.tolist(), self.x.tolist()):
            yield Sample(v, y, x)

    def __getitem__(self, i: int) -> Sample:
        return Sample(int(self.v[i]), int(self.y[i]), float(self.x[i]))


def mu_array(dgp: Dgp) -> np.ndarray:
    return np.array(dgp.mu, dtype=float)


def marginal_v(dgp: Dgp) -> float:
    """P(V=1)."""
    if dgp.family == "cause":
        return dgp.p
    return dgp.p2 * dgp.p + (1.0 - dgp.p2) * (1.0 - dgp.p)


def marginal_y(dgp: Dgp) -> float:
    """P(Y=1)."""
    if dgp.family == "cause":
        return (1.0 - dgp.p) * (1.0 - dgp.p0) + dgp.p * dgp.p1
    return dgp.p2


def joint_yv(dgp: Dgp, y: int, v: int) -> float:
    """P(Y=y, V=v), computed along the model's own factorisation."""
    if dgp.family == "cause":
        pv = dgp.p if v == 1 else 1.0 - dgp.p
        py1 = dgp.p1 if v == 1 else 1.0 - dgp.p0
        return pv * (py1 if y == 1 else 1.0 - py1)
    py = dgp.p2 if y == 1 else 1.0 - dgp.p2
    # P(V=v|Y=y) = p when v == y, else 1 - p
    pv_given_y = dgp.p if v == y else 1.0 - dgp.p
    return py * pv_given_y


def cond_y_given_v(dgp: Dgp, v: int) -> float:
    """P(Y=1 | V=v)."""
    if dgp.family == "cause":
        return dgp.p1 if v == 1 else 1.0 - dgp.p0
    pv = marginal_v(dgp) if v == 1 else 1.0 - marginal_v(dgp)
    if pv == 0.0:
        raise DegenerateConditioningError(f"P(V={v}) = 0 under {dgp!r}")
    return joint_yv(dgp, 1, v) / pv


def log_likelihood(dgp: Dgp, x, y, v):
    """log N(x; mu[y, v], 1); broadcasts over array arguments."""
    mu = mu_array(dgp)[np.asarray(y, dtype=int), np.asarray(v, dtype=int)]
    return -0.5 * (np.asarray(x, dtype=float) - mu) ** 2 - LOG_SQRT_2PI


def likelihood(dgp: Dgp, x, y, v):
    """Density of X at ``x`` given Y=y, V=v."""
    out = np.exp(log_likelihood(dgp, x, y, v))
    return float(out) if np.ndim(out) == 0 else out


def joint_density(dgp: Dgp, x, y: int, v: int):
    """p(x, y, v) = p(x | y, v) P(y, v)."""
    return likelihood(dgp, x, y, v) * joint_yv(dgp, y, v)


def shift(dgp: Dgp, p_target: float) -> Dgp:
    """Member of the same shift family with the shift parameter set to ``p_target``.

    Causal models get a new P(V=1); spurious models a new P(V=y|Y=y).  Every
    other field is carried over untouched.
    """
    _check_prob("p_target", p_target)
    return replace(dgp, p=float(p_target))


def draw(dgp: Dgp, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ancestral sampling from an existing generator; returns ``(v, y, x)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if dgp.family == "cause":
        v = (rng.random(n) < dgp.p).astype(np.int8)
        py1 = np.where(v == 1, dgp.p1, 1.0 - dgp.p0)
        y = (rng.random(n) < py1).astype(np.int8)
    else:
        y = (rng.random(n) < dgp.p2).astype(np.int8)
        pv1 = np.where(y == 1, dgp.p, 1.0 - dgp.p)
        v = (rng.random(n) < pv1).astype(np.int8)
    x = mu_array(dgp)[y, v] + rng.standard_normal(n)
    return v, y, x


def sample(dgp: Dgp, n: int, seed) -> Dataset:
    """Draw ``n`` iid samples; deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    v, y, x = draw(dgp, n, rng)
    return Dataset(v=v, y=y, x=x, seed=seed)


def from_config(cfg: Mapping) -> Dgp:
    """Build a model from a flat mapping (``family``, ``p``, ``mu00``...)."""
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    family = cfg.get("family")
    try:
        mu = ((cfg["mu00"], cfg["mu01"]), (cfg["mu10"], cfg["mu11"]))
        if family == "cause":
            return CausalDgp(p=float(cfg["p"]), p0=float(cfg["p0"]), p1=float(cfg["p1"]), mu=mu)
        if family == "spur":
            return SpuriousDgp(p2=float(cfg["p2"]), p=float(cfg["p"]), mu=mu)
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"family must be 'cause' or 'spur', got {family!r}")


def to_config(dgp: Dgp) -> dict:
    (m00, m01), (m10, m11) = dgp.mu
    cfg = {"family": dgp.family, "p": dgp.p}
    if dgp.family == "cause":
        cfg.update(p0=dgp.p0, p1=dgp.p1)
    else:
        cfg.update(p2=dgp.p2)
    cfg.update(mu00=m00, mu10=m10, mu01=m01, mu11=m11)
    return cfg


def load_toml(path) -> dict:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    with open(Path(path), "rb") as fh:
        try:
            return tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None


def load_config(path) -> Dgp:
    return from_config(load_toml(path))
