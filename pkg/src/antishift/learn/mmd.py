"""Unbiased squared MMD with a Gaussian kernel, and its gradient."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.spatial.distance import pdist


def _as_points(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d, 0.0)


def median_bandwidth(a, b=None) -> float:
    """Median pairwise distance over the pooled points (1.0 if that is zero).

    Standalone helper; training takes the median of squared distances instead,
    which can differ from this when the pair count is even.
    """
    pts = _as_points(a) if b is None else np.vstack([_as_points(a), _as_points(b)])
    med = float(np.median(pdist(pts))) if len(pts) > 1 else 0.0
    return med if med > 0 else 1.0


@lru_cache(maxsize=8)
def _upper(m: int):
    return np.triu_indices(m, k=1)


def mmd2_rbf_with_grad(a, b, bandwidth: float | None = None):
    """Return ``(mmd2, d mmd2 / da, d mmd2 / db, bandwidth)``.

    ``bandwidth=None`` applies the median heuristic to the pooled points; the
    gradient treats the resulting bandwidth as a constant.
    """
    a = _as_points(a)
    b = _as_points(b)
    m, n = len(a), len(b)
    if m < 2 or n < 2:
        raise ValueError(f"MMD needs at least 2 points per set, got {m} and {n}")
    daa, dbb, dab = _sqdist(a, a), _sqdist(b, b), _sqdist(a, b)
    if bandwidth is None:
        pooled = np.concatenate([daa[_upper(m)], dbb[_upper(n)], dab.ravel()])
        bandwidth = float(np.sqrt(np.median(pooled))) or 1.0
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    s = 2.0 * bandwidth**2
    kaa = np.exp(-daa / s)
    kbb = np.exp(-dbb / s)
    kab = np.exp(-dab / s)
    # exclude i == j terms; their kernel value is exactly 1
    saa = kaa.sum() - np.trace(kaa)
    sbb = kbb.sum() - np.trace(kbb)
    value = saa / (m * (m - 1)) + sbb / (n * (n - 1)) - 2.0 * kab.mean()

    h2 = bandwidth**2
    ga = -2.0 / (m * (m - 1) * h2) * (kaa.sum(1)[:, None] * a - kaa @ a)
    ga += 2.0 / (m * n * h2) * (kab.sum(1)[:, None] * a - kab @ b)
    gb = -2.0 / (n * (n - 1) * h2) * (kbb.sum(1)[:, None] * b - kbb @ b)
    gb += 2.0 / (m * n * h2) * (kab.sum(0)[:, None] * b - kab.T @ a)
    return float(value), ga, gb, bandwidth


def mmd2_rbf(a, b, bandwidth: float) -> float:
    """Unbiased squared MMD between point sets ``a`` and ``b``.

    Uses ``k(u, w) = exp(-|u - w|^2 / (2 bandwidth^2))``.  Can be slightly
    negative when the two sets come from the same distribution.
    """
    return mmd2_rbf_with_grad(a, b, bandwidth)[0]
