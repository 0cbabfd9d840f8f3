"""Seed derivation and a small process-pool map."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np


def derive_seed(master: int, *indices: int) -> int:
    """Deterministic 63-bit seed for task ``indices`` under ``master``."""
    state = np.random.SeedSequence([int(master), *map(int, indices)]).generate_state(2, np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


def parallel_map(fn, items, n_jobs: int = 1) -> list:
    """``[fn(i) for i in items]``, optionally across processes; order is preserved."""
    items = list(items)
    if n_jobs == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=None if n_jobs < 1 else n_jobs) as pool:
        return list(pool.map(fn, items))
