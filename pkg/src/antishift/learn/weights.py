from __future__ import annotations

import numpy as np

from ..errors import EmptyCellError


def balancing_weights(dataset) -> np.ndarray:
    """Per-sample weights ``P(Y=y_i) / P(Y=y_i | V=v_i)`` estimated by counting.

    Under these weights Y and V are empirically independent and the weights
    sum to the sample size.
    """
    y = np.asarray(dataset.y, dtype=int)
    v = np.asarray(dataset.v, dtype=int)
    n = len(y)
    counts = np.zeros((2, 2))
    np.add.at(counts, (y, v), 1.0)
    for yy in (0, 1):
        for vv in (0, 1):
            if counts[yy, vv] == 0:
                raise EmptyCellError(f"no samples in cell (y={yy}, v={vv})")
    n_y = counts.sum(axis=1)
    n_v = counts.sum(axis=0)
    # P(y) / P(y|v) = (n_y / n) / (n_yv / n_v)
    table = (n_y[:, None] / n) * n_v[None, :] / counts
    return table[y, v]
