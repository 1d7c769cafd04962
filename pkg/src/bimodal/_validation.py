"""Input validation helpers for the estimator API."""

from __future__ import annotations

import numpy as np


def as_samples(X):
    """Coerce estimator input to a 1-d float vector.

    Accepts a 1-d array-like or a 2-d column (n, 1); rejects wider matrices
    and non-finite values.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got shape {arr.shape}")
        arr = arr[:, 0]
    elif arr.ndim != 1:
        raise ValueError(f"expected 1-d samples or an (n, 1) column, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError("samples contain NaN or infinity")
    return arr


def as_probability(p, name="p"):
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1")
    return p
