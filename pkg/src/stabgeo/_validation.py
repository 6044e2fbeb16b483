"""Small input checks shared by the estimators and the command line."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_samples(X, min_samples: int = 1) -> np.ndarray:
    """2-d float array of finite samples, one vector per row."""
    return check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=min_samples)


def check_alpha(alpha, low: float = 0.0, high: float = 2.0, closed_high: bool = True) -> float:
    a = float(alpha)
    ok = low < a <= high if closed_high else low < a < high
    if not ok:
        raise ValueError(f"alpha = {alpha} outside ({low}, {high}{']' if closed_high else ')'}")
    return a


def check_vector(u, dim: int, name: str = "u", nonzero: bool = False) -> np.ndarray:
    v = np.asarray(u, dtype=float).ravel()
    if v.size != dim:
        raise ValueError(f"{name} must have {dim} entries, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    if nonzero and not np.any(v):
        raise ValueError(f"{name} must be nonzero")
    return v


def check_directions(U, dim: int) -> np.ndarray:
    U = check_array(U, dtype=np.float64, ensure_2d=True)
    if U.shape[1] != dim:
        raise ValueError(f"directions must have {dim} columns")
    return U
