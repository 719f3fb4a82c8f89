"""Input validation helpers shared across the package.

All helpers return validated (and, where needed, converted) numpy arrays
and raise ``ValueError`` with the offending argument's name otherwise.
"""

from __future__ import annotations

import numpy as np


def as_matrix(X, name: str = "X") -> np.ndarray:
    """Validate a 2-D float matrix with finite entries."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got ndim={X.ndim}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite entries")
    return X


def as_vector(v, name: str = "v", dim: int | None = None) -> np.ndarray:
    """Validate a 1-D float vector with finite entries."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D array, got ndim={v.ndim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"{name} must have length {dim}, got {v.shape[0]}")
    return v


def as_labels(y, n: int | None = None, name: str = "y") -> np.ndarray:
    """Validate a vector of -1/+1 labels."""
    y = as_vector(y, name=name, dim=n)
    if not np.all(np.abs(y) == 1.0):
        bad = y[np.abs(y) != 1.0]
        raise ValueError(f"{name} must contain only -1/+1 labels, found {bad[:5]}")
    return y


def as_unit_vector(v, name: str = "v", tol: float = 1e-12) -> np.ndarray:
    """Validate a unit-norm direction vector."""
    v = as_vector(v, name=name)
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"{name} must have unit Euclidean norm, got {nrm!r}")
    return v


def as_nonzero_vector(v, name: str = "v") -> np.ndarray:
    """Validate a nonzero vector."""
    v = as_vector(v, name=name)
    if not np.any(v != 0.0):
        raise ValueError(f"{name} must be nonzero")
    return v


def check_positive(x: float, name: str) -> float:
    """Validate a strictly positive finite scalar."""
    x = float(x)
    if not np.isfinite(x) or x <= 0.0:
        raise ValueError(f"{name} must be a positive finite number, got {x!r}")
    return x
