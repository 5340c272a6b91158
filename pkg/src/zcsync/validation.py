"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np


def as_complex_samples(x, name: str = "x", min_len: int = 1) -> np.ndarray:
    """Coerce array-like input to a 1-D complex128 sample vector."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValueError(f"{name} must have at least {min_len} samples, got {arr.size}")
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"{name} must be numeric, got dtype {arr.dtype}")
    return np.ascontiguousarray(arr, dtype=np.complex128)


def as_sample_matrix(X, name: str = "X") -> np.ndarray:
    """Coerce input to a 2-D complex128 matrix of shape (n_rows, n_samples).

    A single 1-D buffer is promoted to one row.
    """
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[1] == 0:
        raise ValueError(f"{name} has zero-length rows")
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"{name} must be numeric, got dtype {arr.dtype}")
    return np.ascontiguousarray(arr, dtype=np.complex128)


def ensure_rng(random_state) -> np.random.Generator:
    """Normalize seeds / generators to a ``numpy.random.Generator``.

    Accepts None (fresh OS entropy), a non-negative int, a sequence of
    non-negative ints (hierarchical seed), or an existing Generator.
    """
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)


def check_scalar(value, name: str, *, minimum=None, strict_min=False, finite=True):
    """Validate a real scalar; returns it as float."""
    v = float(value)
    if finite and not np.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if minimum is not None:
        if strict_min and not v > minimum:
            raise ValueError(f"{name} must be > {minimum}, got {value!r}")
        if not strict_min and not v >= minimum:
            raise ValueError(f"{name} must be >= {minimum}, got {value!r}")
    return v


def check_int(value, name: str, *, minimum=None, maximum=None) -> int:
    """Validate an integer-valued argument; returns it as int."""
    if isinstance(value, (bool, np.bool_)):
        raise ValueError(f"{name} must be an integer, got bool")
    v = int(value)
    if v != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if minimum is not None and v < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {v}")
    if maximum is not None and v > maximum:
        raise ValueError(f"{name} must be <= {maximum}, got {v}")
    return v
