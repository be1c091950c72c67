"""Input validation helpers.

Thin wrappers in the spirit of ``sklearn.utils.validation``: every public
entry point funnels its array arguments through these so that shape and
finiteness errors surface with a consistent message, and so that all
downstream code can assume float64 ndarrays.
"""

from __future__ import annotations

import numpy as np


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce *a* to a 2-D float64 array with finite entries."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries (NaN or Inf)")
    return arr


def as_square_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce *a* to a square 2-D float64 array with finite entries."""
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    return arr


def as_symmetric_matrix(a, name: str = "matrix", rtol: float = 1e-8) -> np.ndarray:
    """Validate symmetry up to *rtol* and return the symmetrized array."""
    arr = as_square_matrix(a, name)
    scale = np.linalg.norm(arr, "fro")
    if np.linalg.norm(arr - arr.T, "fro") > rtol * (1.0 + scale):
        raise ValueError(f"{name} must be symmetric")
    return 0.5 * (arr + arr.T)


def as_positive_vector(v, length: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce *v* to a 1-D float64 array with strictly positive entries."""
    arr = np.asarray(v, dtype=float).ravel()
    if length is not None and arr.size != length:
        raise ValueError(f"{name} must have length {length}, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise ValueError(f"{name} must have strictly positive finite entries")
    return arr


def check_partition_sizes(sizes, total: int | None = None) -> list[int]:
    """Validate a list of block sizes; optionally check they sum to *total*."""
    out = []
    for k in sizes:
        ki = int(k)
        if ki != k or ki < 1:
            raise ValueError(f"block sizes must be positive integers, got {k!r}")
        out.append(ki)
    if not out:
        raise ValueError("partition must contain at least one block")
    if total is not None and sum(out) != total:
        raise ValueError(
            f"partition sizes sum to {sum(out)} but the matrix has order {total}"
        )
    return out


def symmetrize(a: np.ndarray) -> np.ndarray:
    """Return the symmetric part (a + aᵀ)/2 — used before every eigenvalue
    check on a matrix that is symmetric in exact arithmetic."""
    return 0.5 * (a + a.T)
