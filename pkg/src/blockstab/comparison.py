"""Comparison matrices, Metzler structure and scaled diagonal dominance.

The scalar comparison matrix of A clips the diagonal to nonpositive
values and takes absolute values off it.  The block comparison matrix of
an α-partitioned A puts ``−‖(sI − A_ii)⁻¹‖_{H∞}^{−1}`` on the diagonal
(0 when the block is not Hurwitz) and the coupling spectral norms
``σ̄(A_ij)`` off it.  Both are Metzler with nonpositive diagonal, so
their Hurwitz-ness is equivalent to the existence of positive scaling
vectors d, e with ``−M d > 0`` and ``−eᵀ M > 0`` — the certificates this
module extracts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_positive_vector, as_square_matrix
from .errors import NumericalError
from .linalg import (
    DEFAULT_HINF_TOL,
    eigenvalues,
    hinf_norm_resolvent,
    is_hurwitz,
    max_singular_value,
)
from .partition import PartitionedMatrix

__all__ = [
    "ComparisonMatrix",
    "ScalingPair",
    "scalar_comparison",
    "block_comparison",
    "is_metzler",
    "metzler_scalings",
    "check_scaled_dominance",
    "block_gershgorin_check",
]

#: Default absolute margin on the spectral abscissa when deciding whether
#: a comparison matrix is Hurwitz.
COMPARISON_HURWITZ_MARGIN = 1e-9


@dataclass(frozen=True)
class ComparisonMatrix:
    """A comparison matrix together with the provenance of each entry.

    ``diagonal_provenance[i]`` records how diagonal entry i was obtained:
    ``{"clipped_diagonal": a_ii}`` for the scalar kind, or
    ``{"inverse_hinf_norm": value, "hurwitz": flag}`` for the block kind
    (``value`` is 0 and ``flag`` False for a non-Hurwitz diagonal block).
    ``offdiag_provenance`` is the full matrix of absolute values /
    coupling spectral norms with zeros on the diagonal.
    """

    matrix: np.ndarray = field(repr=False)
    kind: str
    diagonal_provenance: tuple
    offdiag_provenance: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    def is_hurwitz(self, margin: float = COMPARISON_HURWITZ_MARGIN) -> bool:
        return float(np.max(eigenvalues(self.matrix).real)) < -margin


@dataclass(frozen=True)
class ScalingPair:
    """Positive vectors certifying row (d) and column (e) scaled dominance."""

    d: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d", as_positive_vector(self.d, name="d"))
        object.__setattr__(self, "e", as_positive_vector(self.e, len(self.d), "e"))


def scalar_comparison(a) -> ComparisonMatrix:
    """Entrywise comparison matrix: ``−max{−a_ii, 0}`` on the diagonal,
    ``|a_ij|`` off it.  Idempotent: Metzler matrices with nonpositive
    diagonal are fixed points."""
    arr = as_square_matrix(a)
    out = np.abs(arr)
    np.fill_diagonal(out, -np.maximum(-np.diag(arr), 0.0))
    offdiag = np.abs(arr)
    np.fill_diagonal(offdiag, 0.0)
    provenance = tuple({"clipped_diagonal": float(x)} for x in np.diag(arr))
    return ComparisonMatrix(out, "scalar", provenance, offdiag)


def block_comparison(p: PartitionedMatrix, tol: float = DEFAULT_HINF_TOL) -> ComparisonMatrix:
    """Block comparison matrix of an α-partitioned matrix.

    Diagonal entry i is ``−‖(sI − A_ii)⁻¹‖_{H∞}^{−1}`` (0 when A_ii is
    not Hurwitz, the continuous extension); off-diagonal entry (i, j) is
    ``σ̄(A_ij)``.  Structurally zero blocks yield exact zeros.

    On the trivial partition {1, …, 1} this coincides with
    :func:`scalar_comparison` whenever every diagonal entry is negative
    (for scalars ``‖(s − a)⁻¹‖_{H∞}^{−1} = max{−a, 0}``).
    """
    n = p.n_blocks
    out = np.zeros((n, n))
    offdiag = np.zeros((n, n))
    provenance = []
    for i in range(1, n + 1):
        res = hinf_norm_resolvent(p.block(i, i), tol=tol)
        out[i - 1, i - 1] = -res.inverse_norm
        provenance.append(
            {"inverse_hinf_norm": res.inverse_norm, "hurwitz": res.is_finite}
        )
        for j in range(1, n + 1):
            if j == i:
                continue
            blk = p.block(i, j)
            sigma = 0.0 if not np.any(blk) else max_singular_value(blk)
            out[i - 1, j - 1] = sigma
            offdiag[i - 1, j - 1] = sigma
    return ComparisonMatrix(out, "block", tuple(provenance), offdiag)


def is_metzler(m) -> bool:
    """True iff every off-diagonal entry of the square matrix is ≥ 0."""
    arr = as_square_matrix(m)
    off = arr.copy()
    np.fill_diagonal(off, 0.0)
    return bool(np.all(off >= 0.0))


def metzler_scalings(m, margin: float = COMPARISON_HURWITZ_MARGIN):
    """Extract positive scaling vectors from a Hurwitz Metzler matrix.

    For a Hurwitz Metzler ``m``, ``−m⁻¹`` is entrywise nonnegative and
    nonsingular, so ``d = −m⁻¹·1`` and ``e = −m⁻ᵀ·1`` are elementwise
    positive and satisfy ``−m d = 1 > 0`` and ``−eᵀ m = 1ᵀ > 0``.  Both
    properties are re-verified numerically before returning.

    Returns
    -------
    ScalingPair or None
        ``None`` when ``m`` is not Hurwitz (with the given margin on the
        spectral abscissa) — no scaling pair exists in that case.

    Raises
    ------
    ValueError
        If ``m`` is not Metzler.
    NumericalError
        If the extracted vectors fail the positivity re-verification
        (only possible for spectra within round-off of the axis).
    """
    arr = as_square_matrix(m)
    if not is_metzler(arr):
        raise ValueError("matrix is not Metzler (negative off-diagonal entry)")
    if not is_hurwitz(arr, margin=margin):
        return None
    ones = np.ones(arr.shape[0])
    try:
        d = np.linalg.solve(arr, -ones)
        e = np.linalg.solve(arr.T, -ones)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"scaling solve failed: {exc}") from exc

    floor_d = margin * max(1.0, float(np.max(np.abs(d))))
    floor_e = margin * max(1.0, float(np.max(np.abs(e))))
    if (
        np.any(d <= floor_d)
        or np.any(e <= floor_e)
        or np.any(-(arr @ d) <= 0.0)
        or np.any(-(e @ arr) <= 0.0)
    ):
        raise NumericalError("scaling vectors failed positivity re-verification")
    return ScalingPair(d, e)


def check_scaled_dominance(a, d, mode: str = "row") -> bool:
    """Strict scaled diagonal dominance of ``a`` under the weights ``d``.

    Row mode checks ``d_i |a_ii| > Σ_{j≠i} d_j |a_ij|`` for every i;
    column mode checks ``d_i |a_ii| > Σ_{j≠i} d_j |a_ji|`` (the weights
    then play the role of the column vector e).
    """
    arr = as_square_matrix(a)
    weights = as_positive_vector(d, arr.shape[0], "d")
    if mode not in ("row", "column"):
        raise ValueError(f"mode must be 'row' or 'column', got {mode!r}")
    absolute = np.abs(arr)
    diag = np.diag(absolute)
    off = absolute.copy()
    np.fill_diagonal(off, 0.0)
    if mode == "row":
        sums = off @ weights
    else:
        sums = weights @ off
    return bool(np.all(weights * diag > sums))


def block_gershgorin_check(p: PartitionedMatrix, tol: float = 1e-6) -> bool:
    """Diagnostic block eigenvalue localization.

    Every eigenvalue λ of the full matrix must satisfy
    ``‖(λI − A_ii)⁻¹‖₂^{−1} ≤ Σ_{j≠i} σ̄(A_ij)`` for at least one block
    row i.  The left side is evaluated as ``σ_min(λI − A_ii)`` directly
    by complex SVD, which is finite and well-defined even when λ is an
    eigenvalue of the block itself.
    """
    n = p.n_blocks
    radii = []
    for i in range(1, n + 1):
        radius = 0.0
        for j in range(1, n + 1):
            if j != i:
                blk = p.block(i, j)
                if np.any(blk):
                    radius += max_singular_value(blk)
        radii.append(radius)
    for lam in eigenvalues(p.matrix):
        localized = False
        for i in range(1, n + 1):
            aii = p.block(i, i)
            shifted = lam * np.eye(aii.shape[0]) - aii
            dist = float(np.linalg.svd(shifted, compute_uv=False)[-1])
            if dist <= radii[i - 1] + tol * (1.0 + abs(lam)):
                localized = True
                break
        if not localized:
            return False
    return True
