"""Dense linear-algebra kernels.

Everything else in the package is built on the routines in this module:
spectra and Hurwitz tests, singular values, a continuous-time Lyapunov
solver, a stabilizing algebraic-Riccati solver for equations of the
bounded-real type ``P a + aᵀ P + P r P + q = 0``, and the H∞ norm of a
resolvent ``(sI − a)⁻¹`` computed by bisection on a Hamiltonian
eigenvalue test.

All functions are pure: they never mutate their arguments and hold no
state, so they are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._validation import as_matrix, as_square_matrix, as_symmetric_matrix
from .errors import NumericalError, UnstableMatrixError

__all__ = [
    "HinfResult",
    "eigenvalues",
    "is_hurwitz",
    "max_singular_value",
    "min_singular_value",
    "solve_lyapunov",
    "solve_care_positive",
    "hinf_norm_resolvent",
]

#: Relative half-width at which the H∞ bisection stops.
DEFAULT_HINF_TOL = 1e-8

#: Iteration cap for the H∞ bisection (doubling plus bisection phases).
HINF_MAX_ITERATIONS = 200

#: An eigenvalue λ counts as lying on the imaginary axis when
#: |Re λ| ≤ IMAG_AXIS_RTOL · (1 + |λ|).  The scale-aware floor prevents
#: false negatives near a resonance peak.
IMAG_AXIS_RTOL = 1e-8

# Orders up to this bound use the dense Kronecker linear solve for the
# Lyapunov equation; larger orders go through the Schur-based solver.
_KRONECKER_MAX_ORDER = 8


@dataclass(frozen=True)
class HinfResult:
    """Outcome of an H∞ norm computation for a resolvent.

    Attributes
    ----------
    norm : float
        ``sup_ω ‖(iωI − a)⁻¹‖₂``, or ``math.inf`` when ``a`` is not
        Hurwitz (the norm diverges as ``s`` approaches a closed-right-
        half-plane eigenvalue).
    inverse_norm : float
        ``1 / norm``; defined as ``0.0`` in the infinite case, which is
        the continuous extension used by the block comparison matrix.
    peak_frequency : float
        Frequency (rad per unit time) at which the supremum is attained,
        to within the bisection tolerance; ``0.0`` in the infinite case.
    iterations : int
        Number of Hamiltonian eigenvalue tests performed.
    """

    norm: float
    inverse_norm: float
    peak_frequency: float
    iterations: int

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.norm)


def eigenvalues(m) -> np.ndarray:
    """Return all eigenvalues of a square matrix as a complex array.

    Backward-stable to machine precision at the scale of ``‖m‖``; for a
    real input the result is closed under complex conjugation.
    """
    arr = as_square_matrix(m)
    try:
        return np.linalg.eigvals(arr)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - QR stall
        raise NumericalError(f"eigenvalue iteration failed: {exc}") from exc


def spectral_abscissa(m) -> float:
    """Largest real part over the spectrum of ``m``."""
    return float(np.max(eigenvalues(m).real))


def is_hurwitz(m, margin: float = 0.0) -> bool:
    """True iff every eigenvalue of ``m`` has real part < ``-margin``.

    Parameters
    ----------
    m : array_like
        Square matrix.
    margin : float, optional
        Nonnegative stability margin.  The default 0 tests plain
        Hurwitz-ness; a positive value demands strict decay.
    """
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    return spectral_abscissa(m) < -margin


def max_singular_value(m) -> float:
    """Largest singular value σ̄(m) = ‖m‖₂ of a (possibly rectangular) matrix."""
    arr = as_matrix(m)
    try:
        return float(np.linalg.norm(arr, 2))
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"SVD failed: {exc}") from exc


def min_singular_value(m) -> float:
    """Smallest singular value of a (possibly rectangular) matrix."""
    arr = as_matrix(m)
    try:
        return float(np.linalg.svd(arr, compute_uv=False)[-1])
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"SVD failed: {exc}") from exc


# ---------------------------------------------------------------------------
# Lyapunov equation
# ---------------------------------------------------------------------------

def _lyapunov_kronecker(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve X aᵀ + a X + q = 0 by flattening to a dense linear system.

    Uses the column-major vectorization identity vec(a X) = (I ⊗ a) vec(X)
    and vec(X aᵀ) = (a ⊗ I) vec(X).  O(n⁶) — only sensible for small
    orders, where it doubles as an independent oracle for the Schur path.
    """
    n = a.shape[0]
    coeff = np.kron(np.eye(n), a) + np.kron(a, np.eye(n))
    x = np.linalg.solve(coeff, -q.flatten(order="F"))
    return x.reshape((n, n), order="F")


def solve_lyapunov(a, q, rtol: float = 1e-9) -> np.ndarray:
    """Solve the continuous-time Lyapunov equation ``X aᵀ + a X + q = 0``.

    Parameters
    ----------
    a : array_like
        Square Hurwitz matrix (stability guarantees a unique solution).
    q : array_like
        Symmetric matrix of the same order.
    rtol : float, optional
        Residual acceptance threshold, relative to ``‖a‖‖X‖ + ‖q‖``.

    Returns
    -------
    numpy.ndarray
        The symmetric solution ``X``.

    Raises
    ------
    UnstableMatrixError
        If ``a`` is not Hurwitz.
    NumericalError
        If the computed residual exceeds the threshold.

    Notes
    -----
    Orders up to 8 are solved by a direct Kronecker-vectorized linear
    solve; larger orders use the Schur-based (Bartels–Stewart) solver
    from SciPy.  The two paths cross-validate each other in the test
    suite.
    """
    a = as_square_matrix(a, "a")
    q = as_symmetric_matrix(q, "q")
    if q.shape != a.shape:
        raise ValueError(f"q must match a in shape, got {q.shape} vs {a.shape}")
    if not is_hurwitz(a):
        raise UnstableMatrixError(
            "Lyapunov equation requires a Hurwitz coefficient matrix"
        )

    if a.shape[0] <= _KRONECKER_MAX_ORDER:
        x = _lyapunov_kronecker(a, q)
    else:
        # scipy solves a X + X aᵀ = q_rhs
        x = scipy.linalg.solve_continuous_lyapunov(a, -q)
    x = 0.5 * (x + x.T)

    residual = np.linalg.norm(x @ a.T + a @ x + q, "fro")
    scale = np.linalg.norm(a, "fro") * np.linalg.norm(x, "fro") + np.linalg.norm(q, "fro")
    if residual > rtol * (1.0 + scale):
        raise NumericalError(
            f"Lyapunov residual {residual:.3e} exceeds tolerance at scale {scale:.3e}"
        )
    return x


# ---------------------------------------------------------------------------
# Algebraic Riccati equation (bounded-real type)
# ---------------------------------------------------------------------------

def _imaginary_axis_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Return the eigenvalues of ``m`` lying on the imaginary axis."""
    lam = np.linalg.eigvals(m)
    on_axis = np.abs(lam.real) <= IMAG_AXIS_RTOL * (1.0 + np.abs(lam))
    return lam[on_axis]


def solve_care_positive(a, r, q, tol: float = 1e-8, refine: bool = False):
    """Stabilizing positive-definite solution of ``P a + aᵀ P + P r P + q = 0``.

    This is the Riccati equation underlying the decoupled block tests:
    the quadratic term enters with a *plus* sign (bounded-real form), so
    the associated Hamiltonian is ``[[a, r], [−q, −aᵀ]]`` and the
    stabilizing solution — the one making ``a + rP`` Hurwitz — is read
    off its stable invariant subspace via an ordered real Schur
    decomposition.

    Parameters
    ----------
    a : array_like
        Square matrix.
    r : array_like
        Symmetric positive-semidefinite matrix (same order).
    q : array_like
        Symmetric positive-definite matrix (same order).
    tol : float, optional
        Relative residual acceptance threshold.
    refine : bool, optional
        When True, apply one defect-correction (Newton) step through the
        Lyapunov solver before judging the residual.

    Returns
    -------
    numpy.ndarray or None
        The symmetric positive-definite stabilizing solution, or ``None``
        when no such solution exists — detected either through
        imaginary-axis Hamiltonian eigenvalues or through an indefinite
        subspace solution.  ``None`` is an analysis outcome (the stability
        test relying on the equation fails), not an error.

    Raises
    ------
    NumericalError
        If the invariant subspace is too ill-conditioned to extract or
        the residual remains above tolerance.
    """
    a = as_square_matrix(a, "a")
    r = as_symmetric_matrix(r, "r")
    q = as_symmetric_matrix(q, "q")
    n = a.shape[0]
    if r.shape != a.shape or q.shape != a.shape:
        raise ValueError("a, r, q must all have the same square shape")

    hamiltonian = np.block([[a, r], [-q, -a.T]])
    if _imaginary_axis_eigenvalues(hamiltonian).size:
        return None

    try:
        _, z, sdim = scipy.linalg.schur(hamiltonian, output="real", sort="lhp")
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"Schur decomposition failed: {exc}") from exc
    if sdim != n:
        # A Hamiltonian spectrum is symmetric about the imaginary axis, so
        # after the axis test exactly n eigenvalues must sort stable; any
        # other count signals an eigenvalue decision too close to call.
        return None

    u1 = z[:n, :n]
    u2 = z[n:, :n]
    # P = U2 U1^{-1}.  A numerically singular U1 means the stable subspace
    # is not the graph of any finite symmetric solution (e.g. an unstable
    # "a" with a vanishing quadratic term): no stabilizing solution exists.
    if np.linalg.cond(u1) > 1e13:
        return None
    p = np.linalg.solve(u1.T, u2.T).T
    p = 0.5 * (p + p.T)

    min_eig = float(np.min(np.linalg.eigvalsh(p)))
    if min_eig <= 0.0:
        return None

    def _relative_residual(pm: np.ndarray) -> tuple[float, np.ndarray]:
        res = pm @ a + a.T @ pm + pm @ r @ pm + q
        norm_p = np.linalg.norm(pm, "fro")
        scale = (
            2.0 * np.linalg.norm(a, "fro") * norm_p
            + np.linalg.norm(r, "fro") * norm_p**2
            + np.linalg.norm(q, "fro")
        )
        return float(np.linalg.norm(res, "fro") / (1.0 + scale)), res

    rel, res = _relative_residual(p)
    if refine and rel > tol:
        closed_loop = a + r @ p
        try:
            delta = solve_lyapunov(closed_loop.T, res)
        except (UnstableMatrixError, NumericalError):
            delta = None
        if delta is not None:
            candidate = 0.5 * (p + delta + (p + delta).T)
            cand_rel, _ = _relative_residual(candidate)
            if cand_rel < rel and np.min(np.linalg.eigvalsh(candidate)) > 0.0:
                p, rel = candidate, cand_rel
    if rel > tol:
        raise NumericalError(
            f"Riccati residual {rel:.3e} above tolerance {tol:.1e}"
        )
    return p


# ---------------------------------------------------------------------------
# H-infinity norm of a resolvent
# ---------------------------------------------------------------------------

def _resolvent_norm_at(a: np.ndarray, omega: float) -> float:
    """‖(iωI − a)⁻¹‖₂ evaluated through one complex SVD (no inversion)."""
    n = a.shape[0]
    shifted = 1j * omega * np.eye(n) - a
    smin = np.linalg.svd(shifted, compute_uv=False)[-1]
    return float(1.0 / smin)


def _has_imaginary_axis_crossing(a: np.ndarray, gamma: float) -> tuple[bool, float]:
    """Decide whether γ ≤ ‖(sI − a)⁻¹‖∞ via the Hamiltonian test.

    The resolvent attains the level γ at some frequency iff the
    Hamiltonian-structured matrix ``[[a, I/γ²], [−I, −aᵀ]]`` has an
    eigenvalue on the imaginary axis.  Returns the decision together
    with a representative crossing frequency (0.0 when there is none).
    """
    n = a.shape[0]
    ham = np.block(
        [[a, np.eye(n) / gamma**2], [-np.eye(n), -a.T]]
    )
    on_axis = _imaginary_axis_eigenvalues(ham)
    if on_axis.size == 0:
        return False, 0.0
    return True, float(np.mean(np.abs(on_axis.imag)))


def hinf_norm_resolvent(a, tol: float = DEFAULT_HINF_TOL) -> HinfResult:
    """H∞ norm of the resolvent ``(sI − a)⁻¹`` by Hamiltonian bisection.

    For a Hurwitz ``a`` the norm is ``sup_ω ‖(iωI − a)⁻¹‖₂``.  The
    bracket is seeded from ``‖a⁻¹‖₂`` (the value at ω = 0) together with
    a log-spaced frequency grid, then the upper end is certified by the
    Hamiltonian eigenvalue test and tightened by bisection until the
    relative width drops below ``tol``.  The returned ``norm`` is the
    certified upper end of the final bracket, so it never underestimates
    the true norm.

    For a non-Hurwitz ``a`` the norm is unbounded; the result carries the
    infinity flag and ``inverse_norm = 0.0``, the continuous extension
    used by the block comparison matrix.

    Parameters
    ----------
    a : array_like
        Square matrix.
    tol : float, optional
        Relative bracket width at termination (default 1e-8).

    Raises
    ------
    NumericalError
        If the iteration budget (200 Hamiltonian tests) is exhausted.
    """
    a = as_square_matrix(a)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_hurwitz(a):
        return HinfResult(
            norm=math.inf, inverse_norm=0.0, peak_frequency=0.0, iterations=0
        )

    # --- seed a lower bound from ω = 0 and a coarse log grid -------------
    norm_scale = max(float(np.linalg.norm(a, 2)), 1e-12)
    lo = float(np.linalg.norm(np.linalg.inv(a), 2))
    peak = 0.0
    # The peak frequency cannot exceed ‖a‖₂ (beyond it σ_min(iωI − a) ≥
    # ω − ‖a‖₂ grows), so the grid only needs to cover up to that scale.
    for omega in np.geomspace(1e-4 * norm_scale, 2.0 * norm_scale, 128):
        value = _resolvent_norm_at(a, float(omega))
        if value > lo:
            lo, peak = value, float(omega)

    iterations = 0

    # --- certify an upper bound by doubling ------------------------------
    hi = lo * (1.0 + 10.0 * tol)
    while True:
        iterations += 1
        if iterations > HINF_MAX_ITERATIONS:
            raise NumericalError("H-infinity iteration budget exhausted")
        crossing, _ = _has_imaginary_axis_crossing(a, hi)
        if not crossing:
            break
        lo = hi
        hi *= 2.0

    # --- bisect -----------------------------------------------------------
    while (hi - lo) / lo > tol:
        iterations += 1
        if iterations > HINF_MAX_ITERATIONS:
            raise NumericalError("H-infinity iteration budget exhausted")
        mid = 0.5 * (lo + hi)
        crossing, freq = _has_imaginary_axis_crossing(a, mid)
        if crossing:
            lo = mid
            peak = freq
        else:
            hi = mid

    return HinfResult(
        norm=hi,
        inverse_norm=1.0 / hi,
        peak_frequency=peak,
        iterations=iterations,
    )
