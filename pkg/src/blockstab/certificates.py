"""Construction and verification of block-diagonal Lyapunov certificates.

The certification problem: given an α-partitioned matrix A, find
block-diagonal P = diag(P₁, …, Pₙ) ≻ 0 with PA + AᵀP ≺ 0, touching only
block-sized quantities along the way.  Three ingredients cooperate here:

* decoupled Riccati tests — one bounded-real Riccati equation per
  diagonal block, coupled only through scalar gains γ_ij (strategies
  ``a``, ``b``, ``c`` differ in how the gains are chosen);
* a constructive witness path that turns a Hurwitz block comparison
  matrix (plus its scaling vectors) into a full set of LMI witnesses
  (P_i, W_ij, V_ij) with quantified slacks;
* independent verifiers that re-check, from raw inputs, the witness
  LMIs, the scalar specialization, the border-block-diagonal variant,
  and the final assembled Lyapunov inequality.

Nothing in this module trusts upstream computations.  Certification
re-verifies everything it emits from per-block quantities only — the
margin a certificate carries is a proven lower bound obtained without
ever forming an eigendecomposition of the full-order matrix, so the
cost of certifying scales with the block sizes, not the system order.
:func:`assemble_and_verify` performs the direct assembled check and
serves as the independent audit path (it backs the ``verify`` command).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ._validation import (
    as_positive_vector,
    as_square_matrix,
    symmetrize,
)
from .comparison import (
    COMPARISON_HURWITZ_MARGIN,
    ComparisonMatrix,
    ScalingPair,
    block_comparison,
    metzler_scalings,
    scalar_comparison,
)
from .errors import NumericalError, UnstableMatrixError
from .linalg import (
    DEFAULT_HINF_TOL,
    is_hurwitz,
    max_singular_value,
    min_singular_value,
    solve_care_positive,
    solve_lyapunov,
)
from .partition import PartitionedMatrix, assemble_block_diagonal, make_partitioned

__all__ = [
    "GammaMatrix",
    "Certificate",
    "WitnessSet",
    "WitnessVerification",
    "RouteResult",
    "TestReport",
    "CounterexampleConditions",
    "gamma_for_test",
    "decoupled_riccati_test",
    "prop4_construct",
    "verify_general_witnesses",
    "assemble_and_verify",
    "certify",
    "scalar_witnesses",
    "verify_scalar_conditions",
    "verify_bbd_witnesses",
    "counterexample_conditions",
]

#: Relative floor used to decide strict LMI inequalities in floating point:
#: a "≻ 0" constraint passes when its smallest eigenvalue exceeds
#: ``max(margin, STRICT_FLOOR · (1 + ‖operand‖))``.
STRICT_FLOOR = 1e-9

#: Default ε_i = EPSILON_SCALE · (1 + Σ_{j≠i} γ_ji): a relative shift that
#: keeps the Riccati constant terms uniformly conditioned across scales.
EPSILON_SCALE = 1e-6


def _strict_floor(scale: float, margin: float = 0.0) -> float:
    return max(margin, STRICT_FLOOR * (1.0 + scale))


def _psd_tol(scale: float) -> float:
    # Rounding allowance for nonstrict (⪯ / ⪰) checks.
    return STRICT_FLOOR * (1.0 + scale)


# ---------------------------------------------------------------------------
# Data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaMatrix:
    """Nonnegative coupling gains γ_ij together with the rule that made them.

    For the per-test strategies the diagonal is stored as zero (the
    diagonal only enters downstream through column sums); the witness-
    construction strategy also carries diagonal entries γ_ii.
    """

    gamma: np.ndarray = field(repr=False)
    strategy: str

    def __post_init__(self):
        arr = as_square_matrix(self.gamma, "gamma")
        if np.any(arr < 0.0):
            raise ValueError("gamma entries must be nonnegative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "gamma", arr)

    def column_sum(self, i: int) -> float:
        """Σ_{j≠i} γ_ji (1-based i)."""
        col = self.gamma[:, i - 1].copy()
        col[i - 1] = 0.0
        return float(np.sum(col))


@dataclass(frozen=True)
class Certificate:
    """A verified block-diagonal Lyapunov certificate.

    ``lyapunov_margin`` is a certified lower bound on
    ``−λ_max((PA + AᵀP + (PA + AᵀP)ᵀ)/2)``; it is strictly positive by
    construction — a Certificate object only exists for verified data.
    :func:`assemble_and_verify` measures the bound exactly from the
    assembled matrix; the certification routes bound it from per-block
    quantities instead, so certifying never touches a full-order
    eigenvalue problem.
    """

    blocks: tuple
    partition: tuple[int, ...]
    strategy: str
    epsilon: tuple[float, ...]
    lyapunov_margin: float
    riccati_residuals: tuple[float, ...]

    def assemble(self) -> np.ndarray:
        return assemble_block_diagonal(list(self.blocks))


@dataclass(frozen=True)
class WitnessSet:
    """Witnesses (P_i, W_ij, V_ij) for the block LMI system.

    ``W[i][j]`` is k_i×k_i and ``V[i][j]`` is k_j×k_j (0-based grids);
    positions of structurally zero coupling blocks hold ``None``.
    ``slack`` maps each constraint family to its measured minimum
    eigenvalue margins; ``chain`` records, per block row, the triple
    (σ̄(Σ A_ij A_ijᵀ/γ_ij), Σ σ̄(A_ij) d_j/e_i, h_i d_i/e_i) whose strict
    ordering drives solvability of the witness Riccati equations.
    """

    P: tuple
    W: tuple
    V: tuple
    slack: dict
    gamma: GammaMatrix
    scalings: ScalingPair
    chain: tuple


@dataclass(frozen=True)
class WitnessVerification:
    """Boolean verdict plus per-constraint minimum-eigenvalue slacks."""

    ok: bool
    slacks: dict

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class RouteResult:
    """Outcome of one certification route."""

    status: str  # "pass" | "fail" | "error" | "skipped"
    reason: str
    certificate: Certificate | None
    elapsed: float

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "elapsed_seconds": self.elapsed,
            "certified": self.certificate is not None,
        }


@dataclass(frozen=True)
class TestReport:
    """Aggregated outcome of the certification routes.

    ``routes`` maps route names (``comparison``, ``a``, ``b``, ``c``) to
    :class:`RouteResult`.  A route that passes always embeds a
    certificate that was re-verified from raw inputs.
    """

    routes: dict

    ROUTE_ORDER = ("comparison", "c", "a", "b")

    @property
    def certified(self) -> bool:
        return any(r.status == "pass" for r in self.routes.values())

    @property
    def certificate(self) -> Certificate | None:
        for name in self.ROUTE_ORDER:
            route = self.routes.get(name)
            if route is not None and route.status == "pass":
                return route.certificate
        return None

    @property
    def strategy_used(self) -> str | None:
        for name in self.ROUTE_ORDER:
            route = self.routes.get(name)
            if route is not None and route.status == "pass":
                return "prop4" if name == "comparison" else name
        return None

    def outcome(self, name: str) -> str:
        route = self.routes.get(name)
        return route.status if route is not None else "skipped"


@dataclass(frozen=True)
class CounterexampleConditions:
    """The three analytic conditions under which a Hurwitz block comparison
    matrix provably admits no compatible block-diagonal Lyapunov scaling
    of the mirrored two-block system [[B, δI], [δI, B]]."""

    cond_a: bool
    cond_b: bool
    cond_c: bool
    sigma_min_b: float
    sigma_max_x0: float
    delta: float

    @property
    def all_hold(self) -> bool:
        return self.cond_a and self.cond_b and self.cond_c


# ---------------------------------------------------------------------------
# Gamma strategies and the decoupled Riccati test
# ---------------------------------------------------------------------------

def _coupling_norms(p: PartitionedMatrix) -> np.ndarray:
    """σ̄(A_ij) for every off-diagonal block; exact zeros for zero blocks."""
    n = p.n_blocks
    out = np.zeros((n, n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            blk = p.block(i, j)
            if np.any(blk):
                out[i - 1, j - 1] = max_singular_value(blk)
    return out


def gamma_for_test(
    p: PartitionedMatrix, which: str, scalings: ScalingPair | None = None
) -> GammaMatrix:
    """Coupling gains for one of the decoupled stability tests.

    * ``a``: γ_ij = σ̄(A_ij) — the raw coupling gains;
    * ``b``: γ_ij = 1 wherever the coupling block is nonzero — binary
      structure information only;
    * ``c``: γ_ij = σ̄(A_ij) · e_i / d_j — gains rebalanced by the
      scaling vectors of the Hurwitz block comparison matrix (pass the
      pair obtained from :func:`metzler_scalings`).

    Structurally zero blocks get γ_ij = 0 under every rule; diagonal
    entries are stored as zero.
    """
    if which not in ("a", "b", "c"):
        raise ValueError(f"unknown test {which!r}: expected 'a', 'b' or 'c'")
    sigma = _coupling_norms(p)
    if which == "a":
        gamma = sigma.copy()
    elif which == "b":
        gamma = (sigma > 0.0).astype(float)
    else:
        if scalings is None:
            raise ValueError("test 'c' requires the scaling pair (d, e)")
        n = p.n_blocks
        d = as_positive_vector(scalings.d, n, "d")
        e = as_positive_vector(scalings.e, n, "e")
        gamma = sigma * np.outer(e, 1.0 / d)
    return GammaMatrix(gamma, f"test-{which}")


def default_epsilon(g: GammaMatrix) -> list[float]:
    """ε_i = 1e-6 · (1 + Σ_{j≠i} γ_ji) for every block row."""
    n = g.gamma.shape[0]
    return [EPSILON_SCALE * (1.0 + g.column_sum(i)) for i in range(1, n + 1)]


def _riccati_data(p: PartitionedMatrix, g: GammaMatrix, eps: list[float]):
    """Per-block (A_ii, R_i, c_i) for the decoupled Riccati equations."""
    n = p.n_blocks
    gamma = g.gamma
    for i in range(1, n + 1):
        aii = p.block(i, i)
        quad = np.zeros_like(aii)
        for j in range(1, n + 1):
            if j == i:
                continue
            blk = p.block(i, j)
            if not np.any(blk):
                continue
            gij = gamma[i - 1, j - 1]
            if gij <= 0.0:
                raise ValueError(
                    f"gamma[{i},{j}] is zero but coupling block ({i},{j}) is not"
                )
            quad += blk @ blk.T / gij
        constant = eps[i - 1] + g.column_sum(i)
        yield aii, symmetrize(quad), constant


def decoupled_riccati_test(
    p: PartitionedMatrix,
    g: GammaMatrix,
    eps=None,
    tol: float = 1e-8,
):
    """Run the per-block Riccati equations for the given gains.

    For every block row i, solves
    ``P_i A_ii + A_iiᵀ P_i + P_i (Σ_{j≠i} A_ij A_ijᵀ / γ_ij) P_i +
    (ε_i + Σ_{j≠i} γ_ji) I = 0``
    for a stabilizing positive-definite P_i.  The equations are fully
    decoupled — each depends only on block row/column i of the matrix
    and on scalar gains.

    Returns the list of blocks when *every* equation is solvable, or
    ``None`` as soon as one is not (the test is then inconclusive: this
    never disproves stability).
    """
    if eps is None:
        eps = default_epsilon(g)
    else:
        eps = [float(x) for x in (eps if np.ndim(eps) else [eps] * p.n_blocks)]
        if len(eps) != p.n_blocks:
            raise ValueError(f"need {p.n_blocks} epsilon values, got {len(eps)}")
        if any(x <= 0.0 for x in eps):
            raise ValueError("epsilon values must be positive")

    blocks = []
    for aii, quad, constant in _riccati_data(p, g, eps):
        solution = solve_care_positive(
            aii, quad, constant * np.eye(aii.shape[0]), tol=tol
        )
        if solution is None:
            return None
        blocks.append(solution)
    return blocks


def riccati_residuals(
    p: PartitionedMatrix, g: GammaMatrix, eps, blocks
) -> list[float]:
    """Relative residuals of the decoupled Riccati equations at *blocks*."""
    out = []
    for (aii, quad, constant), pi in zip(_riccati_data(p, g, eps), blocks):
        res = pi @ aii + aii.T @ pi + pi @ quad @ pi + constant * np.eye(aii.shape[0])
        scale = 1.0 + np.linalg.norm(pi @ aii, "fro") + constant
        out.append(float(np.linalg.norm(res, "fro") / scale))
    return out


# ---------------------------------------------------------------------------
# Witness construction from a Hurwitz comparison matrix
# ---------------------------------------------------------------------------

def _comparison_and_scalings(p, comp, scalings, tol):
    if comp is None:
        comp = block_comparison(p, tol=tol)
    if not comp.is_hurwitz():
        raise ValueError("block comparison matrix is not Hurwitz")
    if scalings is None:
        scalings = metzler_scalings(comp.matrix)
        if scalings is None:  # pragma: no cover - guarded by is_hurwitz above
            raise ValueError("block comparison matrix is not Hurwitz")
    return comp, scalings


def prop4_construct(
    p: PartitionedMatrix,
    scalings: ScalingPair | None = None,
    tol: float = DEFAULT_HINF_TOL,
    comparison: ComparisonMatrix | None = None,
) -> WitnessSet:
    """Build a verified witness set from a Hurwitz block comparison matrix.

    The gains are γ_ii = h_i e_i/d_i and γ_ij = σ̄(A_ij) e_i/d_j, where
    h_i is the inverse resolvent H∞ norm of the i-th diagonal block and
    (d, e) are the scaling vectors of the comparison matrix.  Each P_i
    solves a bounded-real Riccati equation whose constant term is shifted
    slightly above γ_ii — the shift is budgeted from the measured row and
    column dominance slacks, which keeps the equation solvable while
    making every strict LMI hold with quantified margin.  The witnesses

    * W_ij = P_i A_ij A_ijᵀ P_i / γ_ij,  V_ij = γ_ij I   (i ≠ j),
    * W_ii = P_i (Σ_j A_ij A_ijᵀ/γ_ij) P_i + (s_i/2) I,
    * V_ii = (γ_ii − s_i/2) I,

    with s_i the column slack γ_ii − Σ_j γ_ji, then satisfy the full LMI
    family by construction; their measured slacks are stored on the
    result.  The inequality chain
    σ̄(Σ A_ij A_ijᵀ/γ_ij) ≤ Σ σ̄(A_ij) d_j/e_i < h_i d_i/e_i
    is asserted numerically for every block row.

    Raises
    ------
    ValueError
        If the comparison matrix is not Hurwitz (no witness construction
        exists on this route).
    NumericalError
        If a witness Riccati equation unexpectedly fails — with valid
        preconditions this is a numerical-tolerance incident.
    """
    comp, scalings = _comparison_and_scalings(p, comparison, scalings, tol)
    n = p.n_blocks
    d, e = scalings.d, scalings.e
    h = np.array([-comp.matrix[i, i] for i in range(n)])
    sigma = np.asarray(comp.offdiag_provenance)

    gamma = sigma * np.outer(e, 1.0 / d)
    np.fill_diagonal(gamma, h * e / d)

    row_slack = h * d - sigma @ d  # sdd condition, row form
    col_slack = np.diag(gamma) - np.array(
        [np.sum(gamma[:, i]) - gamma[i, i] for i in range(n)]
    )
    if np.any(row_slack <= 0.0) or np.any(col_slack <= 0.0):
        raise ValueError(
            "scaling vectors do not certify dominance of the comparison matrix"
        )

    chain = []
    P = []
    for i in range(1, n + 1):
        aii = p.block(i, i)
        ki = aii.shape[0]
        quad = np.zeros((ki, ki))
        for j in range(1, n + 1):
            if j == i:
                continue
            blk = p.block(i, j)
            if np.any(blk):
                quad += blk @ blk.T / gamma[i - 1, j - 1]
        quad = symmetrize(quad)

        lhs = max_singular_value(quad) if np.any(quad) else 0.0
        mid = float(sigma[i - 1] @ d / e[i - 1])
        rhs = float(h[i - 1] * d[i - 1] / e[i - 1])
        chain.append((lhs, mid, rhs))
        if lhs > mid * (1.0 + 1e-9) + 1e-15 or mid >= rhs:
            raise NumericalError(
                f"witness gain chain violated for block row {i}: "
                f"{lhs:.6e} <= {mid:.6e} < {rhs:.6e} expected"
            )

        gii = gamma[i - 1, i - 1]
        # Shift budget: stay solvable (row slack) while leaving room for
        # the strict diagonal dominance of the witnesses (column slack).
        shift = min(
            col_slack[i - 1] / 4.0,
            gii * row_slack[i - 1] / (2.0 * h[i - 1] * d[i - 1]),
        )
        pi = None
        for attempt_shift in (shift, shift / 2.0, shift / 4.0, 0.0):
            try:
                pi = solve_care_positive(
                    aii, quad, (gii + attempt_shift) * np.eye(ki)
                )
            except NumericalError:
                pi = None
            if pi is not None:
                break
        if pi is None:
            raise NumericalError(
                f"witness Riccati equation for block {i} failed despite a "
                "Hurwitz comparison matrix (numerical-tolerance incident)"
            )
        P.append(pi)

    W = [[None] * n for _ in range(n)]
    V = [[None] * n for _ in range(n)]
    for i in range(1, n + 1):
        ki = p.partition.sizes[i - 1]
        quad = np.zeros((ki, ki))
        for j in range(1, n + 1):
            if j == i:
                continue
            blk = p.block(i, j)
            if not np.any(blk):
                continue
            gij = gamma[i - 1, j - 1]
            wij = symmetrize(P[i - 1] @ blk @ blk.T @ P[i - 1] / gij)
            W[i - 1][j - 1] = wij
            V[i - 1][j - 1] = gij * np.eye(p.partition.sizes[j - 1])
            quad += blk @ blk.T / gij
        s_half = col_slack[i - 1] / 2.0
        W[i - 1][i - 1] = symmetrize(
            P[i - 1] @ quad @ P[i - 1]
        ) + s_half * np.eye(ki)
        V[i - 1][i - 1] = (gamma[i - 1, i - 1] - s_half) * np.eye(ki)

    witness = WitnessSet(
        P=tuple(P),
        W=tuple(tuple(row) for row in W),
        V=tuple(tuple(row) for row in V),
        slack={},
        gamma=GammaMatrix(gamma, "prop4"),
        scalings=scalings,
        chain=tuple(chain),
    )
    verification = verify_general_witnesses(p, witness)
    if not verification.ok:  # pragma: no cover - construction guarantees
        raise NumericalError("constructed witnesses failed re-verification")
    witness.slack.update(verification.slacks)
    return witness


def verify_general_witnesses(
    p: PartitionedMatrix, w: WitnessSet, margin: float = 0.0
) -> WitnessVerification:
    """Independently re-check the witness LMI family by eigenvalue bounds.

    Checks, for every block row i and coupling (i, j):

    * P_i ≻ 0;
    * P_i A_ii + A_iiᵀ P_i + V_ii + W_ii ⪯ 0;
    * [[W_ij, −P_i A_ij], [−A_ijᵀ P_i, V_ij]] ⪰ 0;
    * W_ii ≻ Σ_{j≠i} W_ij and V_ii ≻ Σ_{j≠i} V_ji (strict, with the
      given margin on top of a scale-aware floor).

    All operands are symmetrized before the eigenvalue computation.
    Returns the verdict together with the measured slacks (positive
    numbers mean the constraint holds with that much room).
    """
    n = p.n_blocks
    sizes = p.partition.sizes
    slacks = {"P": [], "lmi_diag": [], "lmi_coupling": {}, "dom_W": [], "dom_V": []}
    ok = True

    for i in range(1, n + 1):
        pi = as_square_matrix(w.P[i - 1], f"P[{i}]")
        if pi.shape[0] != sizes[i - 1]:
            raise ValueError(f"P[{i}] has order {pi.shape[0]}, expected {sizes[i-1]}")
        p_min = float(np.min(np.linalg.eigvalsh(symmetrize(pi))))
        slacks["P"].append(p_min)
        if p_min <= _strict_floor(np.linalg.norm(pi, 2), margin):
            ok = False

        aii = p.block(i, i)
        wii = w.W[i - 1][i - 1]
        vii = w.V[i - 1][i - 1]
        if wii is None or vii is None:
            raise ValueError(f"diagonal witnesses W[{i}][{i}], V[{i}][{i}] required")
        operand = symmetrize(pi @ aii + aii.T @ pi + vii + wii)
        lam_max = float(np.max(np.linalg.eigvalsh(operand)))
        slacks["lmi_diag"].append(-lam_max)
        if lam_max > _psd_tol(np.linalg.norm(operand, 2)):
            ok = False

        sum_w = np.zeros_like(wii)
        sum_v = np.zeros_like(vii)
        for j in range(1, n + 1):
            if j == i:
                continue
            wij = w.W[i - 1][j - 1]
            vji = w.V[j - 1][i - 1]
            blk = p.block(i, j)
            has_coupling = bool(np.any(blk))
            if wij is None:
                if has_coupling:
                    raise ValueError(
                        f"missing witness W[{i}][{j}] for nonzero coupling"
                    )
            else:
                sum_w += wij
                vij = w.V[i - 1][j - 1]
                if vij is None:
                    raise ValueError(f"missing witness V[{i}][{j}]")
                lmi = np.block([[wij, -pi @ blk], [-(pi @ blk).T, vij]])
                lam_min = float(np.min(np.linalg.eigvalsh(symmetrize(lmi))))
                slacks["lmi_coupling"][(i, j)] = lam_min
                if lam_min < -_psd_tol(np.linalg.norm(lmi, 2)):
                    ok = False
            if vji is not None:
                sum_v += vji

        dom_w = symmetrize(wii - sum_w)
        dom_v = symmetrize(vii - sum_v)
        w_slack = float(np.min(np.linalg.eigvalsh(dom_w)))
        v_slack = float(np.min(np.linalg.eigvalsh(dom_v)))
        slacks["dom_W"].append(w_slack)
        slacks["dom_V"].append(v_slack)
        if w_slack <= _strict_floor(np.linalg.norm(wii, 2), margin):
            ok = False
        if v_slack <= _strict_floor(np.linalg.norm(vii, 2), margin):
            ok = False

    return WitnessVerification(ok, slacks)


# ---------------------------------------------------------------------------
# Assembly, orchestration
# ---------------------------------------------------------------------------

def _riccati_margin_bound(p, g, eps, blocks) -> float:
    """Certified Lyapunov margin bound from the decoupled Riccati solutions.

    If every P_i satisfied its equation exactly, Young's inequality on
    the coupling terms gives ``PA + AᵀP ⪯ −diag(ε_i I)``; the actual
    residual matrices Res_i shift each block bound by at most
    λ_max(Res_i).  Hence ``min_i (ε_i − λ_max(Res_i))`` is a rigorous
    lower bound on the achieved margin, computed from block-sized
    matrices only.
    """
    bound = np.inf
    for (aii, quad, constant), pi, eps_i in zip(_riccati_data(p, g, eps), blocks, eps):
        res = symmetrize(
            pi @ aii + aii.T @ pi + pi @ quad @ pi + constant * np.eye(aii.shape[0])
        )
        bound = min(bound, eps_i - float(np.max(np.linalg.eigvalsh(res))))
    return float(bound)


def _witness_margin_bound(p: PartitionedMatrix, w: WitnessSet) -> float:
    """Certified Lyapunov margin bound from a witness set.

    Expanding the cross terms of ``x*(PA + AᵀP)x`` against the coupling
    LMIs bounds the quadratic form by
    ``Σ_i x_iᵀ (P_i A_ii + A_iiᵀ P_i + Σ_j W_ij + Σ_j V_ji) x_i`` plus a
    penalty for any coupling LMI that is only nonnegative up to round-off.
    The returned value is the smallest block-wise margin after penalties.
    """
    n = p.n_blocks
    deficiency = np.zeros((n, n))
    for i in range(1, n + 1):
        pi = w.P[i - 1]
        for j in range(1, n + 1):
            if j == i or w.W[i - 1][j - 1] is None:
                continue
            blk = p.block(i, j)
            lmi = symmetrize(
                np.block(
                    [
                        [w.W[i - 1][j - 1], -pi @ blk],
                        [-(pi @ blk).T, w.V[i - 1][j - 1]],
                    ]
                )
            )
            lam_min = float(np.min(np.linalg.eigvalsh(lmi)))
            deficiency[i - 1, j - 1] = max(0.0, -lam_min)

    bound = np.inf
    for i in range(1, n + 1):
        aii = p.block(i, i)
        pi = w.P[i - 1]
        operand = pi @ aii + aii.T @ pi
        for j in range(1, n + 1):
            if j == i:
                continue
            if w.W[i - 1][j - 1] is not None:
                operand = operand + w.W[i - 1][j - 1]
            if w.V[j - 1][i - 1] is not None:
                operand = operand + w.V[j - 1][i - 1]
        lam_max = float(np.max(np.linalg.eigvalsh(symmetrize(operand))))
        penalty = float(np.sum(deficiency[i - 1, :]) + np.sum(deficiency[:, i - 1]))
        bound = min(bound, -lam_max - penalty)
    return float(bound)


def assemble_and_verify(
    p: PartitionedMatrix,
    blocks,
    margin: float = 0.0,
    strategy: str = "custom",
    epsilon=(),
    residuals=(),
) -> Certificate | None:
    """Assemble P = diag(blocks) and verify the Lyapunov inequality.

    This is the final, independent gate: it trusts nothing from upstream
    construction.  Returns a :class:`Certificate` iff λ_min(P) > 0 and
    λ_max((PA + AᵀP) symmetrized) < −margin, else ``None``.
    """
    sizes = tuple(p.partition.sizes)
    mats = [as_square_matrix(b, f"blocks[{k}]") for k, b in enumerate(blocks)]
    if tuple(m.shape[0] for m in mats) != sizes:
        raise ValueError(
            f"block orders {tuple(m.shape[0] for m in mats)} do not match "
            f"partition {sizes}"
        )
    big_p = assemble_block_diagonal(mats)
    p_min = float(np.min(np.linalg.eigvalsh(symmetrize(big_p))))
    if p_min <= 0.0:
        return None
    s = symmetrize(big_p @ p.matrix + p.matrix.T @ big_p)
    lam_max = float(np.max(np.linalg.eigvalsh(s)))
    if lam_max >= -margin:
        return None
    return Certificate(
        blocks=tuple(m.copy() for m in mats),
        partition=sizes,
        strategy=strategy,
        epsilon=tuple(float(x) for x in epsilon),
        lyapunov_margin=-lam_max,
        riccati_residuals=tuple(float(x) for x in residuals),
    )


def _route_comparison(p, hinf_tol, margin):
    comp = block_comparison(p, tol=hinf_tol)
    if not comp.is_hurwitz():
        return None, "comparison matrix is not Hurwitz", None
    scalings = metzler_scalings(comp.matrix)
    witness = prop4_construct(p, scalings, tol=hinf_tol, comparison=comp)
    bound = _witness_margin_bound(p, witness)
    if bound <= margin:
        return None, "certified margin bound is below the requested margin", witness
    cert = Certificate(
        blocks=tuple(m.copy() for m in witness.P),
        partition=tuple(p.partition.sizes),
        strategy="prop4",
        epsilon=(),
        lyapunov_margin=bound,
        riccati_residuals=(),
    )
    return cert, "witness construction verified", witness


def _route_test(p, which, eps_override, hinf_tol, care_tol, margin):
    scalings = None
    if which == "c":
        comp = block_comparison(p, tol=hinf_tol)
        if not comp.is_hurwitz():
            return None, "comparison matrix is not Hurwitz (no scalings)"
        scalings = metzler_scalings(comp.matrix)
    g = gamma_for_test(p, which, scalings)
    eps = (
        [float(eps_override)] * p.n_blocks
        if eps_override is not None
        else default_epsilon(g)
    )
    blocks = decoupled_riccati_test(p, g, eps, tol=care_tol)
    if blocks is None:
        return None, "a block Riccati equation has no stabilizing PD solution"
    residuals = riccati_residuals(p, g, eps, blocks)
    bound = _riccati_margin_bound(p, g, eps, blocks)
    if bound <= margin:
        return None, "certified margin bound is below the requested margin"
    cert = Certificate(
        blocks=tuple(m.copy() for m in blocks),
        partition=tuple(p.partition.sizes),
        strategy=which,
        epsilon=tuple(eps),
        lyapunov_margin=bound,
        riccati_residuals=tuple(residuals),
    )
    return cert, "all block Riccati equations solvable"


def certify(
    p: PartitionedMatrix,
    strategy: str = "auto",
    *,
    epsilon=None,
    hinf_tol: float = DEFAULT_HINF_TOL,
    care_tol: float = 1e-8,
    margin: float = 0.0,
    run_all: bool = False,
) -> TestReport:
    """Attempt to certify α-diagonal stability of the partitioned matrix.

    ``strategy`` selects the route: ``'prop4'`` (comparison-matrix
    witness construction), one of the decoupled tests ``'a'``/``'b'``/
    ``'c'``, or ``'auto'`` which runs comparison → c → a → b and stops at
    the first success (or runs everything when ``run_all`` is true).
    The ordering is a heuristic: the comparison route is the cheapest
    diagnosis and already yields the scalings test c needs, while a and b
    are fallbacks that can each win on instances the others fail.

    A failed route is *inconclusive* — the report says "not certified",
    never "unstable".  Numerical incidents inside a route are captured as
    route errors and do not abort the remaining routes.
    """
    known = ("auto", "a", "b", "c", "prop4")
    if strategy not in known:
        raise ValueError(f"strategy must be one of {known}, got {strategy!r}")

    if strategy == "auto":
        route_names = ["comparison", "c", "a", "b"]
    elif strategy == "prop4":
        route_names = ["comparison"]
    else:
        route_names = [strategy]

    routes: dict[str, RouteResult] = {}
    for name in route_names:
        if (
            not run_all
            and any(r.status == "pass" for r in routes.values())
        ):
            routes[name] = RouteResult("skipped", "earlier route succeeded", None, 0.0)
            continue
        start = time.perf_counter()
        try:
            if name == "comparison":
                cert, reason, _ = _route_comparison(p, hinf_tol, margin)
            else:
                cert, reason = _route_test(
                    p, name, epsilon, hinf_tol, care_tol, margin
                )
            status = "pass" if cert is not None else "fail"
        except NumericalError as exc:
            cert, reason, status = None, f"numerical failure: {exc}", "error"
        elapsed = time.perf_counter() - start
        routes[name] = RouteResult(status, reason, cert, elapsed)

    return TestReport(routes)


# ---------------------------------------------------------------------------
# Scalar specialization
# ---------------------------------------------------------------------------

def scalar_witnesses(a):
    """Witness triple (w, v, p) for the entrywise (trivial-partition) case.

    When the scalar comparison matrix of ``a`` is Hurwitz, its scaling
    vectors (d, e) yield explicit witnesses

    ``w_ij = |a_ij| e_i d_j / d_i²``, ``v_ij = |a_ij| e_i / d_j``,
    ``p_i = e_i / d_i``,

    with the diagonal entries picked halfway between the dominance sums
    and their upper bounds, so every inequality of the scalar condition
    system holds strictly.  Returns ``None`` when the comparison matrix
    is not Hurwitz (no witnesses exist — the two are equivalent).
    """
    arr = as_square_matrix(a)
    comp = scalar_comparison(arr)
    if not comp.is_hurwitz():
        return None
    scalings = metzler_scalings(comp.matrix)
    if scalings is None:  # pragma: no cover - is_hurwitz uses same margin
        return None
    d, e = scalings.d, scalings.e
    n = arr.shape[0]
    absa = np.abs(arr)
    off = absa.copy()
    np.fill_diagonal(off, 0.0)

    w = off * np.outer(e, d) / (d**2)[:, None]
    v = off * np.outer(e, 1.0 / d)
    pvec = e / d
    neg_diag = -np.diag(arr) * pvec  # −a_ii e_i / d_i, strictly positive here
    np.fill_diagonal(w, (np.sum(w, axis=1) + neg_diag) / 2.0)
    np.fill_diagonal(v, (np.sum(v, axis=0) + neg_diag) / 2.0)

    if not verify_scalar_conditions(arr, w, v, pvec):  # pragma: no cover
        raise NumericalError("scalar witness construction failed verification")
    return w, v, pvec


def verify_scalar_conditions(a, w, v, p, margin: float = 0.0) -> bool:
    """Check the scalar witness inequalities.

    ``−a_ii ≥ (w_ii + v_ii)/(2 p_i)``, ``|a_ij| ≤ √(w_ij v_ij)/p_i`` for
    i ≠ j, and the strict dominances ``w_ii > Σ_{j≠i} w_ij``,
    ``v_ii > Σ_{j≠i} v_ji``.
    """
    arr = as_square_matrix(a)
    n = arr.shape[0]
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    pvec = as_positive_vector(p, n, "p")
    if w.shape != (n, n) or v.shape != (n, n):
        raise ValueError("w and v must be n-by-n arrays")
    if np.any(w < 0.0) or np.any(v < 0.0):
        return False

    tol = 1e-12
    diag_ok = np.all(
        -np.diag(arr) + tol * (1.0 + np.abs(np.diag(arr)))
        >= (np.diag(w) + np.diag(v)) / (2.0 * pvec)
    )
    off_ok = True
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            bound = np.sqrt(w[i, j] * v[i, j]) / pvec[i]
            if abs(arr[i, j]) > bound + tol * (1.0 + bound):
                off_ok = False
    off_w = w.copy()
    np.fill_diagonal(off_w, 0.0)
    off_v = v.copy()
    np.fill_diagonal(off_v, 0.0)
    floor_w = np.maximum(margin, tol * (1.0 + np.abs(np.diag(w))))
    floor_v = np.maximum(margin, tol * (1.0 + np.abs(np.diag(v))))
    dom_ok = np.all(np.diag(w) > np.sum(off_w, axis=1) + floor_w) and np.all(
        np.diag(v) > np.sum(off_v, axis=0) + floor_v
    )
    return bool(diag_ok and off_ok and dom_ok)


# ---------------------------------------------------------------------------
# Border-block-diagonal verification
# ---------------------------------------------------------------------------

def _check_bbd_structure(p: PartitionedMatrix):
    n = p.n_blocks
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j or i == 1 or j == 1:
                continue
            if np.any(p.block(i, j)):
                raise ValueError(
                    f"matrix is not border-block-diagonal: block ({i},{j}) nonzero"
                )


def verify_bbd_witnesses(
    p: PartitionedMatrix, q, y, z, margin: float = 0.0
) -> bool:
    """Verify the reduced LMIs for a border-block-diagonal matrix.

    The couplings live only in the first block row/column, so the full
    witness family collapses to, for each j ≥ 2 (with Y_j, Z_j the
    aggregated witnesses and Q_i the diagonal Lyapunov blocks):

    * ``Q₁ A₁₁ + A₁₁ᵀ Q₁ + Σ_{j>1} Y_j ≺ 0``,
    * ``Q_j A_jj + A_jjᵀ Q_j + Z_j ⪯ 0``,
    * ``[[Y_j, −Q₁ A₁ⱼ − A_j1ᵀ Q_j], [·ᵀ, Z_j]] ≻ 0``.

    Verification only — no solving.  ``y`` and ``z`` are sequences of
    length n−1 for j = 2…n; Y_j is k₁×k₁ and Z_j is k_j×k_j.
    """
    _check_bbd_structure(p)
    n = p.n_blocks
    sizes = p.partition.sizes
    if n < 2:
        raise ValueError("border-block-diagonal verification needs n ≥ 2 blocks")
    q = [as_square_matrix(m, f"q[{k}]") for k, m in enumerate(q)]
    y = [as_square_matrix(m, f"y[{k}]") for k, m in enumerate(y)]
    z = [as_square_matrix(m, f"z[{k}]") for k, m in enumerate(z)]
    if len(q) != n or len(y) != n - 1 or len(z) != n - 1:
        raise ValueError(
            f"expected {n} Q blocks and {n - 1} Y/Z witnesses, "
            f"got {len(q)}/{len(y)}/{len(z)}"
        )
    for k, m in enumerate(q):
        if m.shape[0] != sizes[k]:
            raise ValueError(f"q[{k}] order {m.shape[0]} != block size {sizes[k]}")
    for k, m in enumerate(y):
        if m.shape[0] != sizes[0]:
            raise ValueError(f"y[{k}] must have the first block's order {sizes[0]}")
    for k, m in enumerate(z):
        if m.shape[0] != sizes[k + 1]:
            raise ValueError(f"z[{k}] order {m.shape[0]} != block size {sizes[k+1]}")

    a11 = p.block(1, 1)
    first = symmetrize(q[0] @ a11 + a11.T @ q[0] + sum(y))
    if float(np.max(np.linalg.eigvalsh(first))) >= -_strict_floor(
        np.linalg.norm(first, 2), margin
    ):
        return False

    for j in range(2, n + 1):
        ajj = p.block(j, j)
        qj = q[j - 1]
        diag = symmetrize(qj @ ajj + ajj.T @ qj + z[j - 2])
        if float(np.max(np.linalg.eigvalsh(diag))) > _psd_tol(
            np.linalg.norm(diag, 2)
        ):
            return False

        a1j = p.block(1, j)
        aj1 = p.block(j, 1)
        corner = -q[0] @ a1j - aj1.T @ qj
        lmi = symmetrize(
            np.block([[y[j - 2], corner], [corner.T, z[j - 2]]])
        )
        if float(np.min(np.linalg.eigvalsh(lmi))) <= _strict_floor(
            np.linalg.norm(lmi, 2), margin
        ):
            return False
    return True


def bbd_witnesses_from_set(w: WitnessSet):
    """Aggregate a witness set into the border-block-diagonal form.

    Returns (q, y, z) with Q_i = P_i, Y_j = W₁ⱼ + Vⱼ₁ and
    Z_j = Wⱼ₁ + V₁ⱼ (j = 2…n) — the sums that arise when the coupling
    LMIs of the first block row and column are added pairwise.
    """
    n = len(w.P)
    if n < 2:
        raise ValueError("need at least two blocks")
    y, z = [], []
    k1 = w.P[0].shape[0]
    for j in range(2, n + 1):
        kj = w.P[j - 1].shape[0]
        w1j = w.W[0][j - 1]
        vj1 = w.V[j - 1][0]
        wj1 = w.W[j - 1][0]
        v1j = w.V[0][j - 1]
        y.append(
            (w1j if w1j is not None else np.zeros((k1, k1)))
            + (vj1 if vj1 is not None else np.zeros((k1, k1)))
        )
        z.append(
            (wj1 if wj1 is not None else np.zeros((kj, kj)))
            + (v1j if v1j is not None else np.zeros((kj, kj)))
        )
    return list(w.P), y, z


# ---------------------------------------------------------------------------
# Counterexample conditions for the mirrored two-block system
# ---------------------------------------------------------------------------

def counterexample_conditions(
    b, delta: float, tol: float = DEFAULT_HINF_TOL
) -> CounterexampleConditions:
    """Check the three conditions under which the mirrored system
    ``A = [[B, δI], [δI, B]]`` has a Hurwitz block comparison matrix yet
    provably admits no block-diagonal P making the comparison matrix of
    ``PA + AᵀP`` Hurwitz.

    The conditions are (a) σ_min(B) ≥ 1, (b) σ̄(X₀)·δ ≥ 1/2 where X₀
    solves ``X₀ Bᵀ + B X₀ + I = 0``, and (c) the block comparison matrix
    of A with the {k, k} partition is Hurwitz.

    Raises
    ------
    UnstableMatrixError
        If ``b`` is not Hurwitz (condition (b)'s Lyapunov solution then
        does not exist).
    """
    arr = as_square_matrix(b)
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if not is_hurwitz(arr):
        raise UnstableMatrixError("the diagonal block must be Hurwitz")
    k = arr.shape[0]
    smin = min_singular_value(arr)
    x0 = solve_lyapunov(arr, np.eye(k))
    smax_x0 = max_singular_value(x0)
    mirrored = np.block(
        [[arr, delta * np.eye(k)], [delta * np.eye(k), arr]]
    )
    comp = block_comparison(make_partitioned(mirrored, [k, k]), tol=tol)
    return CounterexampleConditions(
        cond_a=bool(smin >= 1.0),
        cond_b=bool(smax_x0 * delta >= 0.5),
        cond_c=comp.is_hurwitz(),
        sigma_min_b=smin,
        sigma_max_x0=smax_x0,
        delta=float(delta),
    )
