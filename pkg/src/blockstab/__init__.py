"""Stability certificates for block-partitioned linear systems.

The package decides whether x' = Ax admits a block-diagonal Lyapunov
solution compatible with a given partition of the state, using only
block-level quantities: H-infinity norms of diagonal-block resolvents,
spectral norms of coupling blocks, Metzler/comparison-matrix theory, and
decoupled Riccati equations.  A successful run returns per-block
solution factors together with the inequality margins they achieve, and
every certificate can be re-verified independently of how it was found.
"""

from .certificates import (
    Certificate,
    CounterexampleConditions,
    GammaMatrix,
    RouteResult,
    TestReport,
    WitnessSet,
    WitnessVerification,
    assemble_and_verify,
    bbd_witnesses_from_set,
    certify,
    counterexample_conditions,
    decoupled_riccati_test,
    default_epsilon,
    gamma_for_test,
    prop4_construct,
    riccati_residuals,
    scalar_witnesses,
    verify_bbd_witnesses,
    verify_general_witnesses,
    verify_scalar_conditions,
)
from .comparison import (
    ComparisonMatrix,
    ScalingPair,
    block_comparison,
    block_gershgorin_check,
    check_scaled_dominance,
    is_metzler,
    metzler_scalings,
    scalar_comparison,
)
from .errors import NumericalError, UnstableMatrixError
from .estimator import ComparisonTransform, StabilityCertifier
from .linalg import (
    HinfResult,
    eigenvalues,
    hinf_norm_resolvent,
    is_hurwitz,
    max_singular_value,
    min_singular_value,
    solve_care_positive,
    solve_lyapunov,
    spectral_abscissa,
)
from .partition import (
    BlockPartition,
    PartitionedMatrix,
    assemble_block_diagonal,
    block,
    make_partitioned,
)

__version__ = "0.1.0"

__all__ = [
    "BlockPartition",
    "Certificate",
    "ComparisonMatrix",
    "ComparisonTransform",
    "CounterexampleConditions",
    "GammaMatrix",
    "HinfResult",
    "NumericalError",
    "PartitionedMatrix",
    "RouteResult",
    "ScalingPair",
    "StabilityCertifier",
    "TestReport",
    "UnstableMatrixError",
    "WitnessSet",
    "WitnessVerification",
    "assemble_and_verify",
    "assemble_block_diagonal",
    "bbd_witnesses_from_set",
    "block",
    "block_comparison",
    "block_gershgorin_check",
    "certify",
    "check_scaled_dominance",
    "counterexample_conditions",
    "decoupled_riccati_test",
    "default_epsilon",
    "eigenvalues",
    "gamma_for_test",
    "hinf_norm_resolvent",
    "is_hurwitz",
    "is_metzler",
    "make_partitioned",
    "max_singular_value",
    "metzler_scalings",
    "min_singular_value",
    "prop4_construct",
    "riccati_residuals",
    "scalar_comparison",
    "scalar_witnesses",
    "solve_care_positive",
    "solve_lyapunov",
    "spectral_abscissa",
    "verify_bbd_witnesses",
    "verify_general_witnesses",
    "verify_scalar_conditions",
]
