"""A small gallery of built-in test systems.

Fixed matrices used throughout the documentation and test suite, plus
deterministic generators for structured instances (block tridiagonal,
border block diagonal).  The generators construct diagonal blocks whose
symmetric part is uniformly negative definite — that bounds the
resolvent H∞ norm a priori, so couplings can be scaled to make the
block comparison matrix strictly diagonally dominant by construction.
"""

from __future__ import annotations

import numpy as np

from .partition import PartitionedMatrix, make_partitioned

__all__ = [
    "MIRRORED_B",
    "MIRRORED_Q1",
    "COUPLED_PAIR_A",
    "COUPLED_PAIR_B",
    "COUPLED_PAIR_C",
    "TRIANGULAR_DEMO",
    "TRIANGULAR_DEMO_PARTITION",
    "mirrored_pair",
    "block_tridiagonal_system",
    "border_block_diagonal_system",
    "named_system",
]

#: Hurwitz, Metzler 2×2 block used by the mirrored-pair construction.
MIRRORED_B = np.array([[-8.0, 8.0], [5.0, -8.0]])

#: A block-diagonal Lyapunov candidate for the mirrored pair.
MIRRORED_Q1 = np.array([[7.0, 7.0], [7.0, 11.0]])

#: Three 4×4 matrices with the {2, 2} partition whose decoupled-test
#: outcomes differ: ``coupled-b`` is certified only by the binary gain
#: rule, ``coupled-c`` by the comparison/scaled routes, and
#: ``coupled-a`` — which is not even Hurwitz — by none, making it the
#: bundled negative case.
COUPLED_PAIR_A = np.array(
    [
        [-67.0, -30.0, 2.0, 8.0],
        [20.0, -27.0, 2.0, 5.0],
        [14.0, -10.0, -57.0, 40.0],
        [-3.0, 10.0, 50.0, -27.0],
    ]
)

COUPLED_PAIR_B = np.array(
    [
        [-30.0, 30.0, 0.0, 2.0],
        [50.0, -61.0, -6.0, -8.0],
        [3.0, -10.0, -53.0, -40.0],
        [13.0, 13.0, 10.0, -73.0],
    ]
)

COUPLED_PAIR_C = np.array(
    [
        [-60.0, 30.0, 6.0, 6.0],
        [20.0, -20.0, 0.0, 7.0],
        [7.0, 2.0, -90.0, 20.0],
        [7.0, -5.0, 0.0, -20.0],
    ]
)

#: 6×6 block lower-triangular matrix, naturally partitioned {2, 3, 1}.
TRIANGULAR_DEMO = np.array(
    [
        [-6.0, 4.0, 0.0, 0.0, 0.0, 0.0],
        [8.0, -7.0, 0.0, 0.0, 0.0, 0.0],
        [4.0, 6.0, -1.0, -2.0, 4.0, 0.0],
        [7.0, -2.0, 3.0, -1.0, 6.0, 0.0],
        [1.0, 2.0, 1.0, 0.0, -7.0, 0.0],
        [-1.0, 7.0, 4.0, 6.0, -5.0, -2.0],
    ]
)

TRIANGULAR_DEMO_PARTITION = [2, 3, 1]


def mirrored_pair(delta: float, b=None) -> PartitionedMatrix:
    """The mirrored two-block system ``[[B, δI], [δI, B]]``, partition {k, k}.

    With the default ``B`` this is the standard example showing that a
    Hurwitz block comparison matrix does not survive congruence with
    every block-diagonal Lyapunov candidate once δ grows past a
    threshold.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    base = MIRRORED_B if b is None else np.asarray(b, dtype=float)
    k = base.shape[0]
    full = np.block([[base, delta * np.eye(k)], [delta * np.eye(k), base]])
    return make_partitioned(full, [k, k])


def _damped_block(rng: np.random.Generator, k: int, damping: float) -> np.ndarray:
    """Random k×k block whose symmetric part is ⪯ −damping·I.

    That bound makes the resolvent H∞ norm at most 1/damping, i.e. the
    block comparison diagonal entry is at most −damping.
    """
    g = rng.standard_normal((k, k)) / np.sqrt(k)
    shift = float(np.max(np.linalg.eigvalsh(0.5 * (g + g.T))))
    return g - (shift + damping) * np.eye(k)


def _scaled_coupling(rng, rows: int, cols: int, target_norm: float) -> np.ndarray:
    g = rng.standard_normal((rows, cols))
    norm = np.linalg.norm(g, 2)
    return g * (target_norm / norm) if norm > 0 else g


def block_tridiagonal_system(
    n_blocks: int,
    block_size: int,
    damping: float = 1.0,
    coupling: float = 0.2,
    seed: int = 0,
) -> PartitionedMatrix:
    """Chain-coupled system with tridiagonal block structure.

    Every diagonal block has its symmetric part ⪯ −damping·I and each
    coupling block has spectral norm ``coupling · damping / 2``; with at
    most two neighbours per block the comparison matrix is strictly
    diagonally dominant whenever ``coupling < 1``, so the scaling-based
    certification route succeeds by construction.
    """
    if n_blocks < 1 or block_size < 1:
        raise ValueError("n_blocks and block_size must be positive")
    if not 0 <= coupling < 1:
        raise ValueError("coupling must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    k, n = block_size, n_blocks
    full = np.zeros((n * k, n * k))
    target = coupling * damping / 2.0
    for i in range(n):
        full[i * k:(i + 1) * k, i * k:(i + 1) * k] = _damped_block(rng, k, damping)
        if i + 1 < n:
            full[i * k:(i + 1) * k, (i + 1) * k:(i + 2) * k] = _scaled_coupling(
                rng, k, k, target
            )
            full[(i + 1) * k:(i + 2) * k, i * k:(i + 1) * k] = _scaled_coupling(
                rng, k, k, target
            )
    return make_partitioned(full, [k] * n)


def border_block_diagonal_system(
    sizes,
    damping: float = 1.0,
    coupling: float = 0.2,
    seed: int = 0,
) -> PartitionedMatrix:
    """System whose couplings live only in the first block row and column.

    Coupling norms are scaled by the number of blocks so that the block
    comparison matrix stays strictly diagonally dominant.
    """
    sizes = [int(k) for k in sizes]
    if len(sizes) < 2:
        raise ValueError("need at least two blocks")
    if not 0 <= coupling < 1:
        raise ValueError("coupling must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    total = int(offsets[-1])
    full = np.zeros((total, total))
    n = len(sizes)
    target = coupling * damping / (2.0 * (n - 1))
    for i in range(n):
        sl = slice(offsets[i], offsets[i + 1])
        full[sl, sl] = _damped_block(rng, sizes[i], damping)
        if i > 0:
            s0 = slice(offsets[0], offsets[1])
            full[s0, sl] = _scaled_coupling(rng, sizes[0], sizes[i], target)
            full[sl, s0] = _scaled_coupling(rng, sizes[i], sizes[0], target)
    return make_partitioned(full, sizes)


def named_system(name: str) -> PartitionedMatrix:
    """Look up a bundled demonstration system by name."""
    table = {
        "coupled-a": (COUPLED_PAIR_A, [2, 2]),
        "coupled-b": (COUPLED_PAIR_B, [2, 2]),
        "coupled-c": (COUPLED_PAIR_C, [2, 2]),
        "triangular": (TRIANGULAR_DEMO, TRIANGULAR_DEMO_PARTITION),
    }
    if name not in table:
        raise KeyError(
            f"unknown system {name!r}; available: {sorted(table)}"
        )
    matrix, sizes = table[name]
    return make_partitioned(matrix, sizes)
