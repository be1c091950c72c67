"""Block partitions and partitioned views of square matrices.

A partition α = {k₁, …, kₙ} splits an N×N matrix (N = Σkᵢ) into an n×n
grid of blocks A_ij of shape kᵢ×kⱼ.  Block indices are 1-based in every
public interface; blocks are always returned as copies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_square_matrix, check_partition_sizes

__all__ = [
    "BlockPartition",
    "PartitionedMatrix",
    "make_partitioned",
    "block",
    "assemble_block_diagonal",
]


@dataclass(frozen=True)
class BlockPartition:
    """An ordered list of positive block sizes."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(check_partition_sizes(self.sizes)))

    @property
    def n_blocks(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Start offset of each block row/column, plus the final total."""
        out = [0]
        for k in self.sizes:
            out.append(out[-1] + k)
        return tuple(out)

    def is_trivial(self) -> bool:
        """True when every block has size one."""
        return all(k == 1 for k in self.sizes)


@dataclass(frozen=True)
class PartitionedMatrix:
    """A square matrix together with a partition of matching order."""

    matrix: np.ndarray = field(repr=False)
    partition: BlockPartition

    def __post_init__(self):
        arr = as_square_matrix(self.matrix)
        if arr.shape[0] != self.partition.total:
            raise ValueError(
                f"partition sizes sum to {self.partition.total} but the "
                f"matrix has order {arr.shape[0]}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)

    @property
    def n_blocks(self) -> int:
        return self.partition.n_blocks

    @property
    def order(self) -> int:
        return self.partition.total

    def block(self, i: int, j: int) -> np.ndarray:
        """Return a copy of block (i, j); indices are 1-based."""
        n = self.n_blocks
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexError(
                f"block index ({i}, {j}) out of range for {n}x{n} block grid"
            )
        off = self.partition.offsets
        return self.matrix[off[i - 1]:off[i], off[j - 1]:off[j]].copy()

    def diagonal_blocks(self) -> list[np.ndarray]:
        return [self.block(i, i) for i in range(1, self.n_blocks + 1)]


def make_partitioned(a, sizes) -> PartitionedMatrix:
    """View the square matrix *a* through the partition given by *sizes*.

    Raises ``ValueError`` when *a* is not square or the sizes do not sum
    to its order.
    """
    arr = as_square_matrix(a)
    part = BlockPartition(tuple(check_partition_sizes(sizes, total=arr.shape[0])))
    return PartitionedMatrix(arr, part)


def block(p: PartitionedMatrix, i: int, j: int) -> np.ndarray:
    """Free-function alias for :meth:`PartitionedMatrix.block`."""
    return p.block(i, j)


def assemble_block_diagonal(blocks) -> np.ndarray:
    """Assemble square blocks into a block-diagonal matrix.

    The partition is read off the block orders; zeros fill every
    off-diagonal position.
    """
    mats = [as_square_matrix(b, f"blocks[{k}]") for k, b in enumerate(blocks)]
    if not mats:
        raise ValueError("need at least one block")
    total = sum(m.shape[0] for m in mats)
    out = np.zeros((total, total))
    pos = 0
    for m in mats:
        k = m.shape[0]
        out[pos:pos + k, pos:pos + k] = m
        pos += k
    return out
