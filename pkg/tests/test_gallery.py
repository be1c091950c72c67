import numpy as np
import pytest

from blockstab import block_comparison, certify, is_hurwitz, metzler_scalings
from blockstab.comparison import check_scaled_dominance
from blockstab.gallery import (
    MIRRORED_B,
    MIRRORED_Q1,
    TRIANGULAR_DEMO_PARTITION,
    block_tridiagonal_system,
    border_block_diagonal_system,
    mirrored_pair,
    named_system,
)


def test_mirrored_block_is_hurwitz_and_metzler():
    assert is_hurwitz(MIRRORED_B)
    assert np.all(MIRRORED_B - np.diag(np.diag(MIRRORED_B)) >= 0)
    assert np.min(np.linalg.eigvalsh(MIRRORED_Q1)) > 0


def test_mirrored_pair_layout():
    p = mirrored_pair(1.25)
    assert p.partition.sizes == (2, 2)
    np.testing.assert_array_equal(p.block(1, 1), MIRRORED_B)
    np.testing.assert_array_equal(p.block(2, 2), MIRRORED_B)
    np.testing.assert_array_equal(p.block(1, 2), 1.25 * np.eye(2))
    np.testing.assert_array_equal(p.block(2, 1), 1.25 * np.eye(2))


def test_mirrored_pair_custom_block():
    p = mirrored_pair(0.5, b=[[-3.0]])
    assert p.order == 2
    assert p.block(1, 1)[0, 0] == -3.0


@pytest.mark.parametrize("delta", [0.0, -1.0])
def test_mirrored_pair_rejects_bad_delta(delta):
    with pytest.raises(ValueError):
        mirrored_pair(delta)


@pytest.mark.parametrize("name", ["coupled-b", "coupled-c", "triangular"])
def test_named_systems_are_hurwitz(name):
    p = named_system(name)
    assert is_hurwitz(p.matrix)


def test_negative_case_is_unstable():
    # coupled-a is the bundled negative case: a matrix with a positive
    # eigenvalue, which every certification route must (and does) reject
    p = named_system("coupled-a")
    assert not is_hurwitz(p.matrix)
    assert not certify(p, "auto", run_all=True).certified


def test_named_system_partitions():
    assert named_system("coupled-a").partition.sizes == (2, 2)
    assert named_system("triangular").partition.sizes == tuple(
        TRIANGULAR_DEMO_PARTITION
    )


def test_named_system_unknown():
    with pytest.raises(KeyError, match="coupled-a"):
        named_system("nope")


class TestTridiagonal:
    def test_structure(self):
        p = block_tridiagonal_system(4, 3, seed=7)
        assert p.partition.sizes == (3, 3, 3, 3)
        assert not np.any(p.block(1, 3))
        assert not np.any(p.block(1, 4))
        assert not np.any(p.block(4, 2))
        assert np.any(p.block(2, 3))

    def test_coupling_norms(self):
        p = block_tridiagonal_system(3, 2, damping=2.0, coupling=0.5, seed=1)
        target = 0.5 * 2.0 / 2.0
        for i, j in ((1, 2), (2, 1), (2, 3), (3, 2)):
            assert np.linalg.norm(p.block(i, j), 2) == pytest.approx(target)

    def test_comparison_strictly_dominant(self):
        p = block_tridiagonal_system(5, 3, damping=1.5, coupling=0.6, seed=11)
        comp = block_comparison(p)
        assert comp.is_hurwitz()
        # dominance holds with the all-ones weights already
        assert check_scaled_dominance(comp.matrix, np.ones(5), mode="row")
        assert metzler_scalings(comp.matrix) is not None

    def test_certifiable_by_construction(self):
        report = certify(block_tridiagonal_system(6, 2, coupling=0.5, seed=4))
        assert report.certified

    def test_deterministic(self):
        a = block_tridiagonal_system(3, 2, seed=42).matrix
        b = block_tridiagonal_system(3, 2, seed=42).matrix
        np.testing.assert_array_equal(a, b)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n_blocks": 0, "block_size": 2},
            {"n_blocks": 2, "block_size": 0},
            {"n_blocks": 2, "block_size": 2, "coupling": 1.0},
            {"n_blocks": 2, "block_size": 2, "coupling": -0.1},
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            block_tridiagonal_system(**kwargs)


class TestBorderBlockDiagonal:
    def test_structure(self):
        p = border_block_diagonal_system([2, 3, 1, 2], seed=6)
        assert p.partition.sizes == (2, 3, 1, 2)
        for i in range(2, 5):
            assert np.any(p.block(1, i))
            assert np.any(p.block(i, 1))
            for j in range(2, 5):
                if i != j:
                    assert not np.any(p.block(i, j))

    def test_diagonal_blocks_damped(self):
        p = border_block_diagonal_system([3, 3], damping=2.5, seed=8)
        for blk in p.diagonal_blocks():
            sym = 0.5 * (blk + blk.T)
            assert np.max(np.linalg.eigvalsh(sym)) <= -2.5 + 1e-12

    def test_certifiable_by_construction(self):
        p = border_block_diagonal_system([2, 2, 3], damping=1.0, coupling=0.7,
                                         seed=13)
        report = certify(p)
        assert report.certified

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            border_block_diagonal_system([4])
        with pytest.raises(ValueError):
            border_block_diagonal_system([2, 2], coupling=1.5)
