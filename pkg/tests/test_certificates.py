import numpy as np
import pytest
from numpy.testing import assert_allclose

from blockstab import (
    GammaMatrix,
    UnstableMatrixError,
    assemble_and_verify,
    assemble_block_diagonal,
    bbd_witnesses_from_set,
    certify,
    counterexample_conditions,
    decoupled_riccati_test,
    default_epsilon,
    gamma_for_test,
    make_partitioned,
    metzler_scalings,
    prop4_construct,
    riccati_residuals,
    scalar_comparison,
    scalar_witnesses,
    verify_bbd_witnesses,
    verify_general_witnesses,
    verify_scalar_conditions,
)
from blockstab.comparison import block_comparison
from blockstab.gallery import (
    MIRRORED_B,
    block_tridiagonal_system,
    border_block_diagonal_system,
    mirrored_pair,
    named_system,
)
from conftest import make_hurwitz


def coupled_system(rng, sizes, damping=1.5, coupling=0.5):
    """Random partitioned matrix whose block comparison matrix is Hurwitz
    by construction (diagonal damping dominates total coupling)."""
    n = len(sizes)
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    full = np.zeros((offsets[-1], offsets[-1]))
    for i in range(n):
        g = rng.standard_normal((sizes[i], sizes[i]))
        shift = float(np.max(np.linalg.eigvalsh(0.5 * (g + g.T))))
        full[offsets[i]:offsets[i + 1], offsets[i]:offsets[i + 1]] = (
            g - (shift + damping) * np.eye(sizes[i])
        )
    target = coupling * damping / max(1, n - 1)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            g = rng.standard_normal((sizes[i], sizes[j]))
            full[offsets[i]:offsets[i + 1], offsets[j]:offsets[j + 1]] = (
                g * target / np.linalg.norm(g, 2)
            )
    return make_partitioned(full, sizes)


class TestGammaMatrix:
    def test_rules(self):
        p = named_system("coupled-b")
        sig12 = np.linalg.norm(p.block(1, 2), 2)
        sig21 = np.linalg.norm(p.block(2, 1), 2)

        ga = gamma_for_test(p, "a")
        assert_allclose(ga.gamma, [[0.0, sig12], [sig21, 0.0]])
        assert ga.strategy == "test-a"

        gb = gamma_for_test(p, "b")
        np.testing.assert_array_equal(gb.gamma, [[0.0, 1.0], [1.0, 0.0]])

    def test_rule_c_uses_scalings(self):
        p = named_system("coupled-c")
        comp = block_comparison(p)
        pair = metzler_scalings(comp.matrix)
        gc = gamma_for_test(p, "c", pair)
        sig = comp.offdiag_provenance
        d, e = pair.d, pair.e
        assert_allclose(gc.gamma[0, 1], sig[0, 1] * e[0] / d[1])
        assert_allclose(gc.gamma[1, 0], sig[1, 0] * e[1] / d[0])

    def test_rule_c_requires_scalings(self):
        with pytest.raises(ValueError, match="scaling pair"):
            gamma_for_test(named_system("coupled-b"), "c")

    def test_unknown_rule(self):
        with pytest.raises(ValueError):
            gamma_for_test(named_system("coupled-b"), "d")

    def test_zero_block_stays_zero(self):
        p = named_system("triangular")
        g = gamma_for_test(p, "a")
        assert g.gamma[0, 1] == 0.0  # upper-triangle couplings are absent
        assert g.gamma[0, 2] == 0.0
        assert g.gamma[1, 2] == 0.0

    def test_negative_gains_rejected(self):
        with pytest.raises(ValueError):
            GammaMatrix(np.array([[0.0, -1.0], [1.0, 0.0]]), "custom")

    def test_column_sum(self):
        g = GammaMatrix(np.array([[5.0, 2.0], [3.0, 7.0]]), "custom")
        assert g.column_sum(1) == 3.0  # excludes the diagonal
        assert g.column_sum(2) == 2.0


class TestDecoupledRiccati:
    def test_block_diagonal_system_always_passes(self, rng):
        a = assemble_block_diagonal([make_hurwitz(rng, 2), make_hurwitz(rng, 3)])
        p = make_partitioned(a, [2, 3])
        g = gamma_for_test(p, "a")
        blocks = decoupled_riccati_test(p, g)
        assert blocks is not None
        assert all(np.min(np.linalg.eigvalsh(b)) > 0 for b in blocks)

    def test_unstable_block_fails(self, rng):
        a = assemble_block_diagonal([[[1.0]], make_hurwitz(rng, 2)])
        p = make_partitioned(a, [1, 2])
        assert decoupled_riccati_test(p, gamma_for_test(p, "a")) is None

    def test_solutions_satisfy_equations(self, rng):
        p = coupled_system(rng, [2, 2, 3])
        g = gamma_for_test(p, "a")
        eps = default_epsilon(g)
        blocks = decoupled_riccati_test(p, g, eps)
        assert blocks is not None
        for res in riccati_residuals(p, g, eps, blocks):
            assert res < 1e-8

    def test_epsilon_validation(self, rng):
        p = coupled_system(rng, [2, 2])
        g = gamma_for_test(p, "a")
        with pytest.raises(ValueError):
            decoupled_riccati_test(p, g, [1e-6])  # wrong length
        with pytest.raises(ValueError):
            decoupled_riccati_test(p, g, [1e-6, -1e-6])

    def test_zero_gain_with_nonzero_coupling_rejected(self):
        p = named_system("coupled-b")
        g = GammaMatrix(np.zeros((2, 2)), "custom")
        with pytest.raises(ValueError, match="coupling block"):
            decoupled_riccati_test(p, g)

    def test_larger_epsilon_is_harder(self):
        # growing the shift can only lose solvability, never gain it
        p = named_system("coupled-b")
        g = gamma_for_test(p, "b")
        assert decoupled_riccati_test(p, g, [1e-8, 1e-8]) is not None
        solvable = [
            decoupled_riccati_test(p, g, [e, e]) is not None
            for e in (1e-6, 1e-2, 1.0, 10.0, 1e3)
        ]
        assert solvable == sorted(solvable, reverse=True)

    def test_default_epsilon_scales_with_column_sums(self):
        g = GammaMatrix(np.array([[0.0, 4.0], [9.0, 0.0]]), "custom")
        assert_allclose(default_epsilon(g), [1e-6 * 10.0, 1e-6 * 5.0])


class TestWitnessConstruction:
    def test_pipeline_on_constructed_system(self, rng):
        p = coupled_system(rng, [2, 3, 2])
        w = prop4_construct(p)
        # the chain inequality holds strictly on every block row
        for lhs, mid, rhs in w.chain:
            assert lhs <= mid * (1 + 1e-9) + 1e-15
            assert mid < rhs
        check = verify_general_witnesses(p, w)
        assert check.ok
        assert all(s > 0 for s in check.slacks["P"])
        assert all(s > 0 for s in check.slacks["dom_W"])
        assert all(s > 0 for s in check.slacks["dom_V"])
        # witnesses feed the final assembled certificate
        cert = assemble_and_verify(p, list(w.P), strategy="prop4")
        assert cert is not None
        assert cert.lyapunov_margin > 0

    def test_gains_follow_scalings(self, rng):
        p = coupled_system(rng, [2, 2])
        comp = block_comparison(p)
        pair = metzler_scalings(comp.matrix)
        w = prop4_construct(p, pair, comparison=comp)
        h = -np.diag(comp.matrix)
        d, e = pair.d, pair.e
        assert_allclose(np.diag(w.gamma.gamma), h * e / d, rtol=1e-12)
        assert_allclose(
            w.gamma.gamma[0, 1], comp.matrix[0, 1] * e[0] / d[1], rtol=1e-12
        )

    def test_refuses_non_hurwitz_comparison(self):
        p = mirrored_pair(5.0)  # coupling exceeds the comparison threshold
        with pytest.raises(ValueError, match="not Hurwitz"):
            prop4_construct(p)

    def test_verification_rejects_perturbed_witnesses(self, rng):
        p = coupled_system(rng, [2, 2])
        w = prop4_construct(p)
        # flipping the sign of one P block breaks positive definiteness
        bad_p = (-w.P[0], w.P[1])
        broken = type(w)(
            P=bad_p, W=w.W, V=w.V, slack={}, gamma=w.gamma,
            scalings=w.scalings, chain=w.chain,
        )
        assert not verify_general_witnesses(p, broken).ok

    def test_verification_rejects_inflated_coupling(self, rng):
        p = coupled_system(rng, [2, 2])
        w = prop4_construct(p)
        # scaling the matrix up by 3x invalidates the coupling LMIs
        harder = make_partitioned(p.matrix * 3.0, [2, 2])
        assert not verify_general_witnesses(harder, w).ok

    def test_decomposition_identity(self, rng):
        # blockwise expansion of PA + A'P: diagonal terms P_i A_ii + A_ii' P_i
        # plus the cross couplings P_i A_ij must rebuild the full product
        p = coupled_system(rng, [2, 3])
        w = prop4_construct(p)
        big_p = assemble_block_diagonal(list(w.P))
        lhs = big_p @ p.matrix + p.matrix.T @ big_p

        n = p.n_blocks
        offs = p.partition.offsets
        total = p.order
        acc = np.zeros((total, total))
        for i in range(1, n + 1):
            sl = slice(offs[i - 1], offs[i])
            aii = p.block(i, i)
            acc[sl, sl] += w.P[i - 1] @ aii + aii.T @ w.P[i - 1]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i == j:
                    continue
                sli = slice(offs[i - 1], offs[i])
                slj = slice(offs[j - 1], offs[j])
                blk = p.block(i, j)
                acc[sli, slj] += w.P[i - 1] @ blk
                acc[slj, sli] += (w.P[i - 1] @ blk).T
        assert_allclose(acc, lhs, rtol=1e-12, atol=1e-12)


class TestCertify:
    def test_auto_stops_at_first_success(self, rng):
        p = coupled_system(rng, [2, 2])
        report = certify(p, "auto")
        assert report.certified
        assert report.outcome("comparison") == "pass"
        assert report.outcome("c") == "skipped"
        assert report.strategy_used == "prop4"

    def test_run_all(self, rng):
        p = coupled_system(rng, [2, 2])
        report = certify(p, "auto", run_all=True)
        assert all(r.status != "skipped" for r in report.routes.values())

    def test_single_strategy_reports(self):
        report = certify(named_system("coupled-b"), "b")
        assert set(report.routes) == {"b"}
        assert report.certified
        assert report.strategy_used == "b"
        cert = report.certificate
        # the reported margin is a lower bound on the assembled one
        big_p = cert.assemble()
        m = named_system("coupled-b").matrix
        s = big_p @ m + m.T @ big_p
        exact = -float(np.max(np.linalg.eigvalsh(0.5 * (s + s.T))))
        assert 0 < cert.lyapunov_margin <= exact * (1 + 1e-9) + 1e-12

    def test_margin_request_can_fail(self, rng):
        p = coupled_system(rng, [2, 2])
        strict = certify(p, "prop4", margin=1e9)
        assert not strict.certified
        assert "margin" in strict.routes["comparison"].reason

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            certify(named_system("coupled-b"), "z")

    def test_not_certifiable_reports_failure_not_error(self):
        p = named_system("coupled-a")
        report = certify(p, "auto", run_all=True)
        assert not report.certified
        assert report.certificate is None
        assert all(r.status == "fail" for r in report.routes.values())

    def test_coupled_pair_patterns(self):
        # the three bundled 4x4 systems separate the gain rules
        for name, passing in (("coupled-b", "b"), ("coupled-c", "c")):
            report = certify(named_system(name), "auto", run_all=True)
            assert report.outcome(passing) == "pass"
            others = {"a", "b", "c"} - {passing}
            assert all(report.outcome(o) == "fail" for o in others)


class TestScalarSpecialization:
    def test_witnesses_exist_iff_comparison_hurwitz(self, rng):
        hits = 0
        for k in range(80):
            n = int(rng.integers(2, 7))
            a = rng.standard_normal((n, n))
            off = np.abs(a).copy()
            np.fill_diagonal(off, 0.0)
            np.fill_diagonal(
                a, -off.sum(axis=1) * rng.uniform(0.55, 1.45, size=n)
            )
            comp_hurwitz = scalar_comparison(a).is_hurwitz()
            got = scalar_witnesses(a)
            assert (got is not None) == comp_hurwitz
            if got is not None:
                hits += 1
                w, v, pvec = got
                assert verify_scalar_conditions(a, w, v, pvec)
        assert 10 < hits < 80  # the sample genuinely mixes both outcomes

    def test_witness_values(self):
        a = np.array([[-5.0, 1.0], [2.0, -6.0]])
        w, v, pvec = scalar_witnesses(a)
        pair = metzler_scalings(scalar_comparison(a).matrix)
        d, e = pair.d, pair.e
        assert_allclose(w[0, 1], abs(a[0, 1]) * e[0] * d[1] / d[0] ** 2)
        assert_allclose(v[1, 0], abs(a[1, 0]) * e[1] / d[0])
        assert_allclose(pvec, e / d)

    def test_witnesses_induce_diagonal_lyapunov_solution(self, rng):
        # soundness: when witnesses verify, diag(p) solves the Lyapunov
        # inequality for the original matrix
        for k in range(20):
            n = int(rng.integers(2, 6))
            a = rng.standard_normal((n, n))
            off = np.abs(a).copy()
            np.fill_diagonal(off, 0.0)
            np.fill_diagonal(a, -off.sum(axis=1) - rng.uniform(0.2, 1.0))
            w, v, pvec = scalar_witnesses(a)
            s = np.diag(pvec) @ a + a.T @ np.diag(pvec)
            assert np.max(np.linalg.eigvalsh(0.5 * (s + s.T))) < 0

    def test_rejects_bad_witnesses(self):
        a = np.array([[-5.0, 1.0], [2.0, -6.0]])
        w, v, pvec = scalar_witnesses(a)
        w = w.copy()
        w[0, 0] = 0.0  # breaks the row dominance of w
        assert not verify_scalar_conditions(a, w, v, pvec)

    def test_no_witnesses_for_unstable_comparison(self):
        assert scalar_witnesses([[1.0, 0.0], [0.0, -1.0]]) is None
        assert scalar_witnesses([[-1.0, 5.0], [5.0, -1.0]]) is None


class TestBorderBlockDiagonal:
    def test_witness_aggregation_verifies(self):
        p = border_block_diagonal_system([3, 2, 2, 3], damping=1.5,
                                         coupling=0.5, seed=5)
        w = prop4_construct(p)
        q, y, z = bbd_witnesses_from_set(w)
        assert verify_bbd_witnesses(p, q, y, z)

    def test_shapes(self):
        p = border_block_diagonal_system([3, 2, 4], damping=1.5, coupling=0.4,
                                         seed=9)
        q, y, z = bbd_witnesses_from_set(prop4_construct(p))
        assert [m.shape[0] for m in q] == [3, 2, 4]
        assert [m.shape[0] for m in y] == [3, 3]
        assert [m.shape[0] for m in z] == [2, 4]

    def test_rejects_non_bbd_structure(self, rng):
        p = coupled_system(rng, [2, 2, 2])  # dense couplings
        k = np.eye(2)
        with pytest.raises(ValueError, match="border"):
            verify_bbd_witnesses(p, [k, k, k], [k, k], [k, k])

    def test_rejects_invalid_witnesses(self):
        p = border_block_diagonal_system([2, 2], damping=1.5, coupling=0.5,
                                         seed=3)
        q, y, z = bbd_witnesses_from_set(prop4_construct(p))
        assert not verify_bbd_witnesses(p, q, [-y[0]], z)  # Y_2 not PD

    def test_wrong_counts(self):
        p = border_block_diagonal_system([2, 2], seed=1)
        with pytest.raises(ValueError, match="expected"):
            verify_bbd_witnesses(p, [np.eye(2)], [], [])


class TestAssembleAndVerify:
    def test_accepts_true_solution(self, rng):
        p = coupled_system(rng, [2, 2])
        w = prop4_construct(p)
        cert = assemble_and_verify(p, list(w.P))
        assert cert is not None
        assert cert.strategy == "custom"
        assert cert.partition == (2, 2)

    def test_rejects_identity_for_indefinite_product(self):
        # A + A' of the mirrored pair has an eigenvalue -3 + 2*1.63 > 0,
        # so P = I is not a Lyapunov solution even though A is certifiable
        p = mirrored_pair(1.63)
        assert assemble_and_verify(p, [np.eye(2), np.eye(2)]) is None

    def test_rejects_indefinite_blocks(self, rng):
        p = coupled_system(rng, [2, 2])
        w = prop4_construct(p)
        assert assemble_and_verify(p, [-w.P[0], w.P[1]]) is None

    def test_rejects_wrong_block_orders(self, rng):
        p = coupled_system(rng, [2, 2])
        with pytest.raises(ValueError):
            assemble_and_verify(p, [np.eye(3), np.eye(1)])

    def test_margin_is_exact_here(self, rng):
        p = coupled_system(rng, [2, 3])
        w = prop4_construct(p)
        cert = assemble_and_verify(p, list(w.P))
        big_p = cert.assemble()
        s = big_p @ p.matrix + p.matrix.T @ big_p
        assert_allclose(
            cert.lyapunov_margin,
            -float(np.max(np.linalg.eigvalsh(0.5 * (s + s.T)))),
            rtol=1e-12,
        )


class TestCounterexampleConditions:
    def test_reference_instance(self):
        conds = counterexample_conditions(MIRRORED_B, 1.63)
        assert conds.all_hold
        assert conds.sigma_min_b == pytest.approx(1.6394102980498528, rel=1e-12)
        assert conds.sigma_max_x0 == pytest.approx(0.3103025180659479, rel=1e-12)

    def test_condition_windows(self):
        # (b) needs delta >= 1/(2 sigma_max(X0)); (c) needs delta < sigma_min(B)
        assert not counterexample_conditions(MIRRORED_B, 1.55).cond_b
        assert counterexample_conditions(MIRRORED_B, 1.65).cond_b
        assert counterexample_conditions(MIRRORED_B, 1.60).cond_c
        assert not counterexample_conditions(MIRRORED_B, 1.65).cond_c

    def test_x0_solves_its_equation(self):
        b = np.asarray(MIRRORED_B)
        x0 = np.array([[19 / 96, 13 / 96], [13 / 96, 113 / 768]])
        assert_allclose(b @ x0 + x0 @ b.T, -np.eye(2), atol=1e-13)

    def test_comparison_still_certifies_inside_the_window(self):
        # the point of the construction: A is certifiable via its
        # comparison matrix even where all three conditions hold
        report = certify(mirrored_pair(1.63), "prop4")
        assert report.certified

    def test_requires_hurwitz_block(self):
        with pytest.raises(UnstableMatrixError):
            counterexample_conditions([[1.0, 0.0], [0.0, -1.0]], 1.0)

    def test_requires_positive_delta(self):
        with pytest.raises(ValueError):
            counterexample_conditions(MIRRORED_B, 0.0)

    def test_scalar_block(self):
        conds = counterexample_conditions([[-2.0]], 1.0)
        # sigma_min = 2 >= 1; X0 = 1/4 so (b) fails at delta = 1
        assert conds.cond_a
        assert not conds.cond_b
        assert conds.sigma_max_x0 == pytest.approx(0.25)


class TestLargeScale:
    def test_block_tridiagonal_certification(self):
        p = block_tridiagonal_system(12, 4, damping=1.0, coupling=0.4, seed=2)
        report = certify(p, "c")
        assert report.certified
        cert = report.certificate
        assert cert.strategy == "c"
        # bound versus exact margin on the assembled system
        big_p = cert.assemble()
        s = big_p @ p.matrix + p.matrix.T @ big_p
        exact = -float(np.max(np.linalg.eigvalsh(0.5 * (s + s.T))))
        assert 0 < cert.lyapunov_margin <= exact * (1 + 1e-9) + 1e-12
