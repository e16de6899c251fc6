import numpy as np
import pytest

from qpratio.core import QpIntermediateInstance, QpRatioInstance, eval_qp_intermediate
from qpratio.exact import (
    brute_force_qp_ratio,
    brute_force_weighted_bipartite,
    grid_search_intermediate,
)
from qpratio.generators import random_instance
from qpratio.hardness import (
    BoolFn,
    KAndInstance,
    PartialLabeling,
    UgInstance,
    check_expansion,
    check_kand_concentration,
    check_linear_l1,
    check_smallball,
    check_smallball_batch,
    dictator_profile,
    embed_basic_sdp_to_csp,
    eval_ratio_ug,
    fwht,
    gen_kand,
    intermediate_to_qpratio,
    kand_matrix,
    kand_to_qpratio,
    reduction_components,
    satisfied_literal_counts,
    theta_value,
    ug_eta,
    ug_to_intermediate,
)
from qpratio.sdp import GramSolution, embed_assignment
from qpratio.util import rng_for


class TestFourier:
    def test_dictator(self):
        f = BoolFn.dictator(2, 0)
        c = f.fourier()
        assert c[0b01] == 1.0
        assert np.allclose(np.delete(c, 1), 0.0)

    def test_constant(self):
        c = BoolFn.constant(3, 1.0).fourier()
        assert c[0] == 1.0
        assert np.allclose(c[1:], 0.0)

    def test_parseval_random(self):
        rng = rng_for(5)
        for r in range(1, 11):
            tables = rng.uniform(-1, 1, size=(20, 2**r))
            coeffs = fwht(tables) / 2**r
            assert np.max(np.abs(np.sum(coeffs**2, axis=1) - np.mean(tables**2, axis=1))) < 1e-12

    def test_involution(self):
        rng = rng_for(6)
        t = rng.uniform(-1, 1, 16)
        f = BoolFn(t)
        back = fwht(f.fourier())
        assert np.allclose(back, f.table, atol=1e-12)

    def test_r_cap(self):
        with pytest.raises(Exception):
            BoolFn(np.zeros(2**13))

    def test_values_clamped(self):
        f = BoolFn([2.0, -3.0, 0.5, 0.0])
        assert f.table.max() == 1.0 and f.table.min() == -1.0


class TestSmallball:
    def test_dictator_passes(self):
        assert check_smallball(BoolFn.dictator(4, 1))

    def test_zero_passes(self):
        assert check_smallball(BoolFn.constant(4, 0.0))

    def test_random_sweep(self):
        for r in (4, 6, 8):
            rng = rng_for(9, r)
            assert bool(np.all(check_smallball_batch(rng.uniform(-1, 1, (1000, 2**r)))))


class TestLinearL1:
    def test_dictator(self):
        ok, total = check_linear_l1(BoolFn.dictator(3, 0))
        assert ok and total == pytest.approx(1.0)

    def test_constant(self):
        ok, total = check_linear_l1(BoolFn.constant(3, 1.0))
        assert ok and total == 0.0

    def test_majority_violation_reported_not_raised(self):
        r = 9
        t = np.arange(2**r)
        bits = np.array([1 - 2 * ((t >> i) & 1) for i in range(r)]).sum(axis=0)
        maj = BoolFn(np.sign(bits))
        ok, total = check_linear_l1(maj)
        assert not ok
        assert total > 2.0


class TestKAnd:
    def test_shapes_and_determinism(self):
        inst = gen_kand(10, 20, 3, seed=4)
        assert inst.m == 20
        assert all(len(c) == 3 for c in inst.clauses)
        assert inst.clauses == gen_kand(10, 20, 3, seed=4).clauses

    def test_planted_fraction_exact(self):
        z = [1, -1] * 6
        inst = gen_kand(12, 40, 4, seed=1, planted=z, alpha=0.25)
        counts = satisfied_literal_counts(inst, z)
        assert int(np.sum(counts == 4)) >= round(0.25 * 40)

    def test_matrix_entries(self):
        inst = KAndInstance(3, 2, (((0, 1), (2, -1)),))
        a = kand_matrix(inst)
        assert a[0, 0] == 1.0 and a[0, 2] == -1.0 and a[0, 1] == 0.0

    def test_theta_single_full_clause(self):
        inst = KAndInstance(3, 3, (((0, 1), (1, 1), (2, -1)),))
        th = theta_value(inst, [1, 1, -1], [1], alpha=1.0)
        assert th.value == pytest.approx(1.5)  # k/2


class TestKandReduction:
    def test_shape_and_mapping(self):
        inst = gen_kand(4, 3, 2, seed=2)
        img, mapping = kand_to_qpratio(inst, alpha=0.5)
        assert mapping.w == 2
        assert img.n == 2 * 4 + 3
        assert img.bipartition is not None

    def test_replication_optimum_matches_weighted_oracle(self):
        inst = gen_kand(3, 2, 2, seed=5)
        base = kand_matrix(inst).T  # variables x clauses
        for w, alpha in ((1, 1.0), (2, 0.5), (3, 1 / 3)):
            img, _ = kand_to_qpratio(inst, alpha)
            opt_image = brute_force_qp_ratio(img, cap=12)[1].value
            opt_weighted = brute_force_weighted_bipartite(base, w, cap=12)
            assert opt_image == pytest.approx(opt_weighted, abs=1e-12)

    def test_mapping_bookkeeping(self):
        inst = gen_kand(3, 4, 2, seed=8)
        img, mapping = kand_to_qpratio(inst, alpha=0.5)
        f = [1, -1, 0]
        g = [1, 0, 0, -1]
        a = mapping.embed(f, g)
        copies, gv = mapping.extract(a)
        assert copies.shape == (2, 3)
        assert (copies == np.array(f)).all()
        assert gv.tolist() == g
        assert mapping.mu_f(a) == pytest.approx(2 / 3)
        assert mapping.mu_g(a) == pytest.approx(0.5)

    def test_bad_alpha_rejected(self):
        inst = gen_kand(3, 2, 2, seed=5)
        with pytest.raises(Exception):
            kand_to_qpratio(inst, alpha=0.4)


class TestConcentration:
    def test_planted_full_fraction(self):
        z = [1] * 10
        inst = gen_kand(10, 30, 3, seed=3, planted=z, alpha=0.3)
        rep = check_kand_concentration(inst)
        assert rep.max_full_fraction >= 0.3

    def test_random_instance_bounds(self):
        inst = gen_kand(12, 120, 4, seed=3)
        rep = check_kand_concentration(inst)
        assert 0.0 <= rep.max_fraction <= 1.0
        assert rep.threshold == pytest.approx(2 + 4 ** (7 / 8))

    def test_single_clause_fraction_binary(self):
        inst = gen_kand(6, 1, 3, seed=1)
        rep = check_kand_concentration(inst)
        assert rep.max_fraction in (0.0, 1.0)


class TestExpansion:
    def test_vacuous_at_small_alpha(self):
        inst = gen_kand(10, 30, 3, seed=2)
        rep = check_expansion(inst, alpha=0.1)
        assert rep.mode == "vacuous"
        assert rep.holds

    def test_exhaustive_probe_bounded_by_degree(self):
        inst = gen_kand(6, 5, 3, seed=7)
        rep = check_expansion(inst, alpha=1.0, t_max=2, s_max=2)
        assert rep.mode == "exhaustive"
        assert rep.pairs_checked > 0
        assert rep.worst_ratio <= inst.k

    def test_sampled_probe(self):
        inst = gen_kand(14, 40, 4, seed=9)
        rep = check_expansion(inst, alpha=1.0, t_max=8, s_max=10, budget=1000)
        assert rep.mode == "sampled"
        assert rep.worst_ratio <= inst.k


class TestRatioUg:
    def test_identity_edge_half(self):
        ug = UgInstance(2, 2, ((0, 1, (0, 1)),))
        assert eval_ratio_ug(ug, PartialLabeling((0, 0))) == 0.5

    def test_triangle_constant_labeling(self):
        edges = tuple((u, v, (0, 1)) for u, v in ((0, 1), (1, 2), (0, 2)))
        ug = UgInstance(3, 2, edges)
        assert eval_ratio_ug(ug, PartialLabeling((1, 1, 1))) == 1.0

    def test_all_bottom_is_zero(self):
        ug = UgInstance(2, 2, ((0, 1, (0, 1)),))
        assert eval_ratio_ug(ug, PartialLabeling((None, None))) == 0.0

    def test_irregular_rejected(self):
        with pytest.raises(Exception):
            UgInstance(3, 2, ((0, 1, (0, 1)), (1, 2, (0, 1)), (0, 1, (1, 0))))


class TestUgReduction:
    def ug2(self):
        return UgInstance(2, 2, ((0, 1, (0, 1)),))

    def test_eta_formula(self):
        assert ug_eta(2, 2) == pytest.approx(3.2768e10)
        inst, mapping = ug_to_intermediate(self.ug2())
        assert mapping.eta == 3.2768e10

    def test_dictator_profile_achieves_labeled_value(self):
        ug = self.ug2()
        inst, mapping = ug_to_intermediate(ug)
        prof = dictator_profile(ug, PartialLabeling((0, 0)))
        t, l, l1 = reduction_components(ug, prof)
        assert t == 1.0
        assert l == 0.0
        assert l1 == 1.0
        val = eval_qp_intermediate(inst, mapping.embed(prof))
        assert val.value >= 1.0 - 1e-12

    def test_zero_profile_is_zero(self):
        ug = self.ug2()
        inst, mapping = ug_to_intermediate(ug)
        prof = [None, None]
        assert eval_qp_intermediate(inst, mapping.embed(prof)).value == 0.0

    def test_matrix_matches_direct_computation(self):
        ug = UgInstance(3, 2, tuple((u, v, (1, 0)) for u, v in ((0, 1), (1, 2), (0, 2))))
        inst, mapping = ug_to_intermediate(ug)
        rng = rng_for(12)
        for _ in range(10):
            prof = [BoolFn(rng.uniform(-1, 1, 4)) for _ in range(3)]
            t, l, l1 = reduction_components(ug, prof)
            direct = (t - mapping.eta * l) / l1
            got = eval_qp_intermediate(inst, mapping.embed(prof)).value
            assert got == pytest.approx(direct, rel=1e-9)

    def test_diagonal_nonpositive(self):
        inst, _ = ug_to_intermediate(self.ug2())
        assert all(d <= 0 for d in inst.diag)

    def test_dictator_value_identity_against_game_oracle(self):
        # for a dictator/zero profile of labeling L the reduction ratio is
        # exactly val(L) * |V| / |E|: match terms are satisfied-edge
        # indicators and the l1 mass is the labeled fraction
        from qpratio.exact import brute_force_ratio_ug

        cases = [
            UgInstance(2, 2, ((0, 1, (0, 1)),)),
            UgInstance(3, 2, tuple((u, v, (1, 0)) for u, v in ((0, 1), (1, 2), (0, 2)))),
            UgInstance(3, 3, tuple((u, v, (2, 0, 1)) for u, v in ((0, 1), (1, 2), (0, 2)))),
        ]
        for ug in cases:
            inst, mapping = ug_to_intermediate(ug)
            lab, val = brute_force_ratio_ug(ug)
            got = eval_qp_intermediate(inst, mapping.embed(dictator_profile(ug, lab))).value
            assert got == pytest.approx(val * ug.vertices / len(ug.edges), rel=1e-12)

    def test_budget_refusal(self):
        ug = UgInstance(2, 8, ((0, 1, tuple(range(8))),))
        with pytest.raises(Exception):
            ug_to_intermediate(ug, max_vars=100)


class TestIntermediateSplit:
    def test_copy_count_formula(self):
        inst = QpIntermediateInstance(2, ((0, 1, 1.0),), (0.0, 0.0))
        assert inst.norm1() == 2.0
        _, m = intermediate_to_qpratio(inst, eps=0.5)
        assert m == 9

    def test_sandwich_small(self):
        inst = QpIntermediateInstance(2, ((0, 1, 1.0),), (0.0, 0.0))
        img, m = intermediate_to_qpratio(inst, eps=1.0)
        assert m == 5 and img.n == 10
        _, grid = grid_search_intermediate(inst, eps=0.05)
        _, brute = brute_force_qp_ratio(img, cap=12)
        assert abs(grid.value - brute.value) <= 1.0

    def test_zero_matrix(self):
        inst = QpIntermediateInstance(2, (), (0.0, 0.0))
        img, _ = intermediate_to_qpratio(inst, eps=1.0)
        assert img.entries == ()
        assert brute_force_qp_ratio(img, cap=12)[1].value == 0.0


class TestCspEmbedding:
    def test_single_unit_vector(self):
        inst = QpRatioInstance(2, ((0, 1, 1.0),))
        sol = GramSolution.build(inst, np.array([[1.0, 0.0], [0.0, 0.0]]))
        rep = embed_basic_sdp_to_csp(sol, inst)
        assert rep.ok, rep

    def test_integer_embedding_objective_preserved(self):
        inst = random_instance(6, seed=3)
        sol = embed_assignment(inst, brute_force_qp_ratio(inst)[0])
        rep = embed_basic_sdp_to_csp(sol, inst)
        assert rep.ok, rep
        assert rep.objective_delta <= 1e-12

    def test_random_orthogonal_gram(self):
        rng = rng_for(15)
        inst = random_instance(6, seed=8)
        lengths = rng.uniform(0.1, 1.0, 6)
        lengths /= lengths.sum()
        w = np.diag(np.sqrt(lengths))
        sol = GramSolution.build(inst, w)
        rep = embed_basic_sdp_to_csp(sol, inst, tol=1e-10)
        assert rep.ok, rep

    def test_overlong_vector_rejected(self):
        inst = QpRatioInstance(2, ((0, 1, 1.0),))
        sol = GramSolution.build(inst, np.array([[2.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(Exception):
            embed_basic_sdp_to_csp(sol)
