import pytest

from qpratio.core import (
    Assignment,
    QpIntermediateInstance,
    QpRatioInstance,
    eval_qp_ratio,
)
from qpratio.exact import (
    BudgetExceeded,
    brute_force_normalized,
    brute_force_qp_ratio,
    brute_force_ratio_ug,
    brute_force_weighted_bipartite,
    grid_search_intermediate,
)
from qpratio.generators import gen_bipartite_gap, gen_star, random_instance
from qpratio.hardness import UgInstance
from qpratio.util import rng_for


class TestBruteForce:
    def test_single_edge(self):
        # both (1,1) and (-1,-1) attain 1; the lexicographic tie-break
        # (-1 < 0 < 1) selects the all-minus assignment
        a, v = brute_force_qp_ratio(QpRatioInstance(2, ((0, 1, 1.0),)))
        assert v.value == 1.0
        assert a.values == (-1, -1)

    def test_star_five(self):
        _, v = brute_force_qp_ratio(gen_star(5))
        assert v.value == pytest.approx(10 / 6)

    def test_empty_instance(self):
        _, v = brute_force_qp_ratio(QpRatioInstance(3, ()))
        assert v.value == 0.0

    def test_cap_refusal_names_numbers(self):
        with pytest.raises(BudgetExceeded, match="n=13 exceeds cap=12"):
            brute_force_qp_ratio(QpRatioInstance(13, ()), cap=12)

    def test_oracle_dominance(self):
        rng = rng_for(21)
        for seed in range(5):
            inst = random_instance(7, seed=seed)
            _, opt = brute_force_qp_ratio(inst)
            for _ in range(20):
                a = Assignment(tuple(int(v) for v in rng.integers(-1, 2, 7)))
                assert eval_qp_ratio(inst, a).value <= opt.value + 1e-12

    def test_negation_symmetry_on_bipartite(self):
        inst = gen_bipartite_gap(4, seed=2)
        flipped = QpRatioInstance(
            inst.n,
            tuple((i, j, -w) for i, j, w in inst.entries),
            inst.bipartition,
        )
        v1 = brute_force_qp_ratio(inst)[1].value
        v2 = brute_force_qp_ratio(flipped)[1].value
        assert v1 == pytest.approx(v2)


class TestBruteForceNormalized:
    def test_single_negative_edge(self):
        a, v = brute_force_normalized(QpRatioInstance(2, ((0, 1, -1.0),)))
        assert v.value == 1.0
        assert a.values == (-1, 1)  # lexicographic smallest of the two optima

    def test_star(self):
        _, v = brute_force_normalized(gen_star(5))
        assert v.value == pytest.approx(1.0)

    def test_empty(self):
        _, v = brute_force_normalized(QpRatioInstance(2, ()))
        assert v.value == 0.0


class TestGridSearch:
    def test_offdiag_pair(self):
        inst = QpIntermediateInstance(2, ((0, 1, 1.0),), (0.0, 0.0))
        _, v = grid_search_intermediate(inst, eps=0.5)
        assert v.value == pytest.approx(1.0)

    def test_negative_diag_prefers_zero(self):
        inst = QpIntermediateInstance(1, (), (-1.0,))
        x, v = grid_search_intermediate(inst, eps=0.3)
        assert v.value == 0.0
        assert x.values == (0.0,)

    def test_self_consistency_at_finer_grid(self):
        rng = rng_for(7)
        for _ in range(3):
            entries = tuple(
                (i, j, float(rng.uniform(-0.2, 0.2))) for i in range(3) for j in range(i + 1, 3)
            )
            diag = tuple(-abs(float(rng.uniform(0, 0.2))) for _ in range(3))
            inst = QpIntermediateInstance(3, entries, diag)
            _, v1 = grid_search_intermediate(inst, eps=0.1)
            _, v2 = grid_search_intermediate(inst, eps=0.05)
            assert abs(v1.value - v2.value) <= 0.1

    def test_budget_refusal(self):
        inst = QpIntermediateInstance(4, ((0, 1, 1.0),), (0.0,) * 4)
        with pytest.raises(BudgetExceeded):
            grid_search_intermediate(inst, eps=1e-4, cap=4)


class TestRatioUgBruteForce:
    def test_single_identity_edge(self):
        ug = UgInstance(2, 2, ((0, 1, (0, 1)),))
        _, val = brute_force_ratio_ug(ug)
        assert val == 0.5

    def test_triangle_identity(self):
        edges = tuple((u, v, (0, 1)) for u, v in ((0, 1), (1, 2), (0, 2)))
        ug = UgInstance(3, 2, edges)
        _, val = brute_force_ratio_ug(ug)
        assert val == 1.0

    def test_swap_permutation(self):
        ug = UgInstance(2, 2, ((0, 1, (1, 0)),))
        lab, val = brute_force_ratio_ug(ug)
        assert val == 0.5
        u, v = lab.labels
        assert (u, v) in ((0, 1), (1, 0))

    def test_budget_refusal(self):
        ug = UgInstance(2, 2, ((0, 1, (0, 1)),))
        with pytest.raises(BudgetExceeded):
            brute_force_ratio_ug(ug, budget=4)


class TestWeightedBipartite:
    def test_hand_case(self):
        # single cross pair weight 1, left weight 2:
        # best is x=y=1 with 2*1/(2+1) = 2/3
        assert brute_force_weighted_bipartite([[1.0]], 2) == pytest.approx(2 / 3)

    def test_weight_one_matches_plain_brute_force(self):
        rng = rng_for(13)
        a = rng.uniform(-1, 1, (2, 3))
        entries = tuple((i, 2 + j, float(a[i, j])) for i in range(2) for j in range(3))
        inst = QpRatioInstance(5, entries, bipartition=((0, 1), (2, 3, 4)))
        assert brute_force_weighted_bipartite(a, 1) == pytest.approx(
            brute_force_qp_ratio(inst)[1].value
        )
