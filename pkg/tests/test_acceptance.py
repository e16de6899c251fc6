"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report.  Tolerances are pinned here and nowhere else.
"""

import json
import math

import numpy as np
import pytest

from qpratio.cli import main as cli_main
from qpratio.core import (
    QpIntermediateInstance,
    eval_qp_intermediate,
    eval_qp_ratio,
    trivial_solution,
)
from qpratio.exact import (
    brute_force_qp_ratio,
    brute_force_weighted_bipartite,
    grid_search_intermediate,
)
from qpratio.generators import (
    LevelGraphParams,
    check_expr1,
    gen_bipartite_gap,
    gen_gap_sdp_certificate,
    gen_level_graph,
    gen_star,
    level_graph_witness_value,
    level_graph_witness_vector,
    random_instance,
)
from qpratio.core import eval_normalized_fractional
from qpratio.hardness import (
    PartialLabeling,
    UgInstance,
    check_smallball_batch,
    dictator_profile,
    embed_basic_sdp_to_csp,
    fwht,
    gen_kand,
    intermediate_to_qpratio,
    kand_matrix,
    kand_to_qpratio,
    reduction_components,
    satisfied_literal_counts,
    theta_value,
    ug_to_intermediate,
)
from qpratio.rounding import mean_abs_signed_sum, solve_general
from qpratio.sdp import GramSolution, embed_assignment, sdp_feasibility, sdp_solve
from qpratio.spectral import eig_relaxation_value
from qpratio.util import rng_for

# Frozen after the first calibration run over the seeds below: the observed
# minimum of value/optimum was 0.563 (seed 88, n=8), so the /8 envelope has
# a 4.5x margin.
ROUNDING_ENVELOPE = 8.0


def _acceptance_instances():
    rng = rng_for(2026)
    sizes = [int(rng.integers(3, 11)) for _ in range(100)]
    return [(seed, random_instance(n, seed=seed)) for seed, n in enumerate(sizes)]


def _report(k, text):
    print(f"\n[acceptance] criterion {k:2d}: PASS - {text}")


def test_criterion_01_relaxation_sandwich():
    for seed, inst in _acceptance_instances():
        a_opt, opt = brute_force_qp_ratio(inst)
        sol = sdp_solve(inst, seed=seed, warm_starts=[a_opt])
        assert opt.value <= sol.objective + 1e-6
        assert opt.value <= eig_relaxation_value(inst) + 1e-9
    _report(1, "brute force <= warm-started vector objective + 1e-6 and <= eig + 1e-9 on 100 instances")


def test_criterion_02_gap_certificate():
    for n in (16, 64):
        inst = gen_bipartite_gap(n, seed=3)
        cert = gen_gap_sdp_certificate(inst)
        ok, report = sdp_feasibility(cert, tol=1e-12)
        assert ok, report
        assert cert.objective == pytest.approx(math.sqrt(n), abs=1e-9)
        sq = cert.squared_lengths()
        s = math.isqrt(n)
        assert np.allclose(sq[s:], 1.0 / (2 * n), atol=1e-15)
        assert abs(float(np.sum(sq)) - 1.0) <= 1e-12
    _report(2, "explicit certificates exactly feasible with objective sqrt(n) for n in {16,64}")


def test_criterion_03_star_separation():
    from qpratio.exact import exact_star_optimum

    # the symmetry-reduced star oracle agrees with the generic one in range
    for leaves in (3, 5, 9, 11):
        assert exact_star_optimum(leaves) == pytest.approx(
            brute_force_qp_ratio(gen_star(leaves))[1].value
        )
    for n in (9, 16, 25):
        star = gen_star(n)
        eig = eig_relaxation_value(star)
        opt = exact_star_optimum(n)
        assert eig / opt >= 0.5 * math.sqrt(n) / 2.0
    star25 = gen_star(25)
    sol = sdp_solve(star25, seed=1)
    assert sol.objective <= 0.8 * eig_relaxation_value(star25)
    _report(3, "eig/opt >= 0.5*sqrt(n)/2 on stars; pair constraints pull star(25) under 0.8*eig")


def test_criterion_04_rounding_validity():
    for seed, inst in _acceptance_instances():
        a, val = solve_general(inst, seed=seed)
        assert eval_qp_ratio(inst, a).value == val.value  # valid assignment, exact value
        opt = brute_force_qp_ratio(inst)[1].value
        base = trivial_solution(inst)[1].value
        assert val.value >= base - 1e-12
        assert val.value >= opt / ROUNDING_ENVELOPE
    _report(4, "100 instances: valid outputs, >= max(trivial, opt/8); stage-1 ratio asserted in-process")


def test_criterion_05_paley_zygmund():
    rng = rng_for(41)
    for _ in range(50):
        n = int(rng.integers(1, 13))
        b = rng.standard_normal(n)
        b /= np.linalg.norm(b)
        assert mean_abs_signed_sum(b) >= 1.0 / 12.0
    _report(5, "exhaustive E|sum b_i X_i| >= 1/12 for 50 random unit vectors, n <= 12")


def test_criterion_06_gain_ratio_construction():
    for M, m in ((4, 16), (8, 16), (4, 25)):
        rng = rng_for(17, M, m)
        bound = float(M) ** (-math.sqrt(m) / 4.0)
        for _ in range(10_000):
            ratio, holds = check_expr1(rng.uniform(0, 1, m), M, m)
            assert holds and ratio < bound
    params = LevelGraphParams(eps=0.25, n0=1)
    witness = level_graph_witness_value(params)
    assert witness.value > 0
    assert witness.value >= 0.02 * params.eps**2
    # the closed form is the same arithmetic as explicit evaluation; checked
    # where the edge list is materializable
    for eps in (0.5, 1 / 3):
        p = LevelGraphParams(eps=eps)
        inst = gen_level_graph(p)
        direct = eval_normalized_fractional(inst, level_graph_witness_vector(p))
        closed = level_graph_witness_value(p)
        assert closed.value == pytest.approx(direct.value, rel=1e-12)
    _report(6, "profile bound holds on 3x10^4 draws; eps=1/4 witness value 0.0945 >= 0.02*eps^2")


def test_criterion_07_threshold_scan_exactness():
    from qpratio.core import Assignment, eval_normalized_qp_ratio
    from qpratio.spectral import trevisan_round

    for seed in range(50):
        inst = random_instance(8, seed=seed + 500)
        rng = rng_for(31, seed)
        x = rng.uniform(-1, 1, 8)
        _, got = trevisan_round(inst, x)
        mags = np.abs(x)
        best = -math.inf
        for t in np.unique(mags[mags > 0]):
            y = Assignment(tuple(int(v) for v in np.where(mags >= t, np.sign(x), 0)))
            best = max(best, eval_normalized_qp_ratio(inst, y).value)
        assert got.value == best
    _report(7, "threshold rounding equals an independent full scan exactly on 50 instances")


def test_criterion_08_kand_completeness_and_replication():
    z = [1, -1] * 6
    inst = gen_kand(12, 60, 4, seed=5, planted=z, alpha=0.25)
    satisfied = satisfied_literal_counts(inst, z) == 4
    assert int(np.sum(satisfied)) >= round(0.25 * 60)
    g = np.where(satisfied, 1.0, 0.0)
    theta = theta_value(inst, z, g, alpha=0.25)
    assert theta.value >= 4 / 2.0
    small = gen_kand(3, 2, 2, seed=5)
    base = kand_matrix(small).T
    for w, alpha in ((1, 1.0), (2, 0.5), (3, 1 / 3)):
        img, _ = kand_to_qpratio(small, alpha)
        assert brute_force_qp_ratio(img, cap=12)[1].value == pytest.approx(
            brute_force_weighted_bipartite(base, w, cap=12), abs=1e-12
        )
    _report(8, "planted profile reaches theta >= k/2; replication optimum exact for w in {1,2,3}")


def test_criterion_09_ug_reduction():
    ug = UgInstance(2, 2, ((0, 1, (0, 1)),))
    inst, mapping = ug_to_intermediate(ug)
    assert mapping.eta == 3.2768e10
    prof = dictator_profile(ug, PartialLabeling((0, 0)))
    t, l, l1 = reduction_components(ug, prof)
    assert l == 0.0
    assert eval_qp_intermediate(inst, mapping.embed(prof)).value >= 1.0 - 1e-12
    rng = rng_for(5)
    for r in range(1, 11):
        tables = rng.uniform(-1, 1, size=(100, 2**r))
        coeffs = fwht(tables) / 2**r
        assert np.max(np.abs(np.sum(coeffs**2, axis=1) - np.mean(tables**2, axis=1))) <= 1e-10
    total = 0
    for r in (4, 6, 8):
        srng = rng_for(99, r)
        remaining = 33_334
        while remaining > 0:
            batch = min(remaining, 20_000)
            assert bool(np.all(check_smallball_batch(srng.uniform(-1, 1, (batch, 2**r)))))
            total += batch
            remaining -= batch
    assert total >= 100_000
    _report(9, "eta exact; dictator ratio >= 1 with zero penalty; Parseval 10^3 fns; small-ball 10^5 fns")


def test_criterion_10_intermediate_to_ratio():
    cases = [
        (QpIntermediateInstance(2, ((0, 1, 1.0),), (0.0, 0.0)), 1.0),
        (QpIntermediateInstance(2, ((0, 1, 1.0),), (-0.5, -0.5)), 1.5),
        (QpIntermediateInstance(2, ((0, 1, -0.8),), (-0.3, 0.0)), 0.95),
    ]
    for inst, eps in cases:
        img, m = intermediate_to_qpratio(inst, eps)
        assert inst.n * m <= 10
        _, grid = grid_search_intermediate(inst, eps=min(0.05, eps / 4.0))
        _, brute = brute_force_qp_ratio(img, cap=12)
        assert abs(grid.value - brute.value) <= eps
    _report(10, "three two-variable splits: |grid optimum - split optimum| <= eps")


def test_criterion_11_csp_embedding():
    count = 0
    for seed in range(20):
        inst = random_instance(4 + seed % 5, seed=seed + 900)
        if seed % 2 == 0:
            sol = embed_assignment(inst, brute_force_qp_ratio(inst)[0])
        else:
            rng = rng_for(77, seed)
            lengths = rng.uniform(0.1, 1.0, inst.n)
            lengths /= lengths.sum()
            sol = GramSolution.build(inst, np.diag(np.sqrt(lengths)))
        rep = embed_basic_sdp_to_csp(sol, inst, tol=1e-10)
        assert rep.ok, rep
        assert rep.objective_delta <= 1e-10
        count += 1
    assert count == 20
    _report(11, "three-vector lift verified to 1e-10 with exact objective match on 20 solutions")


def test_criterion_12_bench_determinism(tmp_path):
    cfg = {
        "seed": 1,
        "cap": 10,
        "algos": ["general", "trevisan"],
        "out_csv": str(tmp_path / "bench.csv"),
        "instances": [
            {"family": "star", "leaves": 5},
            {"family": "random", "n": 6, "seed": 1},
        ],
    }
    cfg_path = tmp_path / "smoke.json"
    cfg_path.write_text(json.dumps(cfg))
    assert cli_main(["bench", str(cfg_path)]) == 0
    first = (tmp_path / "bench.csv").read_bytes()
    assert cli_main(["bench", str(cfg_path)]) == 0
    assert (tmp_path / "bench.csv").read_bytes() == first
    _report(12, "smoke benchmark rerun produced byte-identical CSV")
