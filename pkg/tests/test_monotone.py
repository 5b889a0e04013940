"""Monotonicity verifiers: brute force, cycle scan, pair checks, signs."""

from __future__ import annotations

import numpy as np
import pytest

from helpers import (
    bruteforce_cycle_gain,
    make_comonotone_gamma,
    make_random_gamma,
    make_random_pairs,
)
from monosplit.core import (
    GammaSet,
    PairwiseCost,
    classical_cost,
    gamma_1d,
)
from monosplit.errors import OrderTooLarge
from monosplit.monotone import (
    brute_force_optimal_coupling,
    check_projection_condition,
    is_c_monotone,
    is_n_c_monotone_bruteforce,
    is_pair_monotone_classical,
    is_two_marginal_cyclically_monotone,
    recheck_witness,
    scan_gain_digraph,
    sign_criterion_1d,
)

INNER = PairwiseCost.inner_product()


def test_comonotone_sets_pass_everything(rng):
    for _ in range(5):
        g = make_comonotone_gamma(rng, n_marginals=3, size=4)
        spec = classical_cost("c1", 3, 1)
        for order in (2, 3, 4):
            assert is_n_c_monotone_bruteforce(g, spec, order).holds
        assert is_c_monotone(g, spec).holds
        assert sign_criterion_1d(g).holds
        assert check_projection_condition(g, spec).all_hold


def test_antitone_pair_fails_with_witness():
    g = gamma_1d([[0.0, 1.0], [1.0, 0.0]])
    spec = classical_cost("c1", 2, 1)
    verdict = is_n_c_monotone_bruteforce(g, spec, 2)
    assert not verdict.holds
    w = verdict.witness
    assert w.gain > 0
    permuted, diagonal = recheck_witness(w, spec)
    assert permuted == pytest.approx(w.permuted_sum, abs=1e-12)
    assert diagonal == pytest.approx(w.diagonal_sum, abs=1e-12)


def test_witness_recheck_on_random_failures(rng):
    found = 0
    spec = classical_cost("c1", 3, 1)
    for _ in range(50):
        g = make_random_gamma(rng, size=4)
        verdict = is_n_c_monotone_bruteforce(g, spec, 3)
        if verdict.holds:
            continue
        found += 1
        permuted, diagonal = recheck_witness(verdict.witness, spec)
        assert permuted == pytest.approx(verdict.witness.permuted_sum, abs=1e-9)
        assert diagonal == pytest.approx(verdict.witness.diagonal_sum, abs=1e-9)
        assert permuted > diagonal + verdict.tolerance
    assert found > 0


def test_order_one_always_holds(rng):
    g = make_random_gamma(rng, size=3)
    assert is_n_c_monotone_bruteforce(g, classical_cost("c1", 3, 1), 1).holds


def test_repetition_allowed_beyond_set_size():
    g = gamma_1d([[t, t, t] for t in (-1.0, 0.0, 1.0)])
    spec = classical_cost("c1", 3, 1)
    assert is_n_c_monotone_bruteforce(g, spec, 4).holds  # order > |g|


def test_order_too_large_guards():
    g = gamma_1d([[0.0, 0.0]])
    spec = classical_cost("c1", 2, 1)
    with pytest.raises(OrderTooLarge):
        is_n_c_monotone_bruteforce(g, spec, 8)
    big = gamma_1d([[float(k), float(k)] for k in range(30)])
    with pytest.raises(OrderTooLarge):
        is_n_c_monotone_bruteforce(big, spec, 7, budget=1000)
    wide = GammaSet.from_points([[0.0] * 5])
    with pytest.raises(OrderTooLarge):
        is_n_c_monotone_bruteforce(wide, classical_cost("c1", 5, 1), 2)


def test_is_c_monotone_equals_order_two_brute(rng):
    for which in ("c1", "c2", "c3"):
        spec = classical_cost(which, 3, 1)
        for _ in range(30):
            g = make_random_gamma(rng, size=4)
            assert (
                is_c_monotone(g, spec).holds
                == is_n_c_monotone_bruteforce(g, spec, 2).holds
            )


def test_cycle_scan_matches_exhaustive_cycles(rng):
    for _ in range(60):
        pairs = make_random_pairs(rng, m=5)
        scan = scan_gain_digraph([p[0] for p in pairs], [p[1] for p in pairs], INNER)
        oracle = bruteforce_cycle_gain(INNER, pairs)
        if oracle <= 1e-9:
            assert scan.cycle is None
        else:
            assert scan.cycle is not None
            # the scan reports the first positive cycle, not the best one
            assert 1e-9 < scan.cycle_gain <= oracle + 1e-12


def test_two_marginal_verdict_matches_brute_force(rng):
    for _ in range(50):
        pairs = make_random_pairs(rng, m=4)
        verdict = is_two_marginal_cyclically_monotone(pairs, INNER)
        g = GammaSet.from_points([[p[0][0], p[1][0]] for p in pairs])
        spec = classical_cost("c1", 2, 1)
        brute = all(
            is_n_c_monotone_bruteforce(g, spec, k).holds for k in range(2, g.size + 1)
        )
        assert verdict.holds == brute


def test_pair_monotone_classical_witness_value():
    verdict = is_pair_monotone_classical([((1.0,), (0.0,)), ((0.0,), (1.0,))])
    assert not verdict.holds
    assert verdict.witness.value == -1.0
    assert is_pair_monotone_classical([((0.0,), (0.0,)), ((1.0,), (2.0,))]).holds


def test_sign_criterion_matches_bruteforce(rng):
    spec = classical_cost("c1", 3, 1)
    agree = 0
    for _ in range(60):
        g = make_random_gamma(rng, size=3)
        signs = sign_criterion_1d(g)
        brute = all(
            is_n_c_monotone_bruteforce(g, spec, k).holds for k in range(2, g.size + 1)
        )
        assert signs.holds == brute
        agree += 1
    assert agree == 60


def test_sign_criterion_witness_has_mixed_signs():
    g = gamma_1d([[0.0, 0.0, 0.0], [1.0, -1.0, 2.0]])
    verdict = sign_criterion_1d(g)
    assert not verdict.holds
    assert verdict.witness.kind == "signs"


def test_projection_condition_reports_failing_pair():
    g = gamma_1d([[0.0, 0.0, 0.0], [1.0, 1.0, -1.0]])
    report = check_projection_condition(g, classical_cost("c1", 3, 1))
    assert not report.all_hold
    assert not report.verdicts[(1, 3)].holds
    assert not report.verdicts[(2, 3)].holds
    assert report.verdicts[(1, 2)].holds


def test_brute_force_optimal_coupling_identity_attains():
    spec = classical_cost("c1", 2, 1)
    coup = brute_force_optimal_coupling([[0.0, 1.0], [0.0, 1.0]], spec)
    assert coup.diagonal_attains()
    assert coup.value == 1.0
    anti = brute_force_optimal_coupling([[0.0, 1.0], [1.0, 0.0]], spec)
    assert anti.value == 1.0  # optimum re-sorts the antitone assignment
    assert not anti.diagonal_attains()
