"""Chain antiderivatives, discrete conjugation, and the potential type."""

from __future__ import annotations

import math

import pytest

from helpers import bruteforce_cycle_gain, chain_enumeration_oracle, make_random_pairs
from monosplit.antiderivative import (
    Potential,
    c_conjugate,
    c_subdifferential_graph,
    rockafellar_potential,
    verify_antiderivative,
)
from monosplit.core import PairwiseCost, QuadraticForm, as_vec
from monosplit.errors import (
    BasePointNotInProjection,
    ImproperInput,
    InputValidationError,
    NotCyclicallyMonotone,
    ParseError,
)

INNER = PairwiseCost.inner_product()
HALF_SQ = PairwiseCost.half_sq_dist()


def _identity_pairs():
    return [((float(t),), (float(t),)) for t in (-1, 0, 1, 2)]


def test_identity_pairs_frozen_table():
    grid = [(-1.0,), (0.0,), (1.0,), (2.0,)]
    r = rockafellar_potential(INNER, _identity_pairs(), (0.0,), grid)
    assert dict(zip(r.points, r.values)) == {
        (-1.0,): 0.0,
        (0.0,): 0.0,
        (1.0,): 0.0,
        (2.0,): 1.0,
    }


def test_base_value_is_exact_zero():
    r = rockafellar_potential(INNER, _identity_pairs(), (0.0,), [(0.0,)])
    assert r.value_at((0.0,)) == 0.0


def test_matches_chain_enumeration_oracle(rng):
    for _ in range(25):
        pairs = make_random_pairs(rng, m=5, monotone=True)
        base = pairs[0][0]
        evals = [p[0] for p in pairs] + [(-3.0,), (0.25,), (3.0,)]
        r = rockafellar_potential(INNER, pairs, base, evals)
        for x in r.points:
            expect = chain_enumeration_oracle(INNER, pairs, base, x)
            assert r.value_at(x) == pytest.approx(expect, abs=1e-9)


def test_oracle_agreement_under_squared_distance(rng):
    # antitone relations are the monotone ones for the distance coupling
    for _ in range(10):
        pairs = make_random_pairs(rng, m=4, monotone=True)
        xs = sorted(p[0] for p in pairs)
        ys = sorted((p[1] for p in pairs), reverse=True)
        anti = list(zip(xs, ys))
        base = anti[0][0]
        evals = [p[0] for p in anti] + [(5.0,)]
        r = rockafellar_potential(HALF_SQ, anti, base, evals)
        for x in r.points:
            expect = chain_enumeration_oracle(HALF_SQ, anti, base, x)
            assert r.value_at(x) == pytest.approx(expect, abs=1e-9)


def test_refuses_positive_cycle_with_diagnostics():
    anti = [((0.0,), (1.0,)), ((1.0,), (0.0,))]
    with pytest.raises(NotCyclicallyMonotone) as exc:
        rockafellar_potential(INNER, anti, (0.0,), [(0.0,)])
    assert exc.value.gain == pytest.approx(bruteforce_cycle_gain(INNER, anti), abs=1e-12)
    assert sorted(exc.value.cycle) == [0, 1]


def test_properness_failure_iff_positive_cycle(rng):
    raised_count = 0
    for _ in range(50):
        pairs = make_random_pairs(rng, m=4)
        gain = bruteforce_cycle_gain(INNER, pairs)
        base = pairs[0][0]
        try:
            rockafellar_potential(INNER, pairs, base, [base])
            raised = False
        except NotCyclicallyMonotone:
            raised = True
        assert raised == (gain > 1e-9)
        raised_count += raised
    assert 0 < raised_count < 50  # both branches exercised


def test_base_must_appear_in_first_projection():
    with pytest.raises(BasePointNotInProjection):
        rockafellar_potential(INNER, _identity_pairs(), (0.5,), [(0.0,)])


def test_conjugate_of_tabulated_quadratic():
    grid = [(-2.0 + 0.25 * k,) for k in range(17)]
    f = Potential(tuple(grid), tuple(0.5 * p[0] ** 2 for p in grid))
    conj = c_conjugate(f, INNER, grid)
    for y, v, a in zip(conj.points, conj.values, conj.argmax):
        assert v == pytest.approx(0.5 * y[0] ** 2, abs=1e-12)
        assert f.points[a] == y  # maximiser sits at x = y on this grid


def test_conjugate_breaks_ties_toward_lowest_index():
    f = Potential(((-1.0,), (1.0,)), (0.0, 0.0))
    conj = c_conjugate(f, INNER, [(0.0,)])
    assert conj.values == (0.0,)
    assert conj.argmax == (0,)


def test_conjugate_ignores_infinite_entries():
    f = Potential(((0.0,), (1.0,)), (math.inf, 3.0))
    conj = c_conjugate(f, INNER, [(2.0,), (0.0,)])
    assert conj.values == (-1.0, -3.0)
    assert conj.argmax == (1, 1)


def test_conjugate_requires_a_finite_value():
    f = Potential(((0.0,), (1.0,)), (math.inf, math.inf))
    with pytest.raises(ImproperInput):
        c_conjugate(f, INNER, [(0.0,)])


def test_young_fenchel_and_graph_inclusion(rng):
    for _ in range(20):
        pairs = make_random_pairs(rng, m=5, monotone=True)
        base = pairs[0][0]
        xs = [p[0] for p in pairs]
        ys = [p[1] for p in pairs]
        r = rockafellar_potential(INNER, pairs, base, xs)
        conj = c_conjugate(r, INNER, ys + [(-2.5,), (2.5,)])
        for x in r.points:
            for y in conj.points:
                lhs = r.value_at(x) + conj.value_at(y)
                assert lhs >= INNER.value(x, y) - 1e-9
        graph = c_subdifferential_graph(r, INNER, pairs)
        assert set(graph.pairs) == {(as_vec(x), as_vec(y)) for x, y in pairs}
        assert all(abs(res) <= 1e-9 for res in graph.residuals)


def test_subdifferential_graph_drops_off_table_points():
    r = rockafellar_potential(INNER, _identity_pairs(), (0.0,), [(0.0,), (1.0,)])
    graph = c_subdifferential_graph(r, INNER, [((0.0,), (0.0,)), ((9.0,), (9.0,))])
    assert graph.pairs == (((0.0,), (0.0,)),)


def test_verify_antiderivative_accepts_the_construction(rng):
    for _ in range(20):
        pairs = make_random_pairs(rng, m=5, monotone=True)
        base = pairs[0][0]
        r = rockafellar_potential(INNER, pairs, base, [p[0] for p in pairs])
        check = verify_antiderivative(r, pairs, INNER)
        assert check.holds
        assert abs(check.max_residual) <= 1e-9


def test_verify_antiderivative_rejects_flat_potential():
    pairs = [((0.0,), (1.0,)), ((1.0,), (5.0,))]
    flat = Potential(((0.0,), (1.0,)), (0.0, 0.0))
    check = verify_antiderivative(flat, pairs, INNER)
    assert not check.holds
    assert check.max_residual == 1.0  # probe x1'=1 against the pair (0, 1)


def test_verify_antiderivative_fails_on_missing_point():
    flat = Potential(((0.0,),), (0.0,))
    check = verify_antiderivative(flat, [((1.0,), (1.0,))], INNER)
    assert not check.holds
    assert check.max_residual == math.inf


def test_potential_json_roundtrip_with_inf_and_argmax():
    p = Potential(((0.0,), (1.0,)), (1.5, math.inf), argmax=(0, 1))
    q = Potential.from_json(p.to_json())
    assert q.points == p.points
    assert q.values == p.values
    assert q.argmax == (0, 1)
    with pytest.raises(ParseError):
        Potential.from_json({"values": [0.0]})


def test_potential_closed_form_roundtrip_and_fallback():
    form = QuadraticForm(((2.0,),))
    p = Potential.from_closed_form(form)
    assert p.is_proper
    q = Potential.from_json(p.to_json())
    assert q.value_at((3.0,)) == p.value_at((3.0,))
    bare = Potential(((0.0,),), (0.0,))
    assert bare.value_at((1.0,)) == math.inf  # off the table, no closed form


def test_potential_validation_rules():
    with pytest.raises(InputValidationError):
        Potential(((0.0,), (0.0,)), (1.0, 2.0))  # duplicate point
    with pytest.raises(InputValidationError):
        Potential(((0.0,),), (-math.inf,))
    with pytest.raises(InputValidationError):
        Potential(((0.0,),), (float("nan"),))
    with pytest.raises(InputValidationError):
        Potential(((0.0,),), (0.0,), argmax=(0, 1))
    form = QuadraticForm(((2.0,),))
    with pytest.raises(InputValidationError):
        Potential(((1.0,),), (5.0,), closed_form=form)  # table disagrees
