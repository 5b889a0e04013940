"""Quadrature, monotone bijections, Young's inequality, and the 1-D battery."""

from __future__ import annotations

import math

import numpy as np
import pytest

from monosplit.core import GammaSet, gamma_1d
from monosplit.errors import (
    InputValidationError,
    InversionFailure,
    NotOneDimensional,
)
from monosplit.onedim import (
    MonotoneBijection,
    characterize_1d,
    curve_potentials,
    emit_curve_figure_data,
    integral_from_zero,
    knott_smith_alphas,
    knott_smith_forms,
    knott_smith_potentials,
    signed_power,
    young_check,
)


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def test_integral_oracles():
    v, e = integral_from_zero(lambda t: signed_power(t, 1.0 / 3.0), 1.0)
    assert v == pytest.approx(0.75, abs=1e-9)  # cube-root antiderivative
    assert e >= 0.0
    v, e = integral_from_zero(lambda t: t**3, 2.0)
    assert v == pytest.approx(4.0, abs=1e-12)  # Simpson is exact on cubics
    v, _ = integral_from_zero(lambda t: t * t, -1.0)
    assert v == pytest.approx(-1.0 / 3.0, abs=1e-12)
    assert integral_from_zero(lambda t: t, 0.0) == (0.0, 0.0)


def test_riemann_bracket_is_rigorous_for_monotone_integrands():
    for x, exact in ((0.5, (0.5) ** (4 / 3) * 0.75), (1.0, 0.75), (2.0, 2 ** (4 / 3) * 0.75)):
        v, e = integral_from_zero(lambda t: signed_power(t, 1.0 / 3.0), x)
        assert abs(v - exact) <= e


# ---------------------------------------------------------------------------
# Monotone bijections
# ---------------------------------------------------------------------------


def test_builtin_bijections_have_analytic_inverses():
    ident = MonotoneBijection.identity()
    cube = MonotoneBijection.odd_power(3.0)
    assert ident.inverse(0.7) == 0.7
    assert cube.inverse(0.0) == 0.0
    for x in (-1.7, -0.3, 0.4, 2.2):
        assert cube.inverse(cube(x)) == pytest.approx(x, abs=1e-12)
        assert cube(-x) == -cube(x)


def test_custom_bijection_falls_back_to_bisection():
    g = MonotoneBijection(lambda t: t + t**3, label="t+t^3")
    assert g.inverse(2.0) == pytest.approx(1.0, abs=1e-11)
    assert g.inverse(-10.0) == pytest.approx(-2.0, abs=1e-11)


def test_bounded_map_cannot_be_inverted_beyond_its_range():
    g = MonotoneBijection(math.tanh, label="tanh")
    with pytest.raises(InversionFailure):
        g.inverse(2.0)


def test_bijection_validation():
    with pytest.raises(InputValidationError):
        MonotoneBijection(lambda t: t + 1.0)  # fn(0) != 0
    with pytest.raises(InputValidationError):
        MonotoneBijection(lambda t: -t)  # decreasing
    with pytest.raises(InputValidationError):
        MonotoneBijection(lambda t: t, inverse_fn=lambda t: t + 0.1)
    with pytest.raises(InputValidationError):
        MonotoneBijection.odd_power(0.0)


def test_signed_power_conventions():
    assert signed_power(-8.0, 1.0 / 3.0) == pytest.approx(-2.0, abs=1e-15)
    assert signed_power(0.0, 0.5) == 0.0
    assert signed_power(-1.5, 2.0) == -2.25  # odd extension, not the square


# ---------------------------------------------------------------------------
# Young's inequality
# ---------------------------------------------------------------------------


def test_young_strict_case_for_the_cubic():
    res = young_check(MonotoneBijection.odd_power(3.0), 2.0, 1.0)
    assert res.lhs == 2.0
    assert res.rhs == pytest.approx(4.75, abs=1e-9)
    assert not res.equality
    assert res.gap == pytest.approx(2.75, abs=1e-9)


def test_young_equality_on_the_graph():
    g = MonotoneBijection.odd_power(3.0)
    res = young_check(g, 1.3, g(1.3))
    assert res.equality
    assert abs(res.gap) <= 1e-9


def test_young_negative_quadrants():
    ident = MonotoneBijection.identity()
    eq = young_check(ident, -1.0, -1.0)
    assert eq.equality and abs(eq.gap) <= 1e-12
    strict = young_check(ident, -2.0, 3.0)
    assert strict.lhs == -6.0
    assert strict.rhs == pytest.approx(6.5, abs=1e-9)


def test_young_random_equality_cases(rng):
    for _ in range(20):
        p = float(rng.choice((1.0, 3.0, 5.0)))
        g = MonotoneBijection.odd_power(p)
        a = float(rng.uniform(-2.0, 2.0))
        res = young_check(g, a, g(a))
        assert res.equality
        assert abs(res.gap) <= 1e-9


# ---------------------------------------------------------------------------
# The (t, t^3, t^5) curve
# ---------------------------------------------------------------------------


def test_closed_form_spot_values():
    vals = knott_smith_potentials(1.0, 1.0, 1.0)
    assert sum(vals.u) == pytest.approx(3.0, abs=1e-12)
    assert vals.c1_value == 3.0
    assert abs(vals.c1_slack) <= 1e-12
    assert sum(vals.starred) == pytest.approx(4.5, abs=1e-12)
    assert abs(vals.c3_slack) <= 1e-12


def test_closed_forms_vanish_exactly_on_the_curve():
    for t in (-1.2, -0.3, 0.0, 0.7):
        vals = knott_smith_potentials(t, t**3, t**5)
        assert abs(vals.c1_slack) <= 1e-12
        assert abs(vals.c3_slack) <= 1e-12


def test_closed_form_slack_is_nonnegative_off_the_curve(rng):
    off = knott_smith_potentials(1.0, 0.0, 0.0)
    assert off.c1_slack == pytest.approx(5.0 / 12.0, abs=1e-12)
    for _ in range(50):
        x1, x2, x3 = rng.uniform(-1.5, 1.5, size=3)
        vals = knott_smith_potentials(float(x1), float(x2), float(x3))
        assert vals.c1_slack >= -1e-12
        assert vals.c3_slack >= -1e-12


def test_shifted_forms_dominate_on_a_dense_cube():
    # 41^3 sweep of [-2,2]^3: the shifted sum must dominate half the squared
    # coordinate total everywhere, with equality exactly where the cube's
    # lattice meets the curve (t, t^3, t^5): the origin and (±1, ±1, ±1).
    _, starred = knott_smith_forms()
    axis = np.linspace(-2.0, 2.0, 41)
    lifted = [
        np.array([form.value((float(x),)) for x in axis]) for form in starred
    ]
    total = (
        lifted[0][:, None, None] + lifted[1][None, :, None] + lifted[2][None, None, :]
    )
    coord_sum = axis[:, None, None] + axis[None, :, None] + axis[None, None, :]
    slack = total - 0.5 * coord_sum**2
    assert slack.min() >= -1e-12
    equality = {
        (float(axis[i]), float(axis[j]), float(axis[k]))
        for i, j, k in np.argwhere(slack <= 1e-6)
    }
    assert equality == {(-1.0, -1.0, -1.0), (0.0, 0.0, 0.0), (1.0, 1.0, 1.0)}


def test_quadrature_matches_closed_forms_on_a_grid():
    alphas = knott_smith_alphas()
    grid = [-1.5 + 0.25 * k for k in range(13)]
    cp = curve_potentials(alphas, grid)
    forms, _ = knott_smith_forms()
    for pot, form in zip(cp.potentials, forms):
        assert pot.value_at((0.0,)) == 0.0
        for p in pot.points:
            assert pot.value_at(p) == pytest.approx(form.value(p), abs=1e-8)
    assert all(b >= 0.0 for b in cp.error_bounds)


def test_curve_potentials_validation():
    with pytest.raises(InputValidationError):
        curve_potentials(knott_smith_alphas()[:1], [0.0, 1.0])
    with pytest.raises(InputValidationError):
        curve_potentials(knott_smith_alphas(), [])


# ---------------------------------------------------------------------------
# The 1-D equivalence battery
# ---------------------------------------------------------------------------


def test_battery_on_a_comonotone_set():
    g = gamma_1d([[-1.0, -2.0, 0.0], [0.0, 0.0, 0.5], [2.0, 1.0, 3.0]])
    for which, label in (("c1", "c1"), ("c2", "-c2"), ("c3", "c3")):
        report = characterize_1d(g, which_cost=which, n_max=3)
        assert report.verdict
        assert all(report.items())
        assert report.cost_label == label
        assert report.witness is None


def test_battery_on_a_violating_set():
    g = gamma_1d([[0.0, 0.0, 0.0], [1.0, -1.0, 2.0]])
    report = characterize_1d(g, which_cost="c1", n_max=3)
    assert not report.verdict
    assert not any(report.items())
    assert report.witness is not None
    assert report.witness["kind"] == "signs"


def test_battery_on_curve_samples():
    ts = [-1.0 + 0.5 * k for k in range(5)]
    g = gamma_1d([[t, t**3, t**5] for t in ts])
    for which in ("c1", "c2", "c3"):
        assert characterize_1d(g, which_cost=which, n_max=3).verdict


def test_battery_input_validation():
    flat = GammaSet.from_points([[(0.0, 0.0), (0.0, 0.0)]])
    with pytest.raises(NotOneDimensional):
        characterize_1d(flat)
    with pytest.raises(InputValidationError):
        characterize_1d(gamma_1d([[0.0, 0.0]]), which_cost="c9")


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------


def test_figure_csv_layout():
    text = emit_curve_figure_data(knott_smith_alphas(), (-1.0, 1.0), 5)
    lines = text.strip().split("\n")
    assert lines[0] == (
        "t,x1,x2,x3,pair_1_2_x,pair_1_2_y,pair_1_3_x,pair_1_3_y,pair_2_3_x,pair_2_3_y"
    )
    assert len(lines) == 6
    assert text.endswith("\n")
    first = [float(v) for v in lines[1].split(",")]
    last = [float(v) for v in lines[-1].split(",")]
    assert first[0] == -1.0 and last[0] == 1.0
    mid = [float(v) for v in lines[3].split(",")]
    assert mid[1] == 0.0 and mid[2] == 0.0  # curve passes through the origin
    assert last[2] == pytest.approx(last[1] ** 3, abs=1e-15)
    with pytest.raises(InputValidationError):
        emit_curve_figure_data(knott_smith_alphas(), (-1.0, 1.0), 1)
