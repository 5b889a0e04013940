"""One-dimensional specialization: sign tests, curve potentials, Young.

On the real line with the inner-product cost (equivalently its negated
half-squared-distance and shifted variants), cyclic monotonicity of any
order collapses to plain comonotonicity, projection by projection.  The
battery in :func:`characterize_1d` evaluates six equivalent formulations
of this fact on a finite set and insists they agree; a disagreement is an
implementation bug, never a property of the input.

Curves (a_1(t), ..., a_N(t)) built from continuous, strictly increasing,
onto maps with a_i(0) = 0 are the canonical monotone sets.  Their
potentials

    u_i(x) = integral_0^x  sum_{k != i} a_k(a_i^{-1}(t)) dt

are tabulated by composite Simpson quadrature with geometric grading into
t = 0, where compositions like t^(1/3) have unbounded derivatives; each
integrand is increasing, so a rigorous Riemann bracket accompanies every
tabulated value.  Young's inequality is evaluated through the exact
complement-area identity

    integral_0^b g^{-1} = b g^{-1}(b) - integral_0^{g^{-1}(b)} g,

so the possibly singular inverse is never integrated numerically.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .antiderivative import Potential, rockafellar_potential, verify_antiderivative
from .core import EvenPowerForm, GammaSet, classical_cost, project, project_pair
from .errors import (
    InputValidationError,
    InternalInconsistency,
    InversionFailure,
    NotCyclicallyMonotone,
    NotOneDimensional,
    ProjectionNotMonotone,
)
from .monotone import (
    DEFAULT_TOL,
    is_n_c_monotone_bruteforce,
    is_pair_monotone_classical,
    is_two_marginal_cyclically_monotone,
    sign_criterion_1d,
)
from .splitting import assemble_splitting_tuple, certify_splitting

PANELS_PER_UNIT = 1024  # 2**10 Simpson subintervals per unit length
GRADE_PIECES = 48  # geometric halvings toward 0
GRADE_PANELS = 64  # Simpson panels per geometric piece
GRADE_LIMIT = 1.0  # grade [0, 1], integrate plainly beyond
INVERSE_TOL = 1e-12
ZERO_TOL = 1e-12
BRACKET_GROWTH = 2.0
MAX_BRACKET_STEPS = 200


@dataclass(frozen=True)
class MonotoneBijection:
    """A declared strictly increasing bijection of the line with fn(0) = 0.

    The declaration is spot-checked on a probe grid at construction.  The
    inverse uses the analytic inverse_fn when one is supplied (the built-in
    constructors do) and otherwise bisection on a geometrically grown
    bracket.
    """

    fn: Callable[[float], float]
    label: str = "g"
    probe: tuple[float, ...] = (-8.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 8.0)
    inverse_fn: Callable[[float], float] | None = None

    def __post_init__(self):
        if abs(self.fn(0.0)) > ZERO_TOL:
            raise InputValidationError(
                f"{self.label}(0) = {self.fn(0.0)!r}, expected 0"
            )
        vals = [self.fn(t) for t in self.probe]
        for a, b in zip(vals, vals[1:]):
            if not b > a:
                raise InputValidationError(
                    f"{self.label} is not strictly increasing on the probe grid"
                )
        if self.inverse_fn is not None:
            for t in self.probe:
                if abs(self.inverse_fn(self.fn(t)) - t) > 1e-9 * max(1.0, abs(t)):
                    raise InputValidationError(
                        f"declared inverse of {self.label} fails at {t!r}"
                    )

    def __call__(self, t: float) -> float:
        return self.fn(t)

    @classmethod
    def identity(cls) -> "MonotoneBijection":
        return cls(lambda t: t, label="t", inverse_fn=lambda t: t)

    @classmethod
    def odd_power(cls, p: float) -> "MonotoneBijection":
        """t |-> sign(t) |t|^p, the odd-root convention for fractional p."""
        if p <= 0:
            raise InputValidationError("the exponent must be positive")
        return cls(
            lambda t: signed_power(t, p),
            label=f"t^{p:g}",
            inverse_fn=lambda t: signed_power(t, 1.0 / p),
        )

    def inverse(self, y: float, tol: float = INVERSE_TOL) -> float:
        """Solve fn(x) = y; analytic when declared, else bisection; exact 0
        at y = 0."""
        if y == 0.0:
            return 0.0
        if self.inverse_fn is not None:
            return self.inverse_fn(y)
        lo, hi = -1.0, 1.0
        steps = 0
        while self.fn(hi) < y:
            lo, hi = hi, hi * BRACKET_GROWTH
            steps += 1
            if steps > MAX_BRACKET_STEPS:
                raise InversionFailure(f"no upper bracket for {self.label} = {y!r}")
        while self.fn(lo) > y:
            lo, hi = lo * BRACKET_GROWTH, lo
            steps += 1
            if steps > MAX_BRACKET_STEPS:
                raise InversionFailure(f"no lower bracket for {self.label} = {y!r}")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if self.fn(mid) < y:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


def signed_power(t: float, p: float) -> float:
    """Odd extension of the power map: sign(t) |t|^p."""
    if t == 0.0:
        return 0.0
    return math.copysign(abs(t) ** p, t)


def _simpson_fixed(fn, a: float, b: float, panels: int) -> tuple[float, float]:
    """Composite Simpson with a fixed even panel count; signed.

    The second return value is the Riemann bracket |h| |fn(b) - fn(a)|,
    a rigorous error bound when fn is monotone on [a, b].
    """
    if a == b:
        return 0.0, 0.0
    n = panels + (panels % 2)
    h = (b - a) / n
    fa, fb = fn(a), fn(b)
    total = fa + fb
    for k in range(1, n):
        total += (4.0 if k % 2 else 2.0) * fn(a + k * h)
    return total * h / 3.0, abs(h) * abs(fb - fa)


def _simpson_per_unit(fn, a: float, b: float) -> tuple[float, float]:
    n = max(2, 2 * math.ceil(abs(b - a) * PANELS_PER_UNIT / 2))
    return _simpson_fixed(fn, a, b, n)


def _graded_from_zero(fn, x: float) -> tuple[float, float]:
    """integral_0^x fn with geometric refinement into 0; |x| <= GRADE_LIMIT.

    Piece edges are x 2^{-j}; the innermost sliver [0, x 2^{-J}] is closed
    by a trapezoid whose bracket is included in the returned bound.
    """
    if x == 0.0:
        return 0.0, 0.0
    value = 0.0
    bound = 0.0
    inner = x * 2.0**-GRADE_PIECES
    f0, fi = fn(0.0), fn(inner)
    value += 0.5 * inner * (f0 + fi)
    bound += 0.5 * abs(inner) * abs(fi - f0)
    for j in range(GRADE_PIECES, 0, -1):
        lo = x * 2.0**-j
        hi = x * 2.0 ** -(j - 1)
        v, e = _simpson_fixed(fn, lo, hi, GRADE_PANELS)
        value += v
        bound += e
    return value, bound


def integral_from_zero(fn, x: float) -> tuple[float, float]:
    """integral_0^x fn for fn continuous, with grading near 0.

    Returns (value, bound); the bound is rigorous when fn is monotone.
    """
    if x == 0.0:
        return 0.0, 0.0
    s = math.copysign(1.0, x)
    if abs(x) <= GRADE_LIMIT:
        return _graded_from_zero(fn, x)
    v1, e1 = _graded_from_zero(fn, s * GRADE_LIMIT)
    v2, e2 = _simpson_per_unit(fn, s * GRADE_LIMIT, x)
    return v1 + v2, e1 + e2


@dataclass(frozen=True)
class CurvePotentials:
    """Tabulated curve potentials with per-marginal quadrature brackets."""

    potentials: tuple[Potential, ...]
    error_bounds: tuple[float, ...]


def curve_potentials(
    alphas: Sequence[MonotoneBijection], grid: Sequence[float]
) -> CurvePotentials:
    """Tabulate u_i(x) = integral_0^x sum_{k != i} a_k(a_i^{-1}(t)) dt.

    Every knot is integrated independently from 0 with the graded scheme,
    so fractional-power behaviour at the origin never meets a coarse
    panel, no matter how the knots cluster.  u_i(0) = 0 exactly.  The
    reported bound for each marginal is the largest Riemann bracket over
    the grid; the integrands are increasing, so the bracket is rigorous.
    """
    n = len(alphas)
    if n < 2:
        raise InputValidationError("need at least two curve components")
    knots = sorted({float(t) for t in grid})
    if not knots:
        raise InputValidationError("the grid must be nonempty")

    pots = []
    bounds = []
    for i in range(n):
        others = [alphas[k] for k in range(n) if k != i]
        inv = alphas[i].inverse

        def integrand(t: float, _others=others, _inv=inv) -> float:
            s = _inv(t)
            return sum(a(s) for a in _others)

        values = []
        worst = 0.0
        for t in knots:
            v, e = integral_from_zero(integrand, t)
            values.append(v)
            worst = max(worst, e)
        pots.append(Potential(tuple((t,) for t in knots), tuple(values)))
        bounds.append(worst)
    return CurvePotentials(tuple(pots), tuple(bounds))


@dataclass(frozen=True)
class YoungCheck:
    """lhs = ab, rhs = integral_0^a g + integral_0^b g^{-1}, and whether the
    equality case b = g(a) holds within tolerance."""

    lhs: float
    rhs: float
    equality: bool
    quadrature_bound: float

    @property
    def gap(self) -> float:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "equality": self.equality,
            "quadrature_bound": self.quadrature_bound,
        }


def young_check(
    g: MonotoneBijection, a: float, b: float, tol: float = DEFAULT_TOL
) -> YoungCheck:
    """Evaluate ab <= integral_0^a g + integral_0^b g^{-1}.

    The inverse integral is rewritten as b g^{-1}(b) minus an integral of
    g itself, which is exact for increasing g with g(0) = 0 and keeps the
    quadrature on the smooth forward map.  The equality flag tests
    |b - g(a)| <= tol.
    """
    a = float(a)
    b = float(b)
    beta = g.inverse(b)
    i1, e1 = integral_from_zero(g, a)
    i2, e2 = integral_from_zero(g, beta)
    rhs = i1 + b * beta - i2
    return YoungCheck(
        lhs=a * b,
        rhs=rhs,
        equality=abs(b - g(a)) <= tol,
        quadrature_bound=e1 + e2,
    )


def knott_smith_alphas() -> tuple[MonotoneBijection, ...]:
    """The curve components t, t^3, t^5."""
    return (
        MonotoneBijection.identity(),
        MonotoneBijection.odd_power(3.0),
        MonotoneBijection.odd_power(5.0),
    )


def knott_smith_forms() -> tuple[tuple[EvenPowerForm, ...], tuple[EvenPowerForm, ...]]:
    """Closed-form potentials for the curve (t, t^3, t^5) and their
    half-square shifts.

    u_1 = x^4/4 + x^6/6, u_2 = 3|x|^{4/3}/4 + 3|x|^{8/3}/8,
    u_3 = 5|x|^{6/5}/6 + 5|x|^{8/5}/8; the shifted family adds |x|^2/2 to
    each.  Fractional powers use the even |x|^p convention, which is the
    odd-root real branch integrated from 0.
    """
    u1 = EvenPowerForm(((0.25, 4.0), (1.0 / 6.0, 6.0)))
    u2 = EvenPowerForm(((0.75, 4.0 / 3.0), (0.375, 8.0 / 3.0)))
    u3 = EvenPowerForm(((5.0 / 6.0, 6.0 / 5.0), (0.625, 8.0 / 5.0)))
    shift = (0.5, 2.0)
    starred = tuple(
        EvenPowerForm((shift,) + u.terms) for u in (u1, u2, u3)
    )
    return (u1, u2, u3), starred


@dataclass(frozen=True)
class KnottSmithValues:
    """Closed-form evaluations at one product point, with both slacks."""

    u: tuple[float, float, float]
    starred: tuple[float, float, float]
    c1_value: float
    c3_value: float
    c1_slack: float
    c3_slack: float

    def to_json(self) -> dict:
        return {
            "u": list(self.u),
            "starred": list(self.starred),
            "c1_value": self.c1_value,
            "c3_value": self.c3_value,
            "c1_slack": self.c1_slack,
            "c3_slack": self.c3_slack,
        }


def knott_smith_potentials(x1: float, x2: float, x3: float) -> KnottSmithValues:
    """Evaluate the closed forms and both splitting inequalities at a point.

    c1_slack = sum u_i - (x1 x2 + x1 x3 + x2 x3) and
    c3_slack = sum (u_i + q) - |x1 + x2 + x3|^2 / 2; both are nonnegative
    with equality exactly on the curve (t, t^3, t^5).
    """
    (u1f, u2f, u3f), (s1f, s2f, s3f) = knott_smith_forms()
    u = (u1f.value((x1,)), u2f.value((x2,)), u3f.value((x3,)))
    starred = (s1f.value((x1,)), s2f.value((x2,)), s3f.value((x3,)))
    c1v = x1 * x2 + x1 * x3 + x2 * x3
    c3v = 0.5 * (x1 + x2 + x3) ** 2
    return KnottSmithValues(
        u=u,
        starred=starred,
        c1_value=c1v,
        c3_value=c3v,
        c1_slack=sum(u) - c1v,
        c3_slack=sum(starred) - c3v,
    )


@dataclass(frozen=True)
class OneDimReport:
    """Verdicts of the six equivalent monotonicity formulations.

    items: (i) brute-force cyclic monotonicity up to n_max, (ii) the sign
    criterion, (iii) cyclic monotonicity of every pair projection,
    (iv) classical monotonicity of every pair projection, (v) an
    assembled tuple certifies on the product grid of projections,
    (vi) every projection admits a chain antiderivative.
    """

    verdict: bool
    cyclic_bruteforce: bool
    sign_criterion: bool
    projections_cyclic: bool
    projections_monotone: bool
    splitting_certified: bool
    antiderivatives_exist: bool
    cost_label: str
    n_max: int
    witness: dict | None

    def items(self) -> tuple[bool, ...]:
        return (
            self.cyclic_bruteforce,
            self.sign_criterion,
            self.projections_cyclic,
            self.projections_monotone,
            self.splitting_certified,
            self.antiderivatives_exist,
        )

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "items": {
                "cyclic_bruteforce": self.cyclic_bruteforce,
                "sign_criterion": self.sign_criterion,
                "projections_cyclic": self.projections_cyclic,
                "projections_monotone": self.projections_monotone,
                "splitting_certified": self.splitting_certified,
                "antiderivatives_exist": self.antiderivatives_exist,
            },
            "cost": self.cost_label,
            "n_max": self.n_max,
            "witness": self.witness,
        }


def characterize_1d(
    g: GammaSet,
    which_cost: str = "c1",
    n_max: int = 4,
    tol: float = DEFAULT_TOL,
) -> OneDimReport:
    """Run the six-way equivalence battery on a finite 1-D set.

    which_cost selects the inner-product cost, the negated
    half-squared-distance (the equivalence covers -c2, not c2 itself), or
    the shifted variant.  All six verdicts must agree; a disagreement
    raises InternalInconsistency because the six formulations are provably
    equivalent for these costs.
    """
    if any(d != 1 for d in g.dims):
        raise NotOneDimensional("the battery requires one-dimensional marginals")
    n = g.n_marginals
    if which_cost == "c1":
        spec = classical_cost("c1", n, 1)
        label = "c1"
    elif which_cost == "c2":
        spec = classical_cost("c2", n, 1).negated()
        label = "-c2"
    elif which_cost == "c3":
        spec = classical_cost("c3", n, 1)
        label = "c3"
    else:
        raise InputValidationError(f"unknown cost selector {which_cost!r}")

    item_i = True
    for order in range(2, n_max + 1):
        if not is_n_c_monotone_bruteforce(g, spec, order, tol=tol).holds:
            item_i = False
            break

    sign_verdict = sign_criterion_1d(g, tol=tol)
    item_ii = sign_verdict.holds

    inner = classical_cost("c1", 2, 1).pair_cost(1, 2)
    item_iii = True
    item_iv = True
    item_vi = True
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            pairs = project_pair(g, i, j)
            if not is_two_marginal_cyclically_monotone(pairs, inner, tol=tol).holds:
                item_iii = False
            if not is_pair_monotone_classical(pairs).holds:
                item_iv = False
            try:
                f = rockafellar_potential(
                    spec.pair_cost(i, j), pairs, pairs[0][0], [p[0] for p in pairs], tol=tol
                )
                if not verify_antiderivative(f, pairs, spec.pair_cost(i, j), tol=tol).holds:
                    item_vi = False
            except NotCyclicallyMonotone:
                item_vi = False

    try:
        tup = assemble_splitting_tuple(g, spec, tol=tol)
        prod_grid = list(itertools.product(*[project(g, i) for i in range(1, n + 1)]))
        item_v = certify_splitting(
            tup, g, spec, test_points=prod_grid, ineq_tol=tol, eq_tol=tol
        ).passed
    except ProjectionNotMonotone:
        item_v = False

    items = (item_i, item_ii, item_iii, item_iv, item_v, item_vi)
    if len(set(items)) != 1:
        raise InternalInconsistency(
            "equivalence battery disagreed: "
            f"bruteforce={item_i} signs={item_ii} proj_cyclic={item_iii} "
            f"proj_mono={item_iv} splitting={item_v} antiderivatives={item_vi}"
        )
    return OneDimReport(
        verdict=items[0],
        cyclic_bruteforce=item_i,
        sign_criterion=item_ii,
        projections_cyclic=item_iii,
        projections_monotone=item_iv,
        splitting_certified=item_v,
        antiderivatives_exist=item_vi,
        cost_label=label,
        n_max=n_max,
        witness=None if sign_verdict.holds else sign_verdict.witness.to_json(),
    )


def emit_curve_figure_data(
    alphas: Sequence[MonotoneBijection],
    t_range: tuple[float, float],
    samples: int,
) -> str:
    """CSV rows (t, curve point, pair projections) for external plotting.

    Header: t, x1..xN, then pair_i_j_x, pair_i_j_y per projection in
    lexicographic (i, j) order.  samples >= 2 points spread evenly over
    t_range, endpoints included.
    """
    if samples < 2:
        raise InputValidationError("need at least two samples")
    n = len(alphas)
    lo, hi = float(t_range[0]), float(t_range[1])
    cols = [f"x{i}" for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            cols += [f"pair_{i}_{j}_x", f"pair_{i}_{j}_y"]
    lines = ["t," + ",".join(cols)]
    for m in range(samples):
        t = lo + (hi - lo) * m / (samples - 1)
        xs = [a(t) for a in alphas]
        row = [t] + xs
        for i in range(n):
            for j in range(i + 1, n):
                row += [xs[i], xs[j]]
        lines.append(",".join(format(v, ".17g") for v in row))
    return "\n".join(lines) + "\n"
