"""Assembly and certification of splitting tuples.

A splitting tuple for a set G under a pairwise-sum cost is a family of one
potential per marginal with

    c(x_1, ..., x_N) <= u_1(x_1) + ... + u_N(x_N)   everywhere,

with equality at every point of G.  When every two-marginal projection of G
is cyclically monotone, such a tuple exists and is assembled explicitly
here: f_{i,j} is the chain antiderivative of the (i, j) projection based at
s_i, and

    u_i = sum_{k > i} f_{i,k} + sum_{k < i} f_{k,i}^c,

with conjugates taken in the discrete sense of
:mod:`monosplit.antiderivative`.  Separable cost shifts are absorbed by
adding the shift of marginal i onto u_i.

Certification is sample-based: the inequality is tested on a declared set
of product points (a deterministic lattice over the 50 percent expanded
bounding box of G's marginals plus seeded uniform draws, unless the caller
supplies points), and equality is tested on all of G.  Points where some
u_i is +inf satisfy the inequality vacuously and are counted separately.
The certificate records its sample so every reported number is
recomputable.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .antiderivative import Potential, c_conjugate, rockafellar_potential
from .core import (
    ClosedForm,
    CostSpec,
    GammaSet,
    Point,
    Vec,
    as_point,
    as_vec,
    project,
    project_pair,
)
from .errors import (
    BasePointNotInGamma,
    BudgetExceeded,
    DimensionMismatch,
    InputValidationError,
    InternalInconsistency,
    NotCyclicallyMonotone,
    ProjectionNotMonotone,
    UndefinedOnGamma,
)
from .monotone import DEFAULT_TOL, MonotonicityVerdict, is_n_c_monotone_bruteforce

DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 0
LATTICE_PER_AXIS = 5
LATTICE_CAP = 20_000
EXACTNESS_BUDGET = 1_000_000


def _enc(v: float):
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return v


@dataclass(frozen=True)
class SplittingTuple:
    """Potentials u_1, ..., u_N together with their provenance.

    pair_potentials maps (i, j) with i < j (1-based) to the chain
    antiderivative f_{i,j} on marginal i; pair_conjugates maps the same key
    to its discrete conjugate on marginal j.  Tuples built directly from
    closed forms carry empty provenance.
    """

    potentials: tuple[Potential, ...]
    pair_potentials: Mapping[tuple[int, int], Potential]
    pair_conjugates: Mapping[tuple[int, int], Potential]
    base_point: Point | None = None

    def __post_init__(self):
        if len(self.potentials) < 2:
            raise InputValidationError("a splitting tuple needs at least two potentials")

    @classmethod
    def from_closed_forms(
        cls, forms: Sequence[ClosedForm], base_point=None
    ) -> "SplittingTuple":
        """Wrap user-supplied analytic potentials, one per marginal."""
        pots = tuple(Potential.from_closed_form(f) for f in forms)
        return cls(pots, {}, {}, as_point(base_point) if base_point is not None else None)

    @property
    def n_marginals(self) -> int:
        return len(self.potentials)

    def sum_at(self, p: Point) -> float:
        """u_1(p_1) + ... + u_N(p_N) in extended-real arithmetic."""
        total = 0.0
        for u, x in zip(self.potentials, p):
            v = u.value_at(x)
            if v == math.inf:
                return math.inf
            total += v
        return total

    def to_json(self) -> dict:
        return {
            "N": self.n_marginals,
            "base_point": [list(v) for v in self.base_point]
            if self.base_point is not None
            else None,
            "potentials": [u.to_json() for u in self.potentials],
            "pair_potentials": {
                f"{i},{j}": f.to_json() for (i, j), f in sorted(self.pair_potentials.items())
            },
            "pair_conjugates": {
                f"{i},{j}": f.to_json() for (i, j), f in sorted(self.pair_conjugates.items())
            },
        }


def assemble_splitting_tuple(
    g: GammaSet,
    spec: CostSpec,
    s: Sequence | None = None,
    eval_grids: Sequence[Sequence] | None = None,
    tol: float = DEFAULT_TOL,
) -> SplittingTuple:
    """Build the explicit splitting tuple from two-marginal projections.

    Each f_{i,j} is the chain antiderivative of the (i, j) projection of g
    based at s_i, tabulated on grid_i = projection_i(g) union the optional
    extra evaluation points for marginal i; conjugates are tabulated on
    grid_j.  Shifted costs add their marginal shift onto u_i.

    The base point defaults to the first point of g.  A projection with a
    positive-gain cycle aborts with ProjectionNotMonotone naming the pair
    and the cycle.
    """
    if g.dims != spec.dims:
        raise DimensionMismatch(
            f"point set dims {g.dims} do not match cost dims {spec.dims}"
        )
    n = g.n_marginals
    if s is None:
        base = g.points[0]
    else:
        base = as_point(s)
        if base not in g:
            raise BasePointNotInGamma(f"base point {base!r} is not a member of the set")
    if eval_grids is not None and len(eval_grids) != n:
        raise InputValidationError("eval_grids must supply one list per marginal")

    grids: list[tuple[Vec, ...]] = []
    for i in range(1, n + 1):
        seen: dict[Vec, None] = {}
        for v in project(g, i):
            seen.setdefault(v, None)
        if eval_grids is not None:
            for v in eval_grids[i - 1]:
                seen.setdefault(as_vec(v), None)
        grids.append(tuple(seen))

    pair_pots: dict[tuple[int, int], Potential] = {}
    pair_conjs: dict[tuple[int, int], Potential] = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            cost_ij = spec.pair_cost(i, j)
            pairs_ij = project_pair(g, i, j)
            try:
                f = rockafellar_potential(
                    cost_ij, pairs_ij, base[i - 1], grids[i - 1], tol=tol
                )
            except NotCyclicallyMonotone as exc:
                raise ProjectionNotMonotone(
                    f"projection ({i}, {j}) is not cyclically monotone: {exc}",
                    (i, j),
                    exc.cycle,
                    exc.gain,
                ) from exc
            pair_pots[(i, j)] = f
            pair_conjs[(i, j)] = c_conjugate(f, cost_ij, grids[j - 1])

    potentials = []
    for i in range(1, n + 1):
        values = []
        for x in grids[i - 1]:
            total = 0.0
            for k in range(i + 1, n + 1):
                total += pair_pots[(i, k)].value_at(x)
            for k in range(1, i):
                total += pair_conjs[(k, i)].value_at(x)
            if spec.shift is not None:
                total += spec.shift_value(i, x)
            values.append(total)
        potentials.append(Potential(grids[i - 1], tuple(values)))
    return SplittingTuple(tuple(potentials), pair_pots, pair_conjs, base)


def shift_splitting_tuple(
    tup: SplittingTuple, forms: Sequence[ClosedForm | None]
) -> SplittingTuple:
    """Replace each u_i by u_i + h_i on its table (h_i = None leaves u_i).

    Used for the shift-covariance law: the result splits the shifted cost
    exactly when the input splits the unshifted one.  Only tabulated values
    move; analytic extensions are dropped, so apply this to table-backed
    tuples.
    """
    if len(forms) != tup.n_marginals:
        raise InputValidationError("need one shift entry per marginal")
    pots = []
    for u, h in zip(tup.potentials, forms):
        if h is None:
            pots.append(u)
            continue
        if u.closed_form is not None:
            raise InputValidationError(
                "shift_splitting_tuple only supports table-backed potentials"
            )
        vals = tuple(
            v if v == math.inf else v + h.value(p) for p, v in zip(u.points, u.values)
        )
        pots.append(Potential(u.points, vals, argmax=u.argmax))
    return SplittingTuple(
        tuple(pots), tup.pair_potentials, tup.pair_conjugates, tup.base_point
    )


def _marginal_bounds(g: GammaSet) -> tuple[list[float], list[float]]:
    """Per-coordinate bounds over the flattened product space, padded 50%."""
    lows: list[float] = []
    highs: list[float] = []
    for i in range(1, g.n_marginals + 1):
        cols = list(zip(*project(g, i)))
        for col in cols:
            lo, hi = min(col), max(col)
            pad = 0.5 * (hi - lo) if hi > lo else 0.5
            lows.append(lo - pad)
            highs.append(hi + pad)
    return lows, highs


def _split_coords(flat: Sequence[float], dims: tuple[int, ...]) -> Point:
    out = []
    k = 0
    for d in dims:
        out.append(tuple(float(t) for t in flat[k : k + d]))
        k += d
    return tuple(out)


def sample_test_points(
    g: GammaSet,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    per_axis: int = LATTICE_PER_AXIS,
) -> tuple[Point, ...]:
    """Deterministic certification sample: G, a lattice, and uniform draws.

    The lattice covers the bounding box of G's marginals expanded by 50
    percent on each side, with the per-axis count reduced until the lattice
    stays under LATTICE_CAP points (dropped entirely if even 2 per axis
    overflows).  Uniform draws use numpy's default generator with the given
    seed.  Points of G come first, so equality points are always present.
    """
    lows, highs = _marginal_bounds(g)
    dims = g.dims
    total_dim = sum(dims)
    seen: dict[Point, None] = {}
    for p in g.points:
        seen.setdefault(p, None)

    k = per_axis
    while k >= 2 and k**total_dim > LATTICE_CAP:
        k -= 1
    if k >= 2:
        axes = [np.linspace(lo, hi, k) for lo, hi in zip(lows, highs)]
        for flat in itertools.product(*axes):
            seen.setdefault(_split_coords(flat, dims), None)

    rng = np.random.default_rng(seed)
    draws = rng.uniform(low=lows, high=highs, size=(n_samples, total_dim))
    for row in draws:
        seen.setdefault(_split_coords(row, dims), None)
    return tuple(seen)


@dataclass(frozen=True)
class SplittingCertificate:
    """Sampled evidence that a tuple splits the cost on a point set.

    max_inequality_violation is the max of c(p) - sum u_i(p_i) over the
    non-vacuous test points (negative means uniform slack);
    max_equality_residual_on_gamma is the max of |c(p) - sum u_i(p_i)| over
    the set itself.  Both worst points are recorded, as are the sample
    size, the vacuous count, and the sampling seed (None when the caller
    supplied explicit points).
    """

    passed: bool
    max_inequality_violation: float
    max_equality_residual_on_gamma: float
    worst_inequality_point: Point | None
    worst_equality_point: Point | None
    n_test_points: int
    n_gamma_points: int
    n_vacuous: int
    seed: int | None
    inequality_tol: float
    equality_tol: float

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "max_inequality_violation": _enc(self.max_inequality_violation),
            "max_equality_residual_on_gamma": _enc(self.max_equality_residual_on_gamma),
            "worst_inequality_point": [list(v) for v in self.worst_inequality_point]
            if self.worst_inequality_point is not None
            else None,
            "worst_equality_point": [list(v) for v in self.worst_equality_point]
            if self.worst_equality_point is not None
            else None,
            "n_test_points": self.n_test_points,
            "n_gamma_points": self.n_gamma_points,
            "n_vacuous": self.n_vacuous,
            "seed": self.seed,
            "inequality_tol": self.inequality_tol,
            "equality_tol": self.equality_tol,
        }


def certify_splitting(
    tup: SplittingTuple,
    g: GammaSet,
    spec: CostSpec,
    test_points: Sequence | None = None,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    ineq_tol: float = DEFAULT_TOL,
    eq_tol: float = DEFAULT_TOL,
) -> SplittingCertificate:
    """Test the splitting inequality on a sample and equality on the set.

    PASS means both: c(p) <= sum u_i(p_i) + ineq_tol at every non-vacuous
    test point, and |c(p) - sum u_i(p_i)| <= eq_tol at every point of g.
    Raises UndefinedOnGamma when some u_i is +inf on its marginal of g;
    everywhere else +inf potentials satisfy the inequality vacuously.
    """
    if tup.n_marginals != spec.n_marginals or g.n_marginals != spec.n_marginals:
        raise DimensionMismatch("tuple, set, and cost must agree on the marginal count")

    max_resid = 0.0
    worst_eq: Point | None = None
    for p in g:
        total = 0.0
        for i, (u, x) in enumerate(zip(tup.potentials, p), start=1):
            v = u.value_at(x)
            if v == math.inf:
                raise UndefinedOnGamma(
                    f"potential u_{i} is +inf at {x!r}, a point of projection {i}"
                )
            total += v
        cval = spec.total(p)
        resid = math.inf if cval == math.inf else abs(total - cval)
        if resid > max_resid or worst_eq is None:
            max_resid = resid
            worst_eq = p

    if test_points is None:
        pts: Sequence[Point] = sample_test_points(g, n_samples=n_samples, seed=seed)
        used_seed: int | None = seed
    else:
        pts = [as_point(p) for p in test_points]
        used_seed = None

    max_viol = -math.inf
    worst_ineq: Point | None = None
    vacuous = 0
    for p in pts:
        total = tup.sum_at(p)
        if total == math.inf:
            vacuous += 1
            continue
        viol = spec.total(p) - total
        if viol > max_viol:
            max_viol = viol
            worst_ineq = p

    passed = max_viol <= ineq_tol and max_resid <= eq_tol
    return SplittingCertificate(
        passed=passed,
        max_inequality_violation=max_viol,
        max_equality_residual_on_gamma=max_resid,
        worst_inequality_point=worst_ineq,
        worst_equality_point=worst_eq,
        n_test_points=len(pts),
        n_gamma_points=g.size,
        n_vacuous=vacuous,
        seed=used_seed,
        inequality_tol=ineq_tol,
        equality_tol=eq_tol,
    )


@dataclass(frozen=True)
class ExactnessReport:
    """Whether the set equals the intersection of projection preimages and
    whether test points on the candidate product with splitting equality
    all lie in the set.

    Equality off the set is not automatically a bug: the exactness
    characterisation assumes the projections coincide with the
    subdifferential graphs of the pair potentials, and chain-constructed
    potentials may have strictly larger graphs.  The report describes the
    instance; it never raises.
    """

    intersection_equals_gamma: bool
    extra_intersection_points: tuple[Point, ...]
    equality_outside_gamma: tuple[tuple[Point, float], ...]
    candidates_checked: int
    n_test_points: int
    equality_tol: float

    @property
    def holds(self) -> bool:
        return self.intersection_equals_gamma and not self.equality_outside_gamma

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "intersection_equals_gamma": self.intersection_equals_gamma,
            "extra_intersection_points": [
                [list(v) for v in p] for p in self.extra_intersection_points
            ],
            "equality_outside_gamma": [
                {"point": [list(v) for v in p], "residual": r}
                for p, r in self.equality_outside_gamma
            ],
            "candidates_checked": self.candidates_checked,
            "n_test_points": self.n_test_points,
            "equality_tol": self.equality_tol,
        }


def check_exactness_condition(
    g: GammaSet,
    tup: SplittingTuple,
    spec: CostSpec,
    test_points: Sequence | None = None,
    eq_tol: float = DEFAULT_TOL,
    budget: int = EXACTNESS_BUDGET,
) -> ExactnessReport:
    """Probe the two halves of the exactness characterisation.

    (a) Enumerate the product of the marginal projections and test whether
    the points whose every (i, j) projection lies in the projected set are
    exactly the points of g.  (b) Among the supplied test points, any
    point lying on the candidate product (every coordinate an exact member
    of its projection) with splitting equality residual <= eq_tol must
    belong to g; offenders are reported with their residuals.
    """
    n = g.n_marginals
    margs = [project(g, i) for i in range(1, n + 1)]
    count = 1
    for m in margs:
        count *= len(m)
        if count > budget:
            raise BudgetExceeded(
                f"candidate product exceeds budget ({count} > {budget})"
            )
    pair_sets = {
        (i, j): set(project_pair(g, i, j))
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
    }
    extras: list[Point] = []
    checked = 0
    for combo in itertools.product(*margs):
        p: Point = tuple(combo)
        checked += 1
        if p in g:
            continue
        if all((p[i - 1], p[j - 1]) in pair_sets[(i, j)] for (i, j) in pair_sets):
            extras.append(p)

    marg_sets = [set(m) for m in margs]
    eq_outside: list[tuple[Point, float]] = []
    pts = [as_point(p) for p in test_points] if test_points is not None else []
    for p in pts:
        if p in g:
            continue
        if not all(x in marg_sets[i] for i, x in enumerate(p)):
            continue
        total = tup.sum_at(p)
        if total == math.inf:
            continue
        cval = spec.total(p)
        if cval == math.inf:
            continue
        resid = abs(total - cval)
        if resid <= eq_tol:
            eq_outside.append((p, resid))
    return ExactnessReport(
        intersection_equals_gamma=not extras,
        extra_intersection_points=tuple(extras),
        equality_outside_gamma=tuple(eq_outside),
        candidates_checked=checked,
        n_test_points=len(pts),
        equality_tol=eq_tol,
    )


def splitting_implies_monotone_check(
    tup: SplittingTuple,
    g: GammaSet,
    spec: CostSpec,
    n: int,
    tol: float = DEFAULT_TOL,
) -> MonotonicityVerdict:
    """Consistency harness: a certified tuple forces n-monotonicity of g.

    Runs the brute-force verifier and converts any failure into
    InternalInconsistency, since a split set can never fail monotonicity
    unless the implementation is wrong.
    """
    verdict = is_n_c_monotone_bruteforce(g, spec, n, tol=tol)
    if not verdict.holds:
        w = verdict.witness
        raise InternalInconsistency(
            "splitting certified but monotonicity failed: "
            f"gain {w.gain:.6g} at permutations {w.permutations!r}"
        )
    return verdict
