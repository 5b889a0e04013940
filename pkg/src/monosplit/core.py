"""Core types for finite multi-marginal transport problems.

A product point is an N-tuple of marginal points, one per factor space
``X = X_1 x ... x X_N``.  Costs are sums of two-marginal couplings

    c(x_1, ..., x_N) = sum_{1 <= i < j <= N} c_ij(x_i, x_j),

optionally plus a separable shift ``sum_i h_i(x_i)``.  This module holds the
data model shared by every verifier and constructor in the package: marginal
and product points, pairwise cost kernels, full cost specifications, finite
point sets with projections, closed-form scalar fields used for shifts and
potentials, and a deterministic JSON layer.

Marginal indices are 1-based throughout the public API, matching the usual
mathematical labelling of the factors.
"""

from __future__ import annotations

import abc
import json
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    InputValidationError,
    OffGrid,
    ParseError,
)

Vec = tuple[float, ...]
Point = tuple[Vec, ...]

CLASSICAL_COSTS = ("c1", "c2", "c3")


def as_vec(values: float | Sequence[float]) -> Vec:
    """Coerce a scalar or sequence into a finite coordinate tuple."""
    if isinstance(values, (int, float)):
        values = (values,)
    out = tuple(float(v) for v in values)
    if not out:
        raise InputValidationError("marginal point must have at least one coordinate")
    for v in out:
        if not math.isfinite(v):
            raise InputValidationError(f"non-finite coordinate {v!r}")
    return out


def as_point(parts: Sequence[float | Sequence[float]]) -> Point:
    """Coerce a sequence of marginal points (scalars allowed) into a Point."""
    parts = tuple(parts)
    if len(parts) < 2:
        raise InputValidationError("a product point needs at least two marginals")
    return tuple(as_vec(p) for p in parts)


def vec_add(x: Vec, y: Vec) -> Vec:
    if len(x) != len(y):
        raise DimensionMismatch(f"cannot add vectors of length {len(x)} and {len(y)}")
    return tuple(a + b for a, b in zip(x, y))


def vec_scale(s: float, x: Vec) -> Vec:
    return tuple(s * a for a in x)


def point_add(p: Point, q: Point) -> Point:
    if len(p) != len(q):
        raise DimensionMismatch("points have different numbers of marginals")
    return tuple(vec_add(a, b) for a, b in zip(p, q))


def point_scale(s: float, p: Point) -> Point:
    return tuple(vec_scale(s, x) for x in p)


def _dot(x: Vec, y: Vec) -> float:
    return sum(a * b for a, b in zip(x, y))


# ---------------------------------------------------------------------------
# Closed-form scalar fields
# ---------------------------------------------------------------------------


class ClosedForm(abc.ABC):
    """A named scalar field on one marginal space.

    Closed forms back separable cost shifts and analytic potentials.  Values
    live on the extended real line: +inf encodes indicator-style domains.
    """

    @abc.abstractmethod
    def value(self, x: Vec) -> float:
        """Evaluate at a marginal point; may return ``math.inf``."""

    def __call__(self, x: float | Sequence[float]) -> float:
        return self.value(as_vec(x))

    def negated(self) -> "ClosedForm":
        raise NotImplementedError(f"{type(self).__name__} cannot be negated")

    @abc.abstractmethod
    def to_json(self) -> dict:
        """Schema object with a ``form`` tag; inverse of :func:`form_from_json`."""


def _matrix_tuple(matrix: Sequence[Sequence[float]]) -> tuple[tuple[float, ...], ...]:
    rows = tuple(tuple(float(v) for v in row) for row in matrix)
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise InputValidationError("matrix rows must be nonempty and equally sized")
    for row in rows:
        for v in row:
            if not math.isfinite(v):
                raise InputValidationError("matrix entries must be finite")
    return rows


@dataclass(frozen=True)
class QuadraticForm(ClosedForm):
    """q_A(x) = (1/2) <x, A x> for a square matrix A.

    ``QuadraticForm.identity(d)`` gives the plain q(x) = |x|^2 / 2.
    """

    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        m = _matrix_tuple(self.matrix)
        if len(m) != len(m[0]):
            raise DimensionMismatch("quadratic form needs a square matrix")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, dim: int, scale: float = 1.0) -> "QuadraticForm":
        rows = tuple(
            tuple(scale if i == j else 0.0 for j in range(dim)) for i in range(dim)
        )
        return cls(rows)

    def value(self, x: Vec) -> float:
        if len(x) != len(self.matrix):
            raise DimensionMismatch(
                f"quadratic form of size {len(self.matrix)} applied to length {len(x)}"
            )
        return 0.5 * sum(
            x[i] * sum(self.matrix[i][j] * x[j] for j in range(len(x)))
            for i in range(len(x))
        )

    def negated(self) -> "QuadraticForm":
        return QuadraticForm(tuple(tuple(-v for v in row) for row in self.matrix))

    def to_json(self) -> dict:
        return {"form": "quadratic", "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class LinearForm(ClosedForm):
    """<b, x> + constant."""

    vector: Vec
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "vector", as_vec(self.vector))
        if not math.isfinite(self.constant):
            raise InputValidationError("constant must be finite")

    def value(self, x: Vec) -> float:
        if len(x) != len(self.vector):
            raise DimensionMismatch("linear form dimension mismatch")
        return _dot(self.vector, x) + self.constant

    def negated(self) -> "LinearForm":
        return LinearForm(vec_scale(-1.0, self.vector), -self.constant)

    def to_json(self) -> dict:
        return {"form": "linear", "vector": list(self.vector), "constant": self.constant}


@dataclass(frozen=True)
class EvenPowerForm(ClosedForm):
    """sum_k coef_k |x|^{p_k} on a one-dimensional marginal.

    The absolute value implements the even extension consistent with taking
    odd roots of negative arguments, so fractional powers like 4/3 evaluate
    to real numbers on the whole line.
    """

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        terms = tuple((float(c), float(p)) for c, p in self.terms)
        for c, p in terms:
            if not (math.isfinite(c) and math.isfinite(p)) or p <= 0:
                raise InputValidationError("even-power terms need finite coef and power > 0")
        object.__setattr__(self, "terms", terms)

    def value(self, x: Vec) -> float:
        if len(x) != 1:
            raise DimensionMismatch("even-power form is one-dimensional")
        t = abs(x[0])
        return sum(c * t**p for c, p in self.terms)

    def negated(self) -> "EvenPowerForm":
        return EvenPowerForm(tuple((-c, p) for c, p in self.terms))

    def to_json(self) -> dict:
        return {"form": "even_power", "terms": [[c, p] for c, p in self.terms]}


INDICATOR_SUBSPACES = ("first_axis", "diagonal")


@dataclass(frozen=True)
class IndicatorQuadraticForm(ClosedForm):
    """Indicator of a linear subspace plus q_A: +inf off the subspace.

    Supported subspaces: ``first_axis`` (all coordinates after the first
    vanish) and ``diagonal`` (all coordinates equal).  Membership is exact.
    """

    subspace: str
    matrix: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if self.subspace not in INDICATOR_SUBSPACES:
            raise InputValidationError(f"unknown subspace {self.subspace!r}")
        object.__setattr__(self, "quad", QuadraticForm(self.matrix))
        object.__setattr__(self, "matrix", getattr(self, "quad").matrix)

    def _member(self, x: Vec) -> bool:
        if self.subspace == "first_axis":
            return all(v == 0.0 for v in x[1:])
        return all(v == x[0] for v in x[1:])

    def value(self, x: Vec) -> float:
        if len(x) != len(self.matrix):
            raise DimensionMismatch("indicator form dimension mismatch")
        if not self._member(x):
            return math.inf
        return self.quad.value(x)  # type: ignore[attr-defined]

    def to_json(self) -> dict:
        return {
            "form": "indicator_quadratic",
            "subspace": self.subspace,
            "matrix": [list(r) for r in self.matrix],
        }


@dataclass(frozen=True)
class CustomForm(ClosedForm):
    """Wrap an arbitrary callable; not serializable."""

    fn: Callable[[Vec], float]
    label: str = "custom"

    def value(self, x: Vec) -> float:
        return float(self.fn(x))

    def to_json(self) -> dict:
        raise NotImplementedError("custom closed forms are not serializable")


def form_from_json(obj: dict) -> ClosedForm:
    if not isinstance(obj, dict) or "form" not in obj:
        raise ParseError("closed form JSON must be an object with a 'form' tag")
    tag = obj["form"]
    try:
        if tag == "quadratic":
            return QuadraticForm(_matrix_tuple(obj["matrix"]))
        if tag == "linear":
            return LinearForm(as_vec(obj["vector"]), float(obj.get("constant", 0.0)))
        if tag == "even_power":
            return EvenPowerForm(tuple((float(c), float(p)) for c, p in obj["terms"]))
        if tag == "indicator_quadratic":
            return IndicatorQuadraticForm(obj["subspace"], _matrix_tuple(obj["matrix"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad closed form payload for {tag!r}: {exc}") from exc
    raise ParseError(f"unknown closed form tag {tag!r}")


# ---------------------------------------------------------------------------
# Pairwise costs
# ---------------------------------------------------------------------------

PAIRWISE_KINDS = ("inner_product", "half_sq_dist", "bilinear", "tabulated")


@dataclass(frozen=True)
class PairwiseCost:
    """One two-marginal coupling c_ij, with an overall sign.

    Kinds:
        inner_product   <x, y>
        half_sq_dist    |x - y|^2 / 2
        bilinear        <x, A y>
        tabulated       finite lookup table on explicit grids

    Attributes:
        kind: one of :data:`PAIRWISE_KINDS`.
        sign: +1 or -1 multiplier, so negated costs stay first-class values.
        matrix: bilinear kernel, when kind == "bilinear".
        grid_x, grid_y, table: lookup data, when kind == "tabulated".
    """

    kind: str
    sign: int = 1
    matrix: tuple[tuple[float, ...], ...] | None = None
    grid_x: tuple[Vec, ...] | None = None
    grid_y: tuple[Vec, ...] | None = None
    table: tuple[tuple[float, ...], ...] | None = None
    _ix: Mapping[Vec, int] = field(
        init=False, repr=False, compare=False, default=None  # type: ignore[assignment]
    )
    _iy: Mapping[Vec, int] = field(
        init=False, repr=False, compare=False, default=None  # type: ignore[assignment]
    )

    def __post_init__(self):
        if self.kind not in PAIRWISE_KINDS:
            raise InputValidationError(f"unknown pairwise cost kind {self.kind!r}")
        if self.sign not in (1, -1):
            raise InputValidationError("sign must be +1 or -1")
        if self.kind == "bilinear":
            if self.matrix is None:
                raise InputValidationError("bilinear cost needs a matrix")
            object.__setattr__(self, "matrix", _matrix_tuple(self.matrix))
        if self.kind == "tabulated":
            if self.grid_x is None or self.grid_y is None or self.table is None:
                raise InputValidationError("tabulated cost needs grid_x, grid_y, table")
            gx = tuple(as_vec(v) for v in self.grid_x)
            gy = tuple(as_vec(v) for v in self.grid_y)
            tab = tuple(tuple(float(v) for v in row) for row in self.table)
            if len(tab) != len(gx) or any(len(r) != len(gy) for r in tab):
                raise DimensionMismatch("table shape must be len(grid_x) x len(grid_y)")
            for row in tab:
                for v in row:
                    if not math.isfinite(v):
                        raise InputValidationError("table entries must be finite")
            object.__setattr__(self, "grid_x", gx)
            object.__setattr__(self, "grid_y", gy)
            object.__setattr__(self, "table", tab)
            object.__setattr__(self, "_ix", {v: i for i, v in enumerate(gx)})
            object.__setattr__(self, "_iy", {v: i for i, v in enumerate(gy)})

    @classmethod
    def inner_product(cls, sign: int = 1) -> "PairwiseCost":
        return cls("inner_product", sign)

    @classmethod
    def half_sq_dist(cls, sign: int = 1) -> "PairwiseCost":
        return cls("half_sq_dist", sign)

    @classmethod
    def bilinear(cls, matrix: Sequence[Sequence[float]], sign: int = 1) -> "PairwiseCost":
        return cls("bilinear", sign, matrix=_matrix_tuple(matrix))

    @classmethod
    def tabulated(
        cls,
        grid_x: Sequence[Sequence[float] | float],
        grid_y: Sequence[Sequence[float] | float],
        table: Sequence[Sequence[float]],
        sign: int = 1,
    ) -> "PairwiseCost":
        return cls(
            "tabulated",
            sign,
            grid_x=tuple(as_vec(v) for v in grid_x),
            grid_y=tuple(as_vec(v) for v in grid_y),
            table=tuple(tuple(float(v) for v in row) for row in table),
        )

    def value(self, x: Vec, y: Vec) -> float:
        if self.kind == "inner_product":
            if len(x) != len(y):
                raise DimensionMismatch("inner product needs equal dimensions")
            return self.sign * _dot(x, y)
        if self.kind == "half_sq_dist":
            if len(x) != len(y):
                raise DimensionMismatch("half squared distance needs equal dimensions")
            return self.sign * 0.5 * sum((a - b) ** 2 for a, b in zip(x, y))
        if self.kind == "bilinear":
            assert self.matrix is not None
            if len(x) != len(self.matrix) or len(y) != len(self.matrix[0]):
                raise DimensionMismatch("bilinear cost shape mismatch")
            return self.sign * sum(
                x[i] * _dot(self.matrix[i], y) for i in range(len(x))
            )
        ix = self._ix.get(x)
        iy = self._iy.get(y)
        if ix is None:
            raise OffGrid(f"point {x!r} not on the tabulated x-grid")
        if iy is None:
            raise OffGrid(f"point {y!r} not on the tabulated y-grid")
        assert self.table is not None
        return self.sign * self.table[ix][iy]

    def negated(self) -> "PairwiseCost":
        return PairwiseCost(
            self.kind, -self.sign, matrix=self.matrix,
            grid_x=self.grid_x, grid_y=self.grid_y, table=self.table,
        )

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "sign": self.sign}
        if self.kind == "bilinear":
            assert self.matrix is not None
            out["matrix"] = [list(r) for r in self.matrix]
        if self.kind == "tabulated":
            assert self.grid_x and self.grid_y and self.table
            out["grid_x"] = [list(v) for v in self.grid_x]
            out["grid_y"] = [list(v) for v in self.grid_y]
            out["table"] = [list(r) for r in self.table]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PairwiseCost":
        try:
            kind = obj["kind"]
            sign = int(obj.get("sign", 1))
            if kind == "bilinear":
                return cls.bilinear(obj["matrix"], sign)
            if kind == "tabulated":
                return cls.tabulated(obj["grid_x"], obj["grid_y"], obj["table"], sign)
            return cls(kind, sign)
        except (KeyError, TypeError, ValueError, InputValidationError) as exc:
            if isinstance(exc, InputValidationError):
                raise
            raise ParseError(f"bad pairwise cost payload: {exc}") from exc


def eval_pairwise(cost: PairwiseCost, x: float | Sequence[float],
                  y: float | Sequence[float]) -> float:
    """Evaluate one coupling at validated marginal points."""
    return cost.value(as_vec(x), as_vec(y))


# ---------------------------------------------------------------------------
# Cost specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostSpec:
    """A full cost: one pairwise coupling per marginal pair, plus shifts.

    Attributes:
        dims: marginal dimensions (d_1, ..., d_N), N >= 2.
        pairs: mapping (i, j) -> PairwiseCost for every 1 <= i < j <= N.
        shift: optional tuple of per-marginal summand tuples; the shift
            contribution at p is sum_i sum_h h(p_i).
    """

    dims: tuple[int, ...]
    pairs: Mapping[tuple[int, int], PairwiseCost]
    shift: tuple[tuple[ClosedForm, ...], ...] | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise InputValidationError("need at least two marginals of dimension >= 1")
        object.__setattr__(self, "dims", dims)
        n = len(dims)
        pairs = dict(self.pairs)
        expected = {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
        if set(pairs) != expected:
            raise InputValidationError(
                f"pairwise map must cover exactly the index pairs {sorted(expected)}"
            )
        for (i, j), c in pairs.items():
            if c.kind == "bilinear":
                assert c.matrix is not None
                if (len(c.matrix), len(c.matrix[0])) != (dims[i - 1], dims[j - 1]):
                    raise DimensionMismatch(
                        f"bilinear matrix for pair ({i},{j}) has the wrong shape"
                    )
            if c.kind in ("inner_product", "half_sq_dist") and dims[i - 1] != dims[j - 1]:
                raise DimensionMismatch(
                    f"pair ({i},{j}) couples marginals of different dimension"
                )
        object.__setattr__(self, "pairs", pairs)
        if self.shift is not None:
            if len(self.shift) != n:
                raise InputValidationError("shift must provide one entry per marginal")
            object.__setattr__(
                self, "shift", tuple(tuple(forms) for forms in self.shift)
            )

    @property
    def n_marginals(self) -> int:
        return len(self.dims)

    def pair_cost(self, i: int, j: int) -> PairwiseCost:
        if not (1 <= i < j <= self.n_marginals):
            raise IndexOutOfRange(f"pair ({i},{j}) outside 1..{self.n_marginals}")
        return self.pairs[(i, j)]

    def validate_point(self, p: Point) -> Point:
        if len(p) != self.n_marginals:
            raise DimensionMismatch(
                f"point has {len(p)} marginals, cost expects {self.n_marginals}"
            )
        for x, d in zip(p, self.dims):
            if len(x) != d:
                raise DimensionMismatch("marginal dimension mismatch")
        return p

    def shift_value(self, i: int, x: Vec) -> float:
        """Separable shift contribution of marginal i (1-based) at x."""
        if self.shift is None:
            return 0.0
        return sum(h.value(x) for h in self.shift[i - 1])

    def total(self, p: Point) -> float:
        self.validate_point(p)
        out = 0.0
        for (i, j), c in self.pairs.items():
            out += c.value(p[i - 1], p[j - 1])
        if self.shift is not None:
            for i in range(1, self.n_marginals + 1):
                out += self.shift_value(i, p[i - 1])
        return out

    def negated(self) -> "CostSpec":
        """Flip the sign of every coupling and every shift term."""
        shift = None
        if self.shift is not None:
            shift = tuple(tuple(h.negated() for h in forms) for forms in self.shift)
        return CostSpec(
            self.dims,
            {k: c.negated() for k, c in self.pairs.items()},
            shift,
        )

    def to_json(self) -> dict:
        out: dict = {
            "N": self.n_marginals,
            "dims": list(self.dims),
            "pairs": {f"{i},{j}": c.to_json() for (i, j), c in sorted(self.pairs.items())},
        }
        if self.shift is not None:
            out["shift"] = [[h.to_json() for h in forms] for forms in self.shift]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CostSpec":
        try:
            dims = tuple(int(d) for d in obj["dims"])
            pairs = {}
            for key, payload in obj["pairs"].items():
                i, j = (int(t) for t in key.split(","))
                pairs[(i, j)] = PairwiseCost.from_json(payload)
            shift = None
            if obj.get("shift") is not None:
                shift = tuple(
                    tuple(form_from_json(h) for h in forms) for forms in obj["shift"]
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad cost spec payload: {exc}") from exc
        return cls(dims, pairs, shift)


def classical_cost(which: str, n_marginals: int, dim: int) -> CostSpec:
    """Build one of the classical costs on (R^d)^N.

    c1 sums inner products over pairs, c2 sums half squared distances, and
    c3 is |x_1 + ... + x_N|^2 / 2, encoded as c1 plus the separable shift
    sum_i q(x_i) so that every pairwise coupling stays two-marginal.
    """
    if which not in CLASSICAL_COSTS:
        raise InputValidationError(f"unknown classical cost {which!r}")
    if n_marginals < 2 or dim < 1:
        raise InputValidationError("need n_marginals >= 2 and dim >= 1")
    dims = (dim,) * n_marginals
    kind = "half_sq_dist" if which == "c2" else "inner_product"
    pairs = {
        (i, j): PairwiseCost(kind)
        for i in range(1, n_marginals + 1)
        for j in range(i + 1, n_marginals + 1)
    }
    shift = None
    if which == "c3":
        q = QuadraticForm.identity(dim)
        shift = tuple((q,) for _ in range(n_marginals))
    return CostSpec(dims, pairs, shift)


def eval_total_cost(spec: CostSpec, p: Sequence[float | Sequence[float]] | Point) -> float:
    """Total cost at a product point, pairwise couplings plus shifts."""
    return spec.total(as_point(p))


def add_separable_shift(
    spec: CostSpec,
    forms: Sequence[ClosedForm | Sequence[ClosedForm] | None],
) -> CostSpec:
    """Return the cost c + sum_i h_i with the given per-marginal terms.

    Each entry may be a single form, a sequence of forms, or None.  Existing
    shift terms are kept and the new ones appended.
    """
    if len(forms) != spec.n_marginals:
        raise InputValidationError("need one shift entry per marginal")
    merged: list[tuple[ClosedForm, ...]] = []
    for i, entry in enumerate(forms):
        if entry is None:
            new: tuple[ClosedForm, ...] = ()
        elif isinstance(entry, ClosedForm):
            new = (entry,)
        else:
            new = tuple(entry)
        old = spec.shift[i] if spec.shift is not None else ()
        merged.append(tuple(old) + new)
    return CostSpec(spec.dims, dict(spec.pairs), tuple(merged))


# ---------------------------------------------------------------------------
# Finite point sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GammaSet:
    """A finite subset of the product space, deduplicated, order-preserving.

    Attributes:
        dims: marginal dimensions, consistent across all points.
        points: the distinct product points in first-seen order.
    """

    dims: tuple[int, ...]
    points: tuple[Point, ...]
    _members: frozenset = field(init=False, repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2 or any(d < 1 for d in dims):
            raise InputValidationError("need at least two marginals of dimension >= 1")
        seen: dict[Point, None] = {}
        for p in self.points:
            if len(p) != len(dims):
                raise DimensionMismatch("point has the wrong number of marginals")
            for x, d in zip(p, dims):
                if len(x) != d:
                    raise DimensionMismatch("marginal dimension mismatch")
                for v in x:
                    if not math.isfinite(v):
                        raise InputValidationError("coordinates must be finite")
            seen.setdefault(p, None)
        if not seen:
            raise InputValidationError("the point set must be nonempty")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "points", tuple(seen))
        object.__setattr__(self, "_members", frozenset(seen))

    @classmethod
    def from_points(
        cls,
        points: Sequence[Sequence[float | Sequence[float]]],
        dims: Sequence[int] | None = None,
    ) -> "GammaSet":
        pts = tuple(as_point(p) for p in points)
        if dims is None:
            if not pts:
                raise InputValidationError("cannot infer dims from an empty set")
            dims = tuple(len(x) for x in pts[0])
        return cls(tuple(dims), pts)

    @property
    def n_marginals(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return len(self.points)

    def __contains__(self, p: Point) -> bool:
        return p in self._members

    def __iter__(self):
        return iter(self.points)

    def translated(self, z: Sequence[float | Sequence[float]] | Point) -> "GammaSet":
        zp = as_point(z)
        return GammaSet(self.dims, tuple(point_add(p, zp) for p in self.points))

    def to_json(self) -> dict:
        return {
            "N": self.n_marginals,
            "dims": list(self.dims),
            "points": [[list(x) for x in p] for p in self.points],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GammaSet":
        try:
            dims = tuple(int(d) for d in obj["dims"])
            if int(obj["N"]) != len(dims):
                raise ParseError("N disagrees with dims length")
            points = tuple(tuple(as_vec(x) for x in p) for p in obj["points"])
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad gamma set payload: {exc}") from exc
        return cls(dims, points)


def gamma_1d(rows: Sequence[Sequence[float]]) -> GammaSet:
    """Build a GammaSet with scalar marginals from rows of coordinates."""
    return GammaSet.from_points([[float(v) for v in row] for row in rows])


def project(g: GammaSet, i: int) -> tuple[Vec, ...]:
    """Distinct i-th marginal values of g, in first-seen order (1-based i)."""
    if not (1 <= i <= g.n_marginals):
        raise IndexOutOfRange(f"marginal index {i} outside 1..{g.n_marginals}")
    seen: dict[Vec, None] = {}
    for p in g.points:
        seen.setdefault(p[i - 1], None)
    return tuple(seen)


def project_pair(g: GammaSet, i: int, j: int) -> tuple[tuple[Vec, Vec], ...]:
    """Distinct (x_i, x_j) pairs of g, in first-seen order; requires i < j."""
    if not (1 <= i <= g.n_marginals) or not (1 <= j <= g.n_marginals):
        raise IndexOutOfRange(f"pair ({i},{j}) outside 1..{g.n_marginals}")
    if i >= j:
        raise IndexOutOfRange("project_pair requires i < j")
    seen: dict[tuple[Vec, Vec], None] = {}
    for p in g.points:
        seen.setdefault((p[i - 1], p[j - 1]), None)
    return tuple(seen)


# ---------------------------------------------------------------------------
# Deterministic JSON writing
# ---------------------------------------------------------------------------


def _write_json(obj, pieces: list[str], indent: str, level: int) -> None:
    pad = indent * (level + 1)
    if obj is None:
        pieces.append("null")
    elif obj is True:
        pieces.append("true")
    elif obj is False:
        pieces.append("false")
    elif isinstance(obj, str):
        pieces.append(
            '"' + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
        )
    elif isinstance(obj, int):
        pieces.append(str(obj))
    elif isinstance(obj, float):
        if not math.isfinite(obj):
            raise InputValidationError(
                "non-finite float reached the JSON writer; encode it upstream"
            )
        pieces.append(format(obj, ".17g"))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            pieces.append("[]")
            return
        pieces.append("[\n")
        for k, item in enumerate(obj):
            pieces.append(pad)
            _write_json(item, pieces, indent, level + 1)
            pieces.append(",\n" if k + 1 < len(obj) else "\n")
        pieces.append(indent * level + "]")
    elif isinstance(obj, dict):
        if not obj:
            pieces.append("{}")
            return
        pieces.append("{\n")
        items = list(obj.items())
        for k, (key, item) in enumerate(items):
            if not isinstance(key, str):
                raise InputValidationError("JSON object keys must be strings")
            pieces.append(pad)
            _write_json(key, pieces, indent, level + 1)
            pieces.append(": ")
            _write_json(item, pieces, indent, level + 1)
            pieces.append(",\n" if k + 1 < len(items) else "\n")
        pieces.append(indent * level + "}")
    else:
        raise InputValidationError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj) -> str:
    """Serialize to JSON with floats at 17 significant digits.

    17 digits round-trip IEEE doubles exactly, and the writer visits keys in
    insertion order, so identical inputs produce byte-identical documents.
    """
    pieces: list[str] = []
    _write_json(obj, pieces, "  ", 0)
    pieces.append("\n")
    return "".join(pieces)


def loads_json(text: str):
    """Parse JSON text, mapping malformed documents to ParseError."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
