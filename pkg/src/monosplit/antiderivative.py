"""Potentials, chain antiderivatives, and discrete c-conjugation.

Given a cyclically monotone set of pairs G in X1 x X2 and a base point s1
in its first projection, the chain antiderivative

    R(x) = sup { sum_{j=1..n} c(x^{j+1}, y^j) - c(x^j, y^j) :
                 (x^j, y^j) in G, x^1 = s1, x^{n+1} = x }

is a real-valued potential with R(s1) = 0 whose c-subdifferential graph
contains G.  The supremum is a longest-path problem on the gain digraph of
:mod:`monosplit.monotone`; it is finite exactly when no cycle has positive
gain, so properness failure and cycle detection are one and the same test.

Conjugation is taken in the discrete sense: f^c(y) maximises
c(x, y) - f(x) over the tabulated domain of f only.  Equivalently it is the
exact conjugate of f extended by +inf off its table, which keeps the
Young-Fenchel inequality c(x, y) <= f(x) + f^c(y) valid everywhere under
the same +inf convention.  Potentials therefore evaluate to +inf at points
missing from their table unless a closed form is attached.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

from .core import ClosedForm, PairwiseCost, Vec, as_vec, form_from_json
from .errors import (
    BasePointNotInProjection,
    ImproperInput,
    InputValidationError,
    NotCyclicallyMonotone,
    ParseError,
)
from .monotone import DEFAULT_TOL, _dedup_pairs, scan_gain_digraph

FORM_AGREEMENT_TOL = 1e-9


@dataclass(frozen=True)
class Potential:
    """A scalar potential on one marginal space, tabulated and extended.

    Attributes:
        points: distinct marginal points carrying explicit values.
        values: matching values; +inf is allowed, -inf and NaN are not.
        closed_form: optional analytic extension.  When present it must
            agree with the table within 1e-9 and answers queries off the
            table; otherwise off-table queries return +inf.
        argmax: for conjugates, the index into the parent's domain that
            attained each tabulated maximum (lowest index on ties).
    """

    points: tuple[Vec, ...]
    values: tuple[float, ...]
    closed_form: ClosedForm | None = None
    argmax: tuple[int, ...] | None = None
    _table: dict = field(init=False, repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        pts = tuple(as_vec(p) for p in self.points)
        vals = tuple(float(v) for v in self.values)
        if len(pts) != len(vals):
            raise InputValidationError("points and values must have equal length")
        table: dict[Vec, float] = {}
        for p, v in zip(pts, vals):
            if math.isnan(v) or v == -math.inf:
                raise InputValidationError("potential values must be finite or +inf")
            if p in table:
                raise InputValidationError(f"duplicate domain point {p!r}")
            table[p] = v
        for p in pts[1:]:
            if len(p) != len(pts[0]):
                raise InputValidationError("domain points mix dimensions")
        if self.argmax is not None and len(self.argmax) != len(pts):
            raise InputValidationError("argmax must align with the domain points")
        if self.closed_form is not None:
            for p, v in table.items():
                w = self.closed_form.value(p)
                if v == math.inf or w == math.inf:
                    if v != w:
                        raise InputValidationError(
                            f"closed form disagrees with table at {p!r}: {w!r} vs {v!r}"
                        )
                elif abs(w - v) > FORM_AGREEMENT_TOL:
                    raise InputValidationError(
                        f"closed form disagrees with table at {p!r}: {w!r} vs {v!r}"
                    )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "_table", table)

    @classmethod
    def from_closed_form(cls, form: ClosedForm) -> "Potential":
        """A potential defined everywhere by its analytic expression."""
        return cls((), (), closed_form=form)

    @property
    def is_proper(self) -> bool:
        """True when some value is finite (closed forms count as proper)."""
        if any(v != math.inf for v in self.values):
            return True
        return self.closed_form is not None and not self.points

    def finite_entries(self) -> list[tuple[Vec, float]]:
        return [(p, v) for p, v in zip(self.points, self.values) if v != math.inf]

    def value_at(self, x: float | Sequence[float]) -> float:
        """Table value, else closed form, else +inf."""
        key = as_vec(x)
        hit = self._table.get(key)
        if hit is not None:
            return hit
        if self.closed_form is not None:
            return self.closed_form.value(key)
        return math.inf

    def __call__(self, x: float | Sequence[float]) -> float:
        return self.value_at(x)

    def to_json(self) -> dict:
        out: dict = {
            "points": [list(p) for p in self.points],
            "values": ["inf" if v == math.inf else v for v in self.values],
            "closed_form": self.closed_form.to_json() if self.closed_form else None,
        }
        if self.argmax is not None:
            out["argmax"] = list(self.argmax)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Potential":
        try:
            points = tuple(as_vec(p) for p in obj["points"])
            values = tuple(
                math.inf if v == "inf" else float(v) for v in obj["values"]
            )
            form = obj.get("closed_form")
            argmax = obj.get("argmax")
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad potential payload: {exc}") from exc
        return cls(
            points,
            values,
            closed_form=form_from_json(form) if form is not None else None,
            argmax=tuple(int(a) for a in argmax) if argmax is not None else None,
        )


def _dedup_vecs(points: Sequence[float | Sequence[float]]) -> tuple[Vec, ...]:
    seen: dict[Vec, None] = {}
    for p in points:
        seen.setdefault(as_vec(p), None)
    if not seen:
        raise InputValidationError("need at least one evaluation point")
    return tuple(seen)


def rockafellar_potential(
    cost: PairwiseCost,
    pairs: Sequence[tuple],
    s1: float | Sequence[float],
    eval_points: Sequence[float | Sequence[float]],
    tol: float = DEFAULT_TOL,
) -> Potential:
    """Tabulate the chain antiderivative of a monotone pair set.

    Chains live inside the given pairs and start at a pair whose first
    coordinate equals s1 exactly; the final increment steps to the query
    point.  Longest chain gains are computed by the shared digraph scan, so
    a positive cycle (beyond tol) aborts with NotCyclicallyMonotone and the
    offending cycle.  R(s1) = 0 exactly.

    Values depend on the pairs actually supplied: refining a sampled graph
    can only raise R, so tabulated values certify the sampled set, not any
    continuum limit.
    """
    deduped = _dedup_pairs(pairs)
    xs = [p[0] for p in deduped]
    ys = [p[1] for p in deduped]
    base = as_vec(s1)
    source = [x == base for x in xs]
    if not any(source):
        raise BasePointNotInProjection(
            f"base point {base!r} is not a first coordinate of any pair"
        )
    # Global cycle scan first: properness must fail for any positive cycle,
    # including ones no chain from s1 can reach.
    full = scan_gain_digraph(xs, ys, cost, tol=tol)
    if full.cycle is not None:
        raise NotCyclicallyMonotone(
            f"pairs contain a cycle with gain {full.cycle_gain:.6g}",
            full.cycle,
            full.cycle_gain,
        )
    scan = scan_gain_digraph(xs, ys, cost, tol=tol, source_mask=source)
    longest = scan.longest
    m = len(deduped)
    pts = _dedup_vecs(eval_points)
    values = []
    for x in pts:
        if x == base:
            values.append(0.0)
            continue
        best = -math.inf
        for v in range(m):
            r = longest[v] + cost.value(x, ys[v]) - cost.value(xs[v], ys[v])
            if r > best:
                best = r
        values.append(float(best))
    return Potential(pts, tuple(values))


def c_conjugate(
    f: Potential,
    cost: PairwiseCost,
    eval_points: Sequence[float | Sequence[float]],
) -> Potential:
    """Discrete c-conjugate f^c(y) = max_x (c(x, y) - f(x)) over f's table.

    Ties in the maximiser break toward the lowest domain index; the chosen
    indices are recorded on the result for reproducibility.  Raises
    ImproperInput when f has no finite tabulated value to maximise over.
    """
    entries = [(i, p, v) for i, (p, v) in enumerate(zip(f.points, f.values))
               if v != math.inf]
    if not entries:
        raise ImproperInput("cannot conjugate a potential with no finite values")
    pts = _dedup_vecs(eval_points)
    values = []
    arg = []
    for y in pts:
        best = -math.inf
        best_i = -1
        for i, x, v in entries:
            r = cost.value(x, y) - v
            if r > best:
                best = r
                best_i = i
        values.append(float(best))
        arg.append(best_i)
    return Potential(pts, tuple(values), argmax=tuple(arg))


@dataclass(frozen=True)
class SubdiffGraph:
    """Candidate pairs achieving Young-Fenchel equality, with residuals."""

    pairs: tuple[tuple[Vec, Vec], ...]
    residuals: tuple[float, ...]
    tolerance: float

    def to_json(self) -> dict:
        return {
            "pairs": [[list(x), list(y)] for x, y in self.pairs],
            "residuals": list(self.residuals),
            "tolerance": self.tolerance,
        }


def c_subdifferential_graph(
    f: Potential,
    cost: PairwiseCost,
    candidates: Sequence[tuple],
    tol: float = DEFAULT_TOL,
) -> SubdiffGraph:
    """Filter candidate pairs down to the c-subdifferential graph of f.

    A pair (x, y) is retained when |f(x) + f^c(y) - c(x, y)| <= tol, with
    f^c the discrete conjugate over f's table.  Candidates where f is +inf
    are never retained.
    """
    cand = _dedup_pairs(candidates)
    conj = c_conjugate(f, cost, [y for _, y in cand])
    kept = []
    residuals = []
    for x, y in cand:
        fx = f.value_at(x)
        if fx == math.inf:
            continue
        residual = fx + conj.value_at(y) - cost.value(x, y)
        if abs(residual) <= tol:
            kept.append((x, y))
            residuals.append(float(residual))
    return SubdiffGraph(tuple(kept), tuple(residuals), tol)


@dataclass(frozen=True)
class AntiderivativeCheck:
    """Outcome of the antiderivative test: max over pairs and domain probes
    of f(x1) + c(x1', x2) - f(x1') - c(x1, x2)."""

    holds: bool
    max_residual: float


def verify_antiderivative(
    f: Potential,
    pairs: Sequence[tuple],
    cost: PairwiseCost,
    tol: float = DEFAULT_TOL,
) -> AntiderivativeCheck:
    """Check that every pair lies in the c-subdifferential graph of f.

    For each pair (x1, x2) and every tabulated probe x1' with finite value,
    the subgradient inequality f(x1) + c(x1', x2) <= f(x1') + c(x1, x2)
    must hold within tol.  Returns the worst residual; a pair where f is
    +inf fails outright.
    """
    cand = _dedup_pairs(pairs)
    probes = f.finite_entries()
    worst = -math.inf
    for x1, x2 in cand:
        fx = f.value_at(x1)
        if fx == math.inf:
            return AntiderivativeCheck(False, math.inf)
        for x1p, fv in probes:
            residual = fx + cost.value(x1p, x2) - fv - cost.value(x1, x2)
            if residual > worst:
                worst = residual
    return AntiderivativeCheck(worst <= tol, worst)
