"""Monotonicity verifiers for finite point sets under pairwise-sum costs.

A set G is n-c-monotone when no relabelling of marginal columns raises the
total cost: for every n-tuple drawn from G (repetition allowed) and all
permutations (s_1, ..., s_N) of the tuple positions,

    sum_j c(x_1^{s_1(j)}, ..., x_N^{s_N(j)})  <=  sum_j c(x_1^j, ..., x_N^j).

Fixing s_1 to the identity loses no generality (relabel j by s_1^{-1}), and
enumerating multisets instead of ordered tuples loses none either, so the
brute-force verifier walks multisets in lexicographic index order and
permutation tuples in lexicographic order, reporting the first violation it
meets.  c-monotone means 2-c-monotone.

For two marginals, cyclic monotonicity is equivalent to the absence of a
positive-gain cycle in the digraph on pairs with edge weight

    w(p -> q) = c(x_q, y_p) - c(x_p, y_p),

which this module detects by Bellman-Ford relaxation on negated weights.
The same scan powers the Rockafellar construction in
:mod:`monosplit.antiderivative`; properness there fails exactly when a
positive cycle exists here.

All inequality checks use an absolute tolerance (default 1e-9): violations
not exceeding it count as holding.  Verifiers are deterministic; ties in
cycle extraction break toward the lowest pair index.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import (
    CostSpec,
    GammaSet,
    PairwiseCost,
    Point,
    Vec,
    as_vec,
    classical_cost,
    project_pair,
)
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    InputValidationError,
    NotOneDimensional,
    OrderTooLarge,
)

DEFAULT_TOL = 1e-9
BRUTE_FORCE_BUDGET = 50_000_000
COUPLING_BUDGET = 2_000_000


@dataclass(frozen=True)
class Witness:
    """A concrete violation of the monotonicity inequality.

    Attributes:
        kind: how the violation was found ("permutation", "pair", "cycle",
            "signs"); the inequality content is identical for all kinds.
        points: the tuples x^1, ..., x^n involved.
        permutations: one permutation per marginal, as 0-based image tuples;
            entry i sends position j to permutations[i][j].
        permuted_sum: sum of costs after applying the permutations.
        diagonal_sum: sum of costs of the tuples as given.
        value: optional kind-specific scalar (inner product for "pair",
            cycle gain for "cycle", sign product for "signs").
    """

    kind: str
    points: tuple[Point, ...]
    permutations: tuple[tuple[int, ...], ...]
    permuted_sum: float
    diagonal_sum: float
    value: float | None = None

    @property
    def gain(self) -> float:
        return self.permuted_sum - self.diagonal_sum

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "points": [[list(x) for x in p] for p in self.points],
            "permutations": [list(s) for s in self.permutations],
            "permuted_sum": self.permuted_sum,
            "diagonal_sum": self.diagonal_sum,
            "value": self.value,
        }


@dataclass(frozen=True)
class MonotonicityVerdict:
    """Outcome of a monotonicity check.

    Attributes:
        holds: whether every examined inequality held within tolerance.
        witness: a violation when holds is false, else None.
        checked: number of inequality comparisons examined.
        tolerance: the absolute tolerance used.
    """

    holds: bool
    witness: Witness | None
    checked: int
    tolerance: float

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "witness": self.witness.to_json() if self.witness else None,
            "checked": self.checked,
            "tolerance": self.tolerance,
        }


def recheck_witness(witness: Witness, spec: CostSpec) -> tuple[float, float]:
    """Re-evaluate both sides of a witness straight through the cost.

    Independent of every verifier: builds the permuted tuples explicitly and
    sums eval_total_cost.  Returns (permuted_sum, diagonal_sum).
    """
    n = len(witness.points)
    if len(witness.permutations) != spec.n_marginals:
        raise DimensionMismatch("witness permutation count must match marginals")
    permuted = 0.0
    diagonal = 0.0
    for j in range(n):
        mixed = tuple(
            witness.points[witness.permutations[i][j]][i]
            for i in range(spec.n_marginals)
        )
        permuted += spec.total(mixed)
        diagonal += spec.total(witness.points[j])
    return permuted, diagonal


# ---------------------------------------------------------------------------
# Cost matrices and the gain digraph
# ---------------------------------------------------------------------------


def _pair_cost_matrix(cost: PairwiseCost, xs: Sequence[Vec], ys: Sequence[Vec]) -> np.ndarray:
    """M[a, b] = cost(xs[a], ys[b]) as a dense float array."""
    if cost.kind == "inner_product":
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        return cost.sign * (x @ y.T)
    if cost.kind == "bilinear":
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        a = np.asarray(cost.matrix, dtype=float)
        return cost.sign * (x @ a @ y.T)
    if cost.kind == "half_sq_dist":
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        diff = x[:, None, :] - y[None, :, :]
        return cost.sign * 0.5 * np.einsum("abd,abd->ab", diff, diff)
    out = np.empty((len(xs), len(ys)))
    for a, xa in enumerate(xs):
        for b, yb in enumerate(ys):
            out[a, b] = cost.value(xa, yb)
    return out


@dataclass(frozen=True)
class GainScan:
    """Result of scanning the two-marginal gain digraph.

    Attributes:
        gains: gains[u, v] = c(x_v, y_u) - c(x_u, y_u).
        longest: best chain gain into each vertex (from the configured
            sources, or from anywhere when sources is None).
        cycle: vertex indices of a positive cycle, lowest index first, or
            None when every cycle gain is within tolerance.
        cycle_gain: net gain of that cycle (0.0 when cycle is None).
    """

    gains: np.ndarray
    longest: np.ndarray
    cycle: tuple[int, ...] | None
    cycle_gain: float


def scan_gain_digraph(
    xs: Sequence[Vec],
    ys: Sequence[Vec],
    cost: PairwiseCost,
    tol: float = DEFAULT_TOL,
    source_mask: Sequence[bool] | None = None,
) -> GainScan:
    """Longest chain gains and positive-cycle detection in one pass.

    Runs m rounds of Bellman-Ford relaxation on negated gains (m = number of
    pairs).  An improvement in the final round signals a cycle; candidate
    vertices are scanned in ascending index, each extracted cycle is rotated
    to start at its lowest index, and the first one whose recomputed gain
    exceeds tol is reported.  Cycles with gain within tol are ignored, so
    the verdict matches the tolerance convention of the verifiers.
    """
    m = len(xs)
    cm = _pair_cost_matrix(cost, xs, ys)  # cm[a, b] = c(x_a, y_b)
    diag = np.diag(cm).copy()
    gains = cm.T - diag[:, None]  # gains[u, v] = c(x_v, y_u) - c(x_u, y_u)
    np.fill_diagonal(gains, 0.0)
    weights = -gains
    if source_mask is None:
        dist = np.zeros(m)
    else:
        dist = np.where(np.asarray(source_mask, dtype=bool), 0.0, np.inf)
    pred = np.full(m, -1, dtype=int)
    improved = np.zeros(m, dtype=bool)
    for _ in range(m):
        cand = dist[:, None] + weights
        best = cand.min(axis=0)
        arg = cand.argmin(axis=0)
        improved = best < dist
        if not improved.any():
            break
        pred[improved] = arg[improved]
        dist = np.where(improved, best, dist)

    cycle = None
    cycle_gain = 0.0
    if improved.any():
        seen_cycles: set[tuple[int, ...]] = set()
        for v in np.flatnonzero(improved):
            # Follow predecessors until a vertex repeats (a cycle of the
            # predecessor graph) or the chain dead-ends at an initial vertex.
            seen_at: dict[int, int] = {}
            chain: list[int] = []
            u = int(v)
            while u != -1 and u not in seen_at:
                seen_at[u] = len(chain)
                chain.append(u)
                u = int(pred[u])
            if u == -1:
                continue
            cyc = tuple(reversed(chain[seen_at[u]:]))  # forward edge order
            rot = cyc.index(min(cyc))
            cyc = cyc[rot:] + cyc[:rot]
            if cyc in seen_cycles:
                continue
            seen_cycles.add(cyc)
            gain = float(
                sum(gains[cyc[k], cyc[(k + 1) % len(cyc)]] for k in range(len(cyc)))
            )
            if gain > tol:
                cycle = cyc
                cycle_gain = gain
                break
    return GainScan(gains=gains, longest=-dist, cycle=cycle, cycle_gain=cycle_gain)


def _dedup_pairs(pairs: Sequence[tuple]) -> list[tuple[Vec, Vec]]:
    seen: dict[tuple[Vec, Vec], None] = {}
    for x, y in pairs:
        seen.setdefault((as_vec(x), as_vec(y)), None)
    if not seen:
        raise InputValidationError("the pair list must be nonempty")
    out = list(seen)
    dx = len(out[0][0])
    dy = len(out[0][1])
    for x, y in out:
        if len(x) != dx or len(y) != dy:
            raise DimensionMismatch("pairs mix marginal dimensions")
    return out


def is_two_marginal_cyclically_monotone(
    pairs: Sequence[tuple],
    cost: PairwiseCost,
    tol: float = DEFAULT_TOL,
) -> MonotonicityVerdict:
    """Cyclic monotonicity of a finite set of (x, y) pairs.

    Equivalent to n-c-monotonicity for every n at once: a violating
    permutation decomposes into cycles, and a cyclic shift along any
    positive cycle is itself a violation.
    """
    deduped = _dedup_pairs(pairs)
    m = len(deduped)
    xs = [p[0] for p in deduped]
    ys = [p[1] for p in deduped]
    scan = scan_gain_digraph(xs, ys, cost, tol=tol)
    if scan.cycle is None:
        return MonotonicityVerdict(True, None, checked=m * m, tolerance=tol)
    cyc = scan.cycle
    k = len(cyc)
    points = tuple((xs[c], ys[c]) for c in cyc)
    forward = tuple((j + 1) % k for j in range(k))
    identity = tuple(range(k))
    permuted = sum(cost.value(points[(j + 1) % k][0], points[j][1]) for j in range(k))
    diagonal = sum(cost.value(points[j][0], points[j][1]) for j in range(k))
    witness = Witness(
        kind="cycle",
        points=points,
        permutations=(forward, identity),
        permuted_sum=float(permuted),
        diagonal_sum=float(diagonal),
        value=scan.cycle_gain,
    )
    return MonotonicityVerdict(False, witness, checked=m * m, tolerance=tol)


# ---------------------------------------------------------------------------
# Brute-force permutation verifiers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _perm_array(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=int)


def _check_gamma_against_spec(g: GammaSet, spec: CostSpec) -> None:
    if g.dims != spec.dims:
        raise DimensionMismatch(
            f"point set dims {g.dims} do not match cost dims {spec.dims}"
        )


def _full_pair_matrices(g: GammaSet, spec: CostSpec) -> dict[tuple[int, int], np.ndarray]:
    mats = {}
    for (i, j), cost in spec.pairs.items():
        xs = [p[i - 1] for p in g.points]
        ys = [p[j - 1] for p in g.points]
        mats[(i, j)] = _pair_cost_matrix(cost, xs, ys)
    return mats


def _shift_vectors(g: GammaSet, spec: CostSpec) -> list[np.ndarray]:
    out = []
    for i in range(1, g.n_marginals + 1):
        out.append(np.array([spec.shift_value(i, p[i - 1]) for p in g.points]))
    return out


def is_n_c_monotone_bruteforce(
    g: GammaSet,
    spec: CostSpec,
    n: int,
    tol: float = DEFAULT_TOL,
    budget: int = BRUTE_FORCE_BUDGET,
) -> MonotonicityVerdict:
    """Exhaustive order-n monotonicity check straight from the definition.

    Walks every size-n multiset of points (repetition allowed; a tuple may
    use the same point twice) and every permutation tuple with the first
    marginal fixed to the identity.  Cost sums are assembled from
    precomputed pairwise matrices, which caches evaluations but enumerates
    every comparison exactly.  The first violation in (multiset,
    permutation) lexicographic order becomes the witness.

    Raises OrderTooLarge when n > 7, when the number of marginals exceeds 4,
    or when multisets * permutation tuples would exceed the budget.
    """
    _check_gamma_against_spec(g, spec)
    if n < 1:
        raise InputValidationError("order n must be at least 1")
    if n > 7:
        raise OrderTooLarge(f"order {n} is beyond the factorial guard of 7")
    nmarg = g.n_marginals
    if nmarg > 4:
        raise OrderTooLarge("full permutation enumeration supports at most 4 marginals")
    n_multisets = math.comb(g.size + n - 1, n)
    per_multiset = math.factorial(n) ** (nmarg - 1)
    if n_multisets * per_multiset > budget:
        raise OrderTooLarge(
            f"{n_multisets} multisets x {per_multiset} permutation tuples "
            f"exceeds the budget of {budget}"
        )

    mats = _full_pair_matrices(g, spec)
    shifts = _shift_vectors(g, spec)
    perms = _perm_array(n)
    pcount = len(perms)
    rows = np.arange(n)
    checked = 0

    for combo in itertools.combinations_with_replacement(range(g.size), n):
        idx = np.array(combo)
        sub = {key: m[np.ix_(idx, idx)] for key, m in mats.items()}
        svec = [s[idx] for s in shifts]
        base = float(svec[0].sum())
        # terms[k] aggregates pair (1, k+2) plus the shift of marginal k+2,
        # indexed by the permutation of that marginal
        terms = []
        for k in range(2, nmarg + 1):
            t = sub[(1, k)][rows[None, :], perms].sum(axis=1)
            t = t + svec[k - 1][perms].sum(axis=1)
            terms.append(t)
        if nmarg == 2:
            vals = base + terms[0]
        elif nmarg == 3:
            d23 = np.zeros((pcount, pcount))
            m23 = sub[(2, 3)]
            for j in range(n):
                col = perms[:, j]
                d23 += m23[col[:, None], col[None, :]]
            vals = base + terms[0][:, None] + terms[1][None, :] + d23
        else:
            pairs_mid = {}
            for a, b in ((2, 3), (2, 4), (3, 4)):
                d = np.zeros((pcount, pcount))
                mab = sub[(a, b)]
                for j in range(n):
                    col = perms[:, j]
                    d += mab[col[:, None], col[None, :]]
                pairs_mid[(a, b)] = d
            vals = (
                base
                + terms[0][:, None, None]
                + terms[1][None, :, None]
                + terms[2][None, None, :]
                + pairs_mid[(2, 3)][:, :, None]
                + pairs_mid[(2, 4)][:, None, :]
                + pairs_mid[(3, 4)][None, :, :]
            )
        diagonal = float(vals[(0,) * (nmarg - 1)])
        checked += per_multiset
        viol = vals > diagonal + tol
        if viol.any():
            first = np.argwhere(viol)[0]
            sigmas = (tuple(range(n)),) + tuple(
                tuple(int(v) for v in perms[pi]) for pi in first
            )
            witness = Witness(
                kind="permutation",
                points=tuple(g.points[a] for a in combo),
                permutations=sigmas,
                permuted_sum=float(vals[tuple(first)]),
                diagonal_sum=diagonal,
            )
            return MonotonicityVerdict(False, witness, checked, tol)
    return MonotonicityVerdict(True, None, checked, tol)


def is_c_monotone(g: GammaSet, spec: CostSpec, tol: float = DEFAULT_TOL) -> MonotonicityVerdict:
    """2-c-monotonicity: no coordinate swap between two points pays off.

    For every unordered pair of points and every nonempty set S of marginals
    (first marginal fixed, so S runs over subsets of {2..N}), compares the
    cost of the two S-swapped tuples against the originals.  O(|g|^2 2^N)
    cost evaluations, all through eval_total_cost.
    """
    _check_gamma_against_spec(g, spec)
    nmarg = g.n_marginals
    masks = [
        mask for r in range(1, nmarg) for mask in itertools.combinations(range(2, nmarg + 1), r)
    ]
    checked = 0
    for a in range(g.size):
        for b in range(a + 1, g.size):
            p, q = g.points[a], g.points[b]
            diagonal = spec.total(p) + spec.total(q)
            for mask in masks:
                swapped = set(mask)
                mix_pq = tuple(
                    q[i - 1] if i in swapped else p[i - 1] for i in range(1, nmarg + 1)
                )
                mix_qp = tuple(
                    p[i - 1] if i in swapped else q[i - 1] for i in range(1, nmarg + 1)
                )
                permuted = spec.total(mix_pq) + spec.total(mix_qp)
                checked += 1
                if permuted > diagonal + tol:
                    sigmas = tuple(
                        (1, 0) if i in swapped else (0, 1) for i in range(1, nmarg + 1)
                    )
                    witness = Witness(
                        kind="permutation",
                        points=(p, q),
                        permutations=sigmas,
                        permuted_sum=permuted,
                        diagonal_sum=diagonal,
                    )
                    return MonotonicityVerdict(False, witness, checked, tol)
    return MonotonicityVerdict(True, None, checked, tol)


def is_pair_monotone_classical(
    pairs: Sequence[tuple],
    tol: float = 1e-12,
) -> MonotonicityVerdict:
    """Monotone relation in the classical sense: <x - x', y - y'> >= -tol.

    The failing inner product is stored as the witness value; swapping the
    second coordinates of the two pairs realises it as a cost violation for
    the inner-product coupling.
    """
    deduped = _dedup_pairs(pairs)
    inner = PairwiseCost.inner_product()
    checked = 0
    for a in range(len(deduped)):
        for b in range(a + 1, len(deduped)):
            (xa, ya), (xb, yb) = deduped[a], deduped[b]
            checked += 1
            v = sum((p - q) * (r - s) for p, q, r, s in zip(xa, xb, ya, yb))
            if v < -tol:
                diagonal = inner.value(xa, ya) + inner.value(xb, yb)
                permuted = inner.value(xa, yb) + inner.value(xb, ya)
                witness = Witness(
                    kind="pair",
                    points=((xa, ya), (xb, yb)),
                    permutations=((0, 1), (1, 0)),
                    permuted_sum=permuted,
                    diagonal_sum=diagonal,
                    value=v,
                )
                return MonotonicityVerdict(False, witness, checked, tol)
    return MonotonicityVerdict(True, None, checked, tol)


def sign_criterion_1d(g: GammaSet, tol: float = DEFAULT_TOL) -> MonotonicityVerdict:
    """Difference-sign test for scalar marginals.

    Holds when for every two points of g the coordinatewise differences all
    share one sign (entries within tol of zero count as both).  Equivalent
    to c-monotonicity for the classical costs; a mixed-sign pair yields an
    explicit violation by swapping the negative-difference coordinates.
    """
    if any(d != 1 for d in g.dims):
        raise NotOneDimensional("the sign criterion needs scalar marginals")
    spec = classical_cost("c1", g.n_marginals, 1)
    checked = 0
    for a in range(g.size):
        for b in range(a + 1, g.size):
            p, q = g.points[a], g.points[b]
            t = [p[i][0] - q[i][0] for i in range(g.n_marginals)]
            checked += 1
            pos = sum(v for v in t if v > tol)
            neg = sum(v for v in t if v < -tol)
            if pos > 0.0 and neg < 0.0:
                swapped = {i + 1 for i, v in enumerate(t) if v < -tol}
                mix_pq = tuple(
                    q[i - 1] if i in swapped else p[i - 1]
                    for i in range(1, g.n_marginals + 1)
                )
                mix_qp = tuple(
                    p[i - 1] if i in swapped else q[i - 1]
                    for i in range(1, g.n_marginals + 1)
                )
                witness = Witness(
                    kind="signs",
                    points=(p, q),
                    permutations=tuple(
                        (1, 0) if i in swapped else (0, 1)
                        for i in range(1, g.n_marginals + 1)
                    ),
                    permuted_sum=spec.total(mix_pq) + spec.total(mix_qp),
                    diagonal_sum=spec.total(p) + spec.total(q),
                    value=pos * neg,
                )
                return MonotonicityVerdict(False, witness, checked, tol)
    return MonotonicityVerdict(True, None, checked, tol)


# ---------------------------------------------------------------------------
# Projection condition and the coupling oracle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectionReport:
    """Cyclic-monotonicity verdicts for every pair projection of a set.

    The condition is sufficient for full c-cyclic monotonicity, and not
    necessary: a set can be monotone while some projection is not.
    """

    verdicts: dict[tuple[int, int], MonotonicityVerdict]
    all_hold: bool

    def to_json(self) -> dict:
        return {
            "pairs": {f"{i},{j}": v.to_json() for (i, j), v in sorted(self.verdicts.items())},
            "all_hold": self.all_hold,
        }


def check_projection_condition(
    g: GammaSet,
    spec: CostSpec,
    tol: float = DEFAULT_TOL,
) -> ProjectionReport:
    """Check every pair projection of g for c_ij-cyclic monotonicity."""
    _check_gamma_against_spec(g, spec)
    verdicts = {}
    for (i, j), cost in sorted(spec.pairs.items()):
        verdicts[(i, j)] = is_two_marginal_cyclically_monotone(
            project_pair(g, i, j), cost, tol=tol
        )
    return ProjectionReport(verdicts, all(v.holds for v in verdicts.values()))


@dataclass(frozen=True)
class OptimalCoupling:
    """Exhaustive multi-marginal assignment optimum over permutations.

    Attributes:
        value: the maximal total cost over all (s_2, ..., s_N).
        sigmas: the first lexicographic maximiser, one 0-based permutation
            per marginal after the first.
        diagonal_value: total cost of the identity assignment.
        checked: number of permutation tuples evaluated.
    """

    value: float
    sigmas: tuple[tuple[int, ...], ...]
    diagonal_value: float
    checked: int

    def diagonal_attains(self, tol: float = DEFAULT_TOL) -> bool:
        return self.value <= self.diagonal_value + tol


def brute_force_optimal_coupling(
    marginal_lists: Sequence[Sequence[float | Sequence[float]]],
    spec: CostSpec,
    budget: int = COUPLING_BUDGET,
) -> OptimalCoupling:
    """Maximise the assignment cost by plain enumeration.

    Takes N columns of n marginal points and evaluates every way of
    permuting columns 2..N against the first, each through eval_total_cost.
    Serves as the independent oracle for the monotonicity verifiers: the
    diagonal attains the maximum exactly when the diagonal set is
    n-c-monotone.
    """
    nmarg = spec.n_marginals
    if len(marginal_lists) != nmarg:
        raise DimensionMismatch("need one column of points per marginal")
    cols = [tuple(as_vec(x) for x in col) for col in marginal_lists]
    n = len(cols[0])
    if n == 0 or any(len(col) != n for col in cols):
        raise InputValidationError("marginal columns must share one nonzero length")
    total_tuples = math.factorial(n) ** (nmarg - 1)
    if total_tuples > budget:
        raise BudgetExceeded(
            f"{total_tuples} permutation tuples exceed the budget of {budget}"
        )
    best = -math.inf
    best_sigmas: tuple[tuple[int, ...], ...] | None = None
    diagonal_value = 0.0
    checked = 0
    for sigmas in itertools.product(itertools.permutations(range(n)), repeat=nmarg - 1):
        value = 0.0
        for j in range(n):
            point = (cols[0][j],) + tuple(
                cols[k][sigmas[k - 1][j]] for k in range(1, nmarg)
            )
            value += spec.total(point)
        if checked == 0:
            diagonal_value = value
        checked += 1
        if value > best:
            best = value
            best_sigmas = sigmas
    assert best_sigmas is not None
    return OptimalCoupling(best, best_sigmas, diagonal_value, checked)
