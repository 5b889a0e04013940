"""Command-line front end: verification workflows, splitting construction,
built-in example reproduction, and report/figure-data emission.

Commands
    verify       monotonicity checks on a point-set file
    split        build chain potentials and certify them
    example      reproduce a built-in worked example end to end
    rockafellar  tabulate a chain antiderivative for a pair set

Reports are JSON with floats at 17 significant digits and keys in a fixed
order, so identical inputs and seed produce byte-identical output.  Exit
codes: 0 when every requested property holds, 1 when a property is
violated (the report carries the witness), 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .antiderivative import rockafellar_potential
from .core import (
    CostSpec,
    GammaSet,
    PairwiseCost,
    classical_cost,
    dumps_json,
    loads_json,
    project,
)
from .errors import (
    BudgetExceeded,
    InputValidationError,
    MonosplitError,
    NotCyclicallyMonotone,
    ParseError,
    ProjectionNotMonotone,
    UnknownExample,
)
from .monotone import (
    check_projection_condition,
    is_c_monotone,
    is_n_c_monotone_bruteforce,
    sign_criterion_1d,
)
from .onedim import (
    MonotoneBijection,
    curve_potentials,
    emit_curve_figure_data,
    knott_smith_alphas,
    knott_smith_forms,
    knott_smith_potentials,
    young_check,
)
from .quadratic import (
    commuting_spd_gamma,
    counterexample_construct,
    counterexample_verify,
    quadratic_splitting,
    random_commuting_spds,
)
from .splitting import SplittingTuple, assemble_splitting_tuple, certify_splitting

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

EXAMPLE_NAMES = ("quadratic", "counterexample", "curves", "knott-smith", "young")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run; echoed into every report."""

    command: str
    inputs: tuple[str, ...]
    cost: str | None
    tol: float
    seed: int
    samples: int
    out: str | None
    fmt: str

    def __post_init__(self):
        if self.tol <= 0.0:
            raise InputValidationError("tolerance must be positive")
        if self.samples < 0:
            raise InputValidationError("sample count must be nonnegative")

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": list(self.inputs),
            "cost": self.cost,
            "tol": self.tol,
            "seed": self.seed,
            "samples": self.samples,
            "out": self.out,
            "format": self.fmt,
        }


def _config(args: argparse.Namespace, inputs: tuple[str, ...]) -> RunConfig:
    return RunConfig(
        command=args.command,
        inputs=inputs,
        cost=getattr(args, "cost", None),
        tol=args.tol,
        seed=args.seed,
        samples=getattr(args, "samples", 0),
        out=args.out,
        fmt=args.format,
    )


def _read_json_file(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return loads_json(text)


def _load_gamma(path: str) -> GammaSet:
    return GammaSet.from_json(_read_json_file(path))


def _resolve_cost(selector: str, g: GammaSet) -> CostSpec:
    """c1/c2/c3 build the classical cost for g's shape; anything else is a
    path to a CostSpec JSON file."""
    if selector in ("c1", "c2", "c3"):
        dims = set(g.dims)
        if len(dims) != 1:
            raise InputValidationError(
                "classical costs need equal marginal dimensions; "
                "supply a cost file instead"
            )
        return classical_cost(selector, g.n_marginals, g.dims[0])
    return CostSpec.from_json(_read_json_file(selector))


def _parse_grid(text: str) -> tuple[float, ...]:
    """Expand "lo:hi:step" into lo, lo+step, ..., up to hi inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"grid must look like lo:hi:step, got {text!r}")
    try:
        lo, hi, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"bad grid numbers in {text!r}") from exc
    if step <= 0.0 or hi < lo:
        raise ParseError("grid needs step > 0 and hi >= lo")
    count = int(round((hi - lo) / step))
    pts = [lo + k * step for k in range(count + 1)]
    if pts[-1] > hi + 0.5 * step:
        pts.pop()
    return tuple(pts)


def _parse_vec(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise ParseError(f"bad vector {text!r}; use comma-separated floats") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text)


def _emit_report(doc: dict, out: str | None) -> None:
    _emit(dumps_json(doc), out)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    g = _load_gamma(args.gamma)
    spec = _resolve_cost(args.cost, g)
    config = _config(args, (args.gamma,))

    projection = check_projection_condition(g, spec, tol=args.tol)
    pairwise = is_c_monotone(g, spec, tol=args.tol)
    holds = projection.all_hold and pairwise.holds

    doc: dict = {
        "config": config.to_json(),
        "n_points": g.size,
        "dims": list(g.dims),
        "projection_condition": projection.to_json(),
        "pairwise_monotone": pairwise.to_json(),
    }
    if args.brute is not None:
        brute: dict = {}
        for order in range(2, args.brute + 1):
            verdict = is_n_c_monotone_bruteforce(g, spec, order, tol=args.tol)
            brute[str(order)] = verdict.to_json()
            holds = holds and verdict.holds
        doc["bruteforce"] = brute
    if args.sign_criterion:
        signs = sign_criterion_1d(g, tol=args.tol)
        doc["sign_criterion"] = signs.to_json()
        holds = holds and signs.holds
    doc["all_hold"] = holds
    _emit_report(doc, args.out)
    return EXIT_OK if holds else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# split
# ---------------------------------------------------------------------------


def cmd_split(args: argparse.Namespace) -> int:
    g = _load_gamma(args.gamma)
    spec = _resolve_cost(args.cost, g)
    config = _config(args, (args.gamma,))
    if not (0 <= args.base < g.size):
        raise InputValidationError(f"--base must index a point (0..{g.size - 1})")

    eval_grids = None
    if args.grid is not None:
        if any(d != 1 for d in g.dims):
            raise InputValidationError("--grid applies only to scalar marginals")
        grid = _parse_grid(args.grid)
        eval_grids = [[(t,) for t in grid] for _ in range(g.n_marginals)]

    try:
        tup = assemble_splitting_tuple(
            g, spec, s=g.points[args.base], eval_grids=eval_grids, tol=args.tol
        )
    except ProjectionNotMonotone as exc:
        sys.stderr.write(
            f"projection {exc.pair} is not cyclically monotone "
            f"(cycle {list(exc.cycle)}, gain {exc.gain:.6g})\n"
        )
        return EXIT_VIOLATION

    cert = certify_splitting(
        tup, g, spec, n_samples=args.samples, seed=args.seed,
        ineq_tol=args.tol, eq_tol=args.tol,
    )
    doc = {
        "config": config.to_json(),
        "potentials": [u.to_json() for u in tup.potentials],
        "certificate": cert.to_json(),
    }
    if args.out is None:
        _emit_report(doc, None)
    else:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for i, u in enumerate(tup.potentials, start=1):
            (out_dir / f"potential_{i}.json").write_text(dumps_json(u.to_json()))
        (out_dir / "certificate.json").write_text(dumps_json(cert.to_json()))
        (out_dir / "report.json").write_text(dumps_json(doc))
    return EXIT_OK if cert.passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# example
# ---------------------------------------------------------------------------


def _example_quadratic(args: argparse.Namespace, config: RunConfig) -> tuple[dict, bool]:
    mats = random_commuting_spds(args.n, args.dim, seed=args.seed)
    qs = quadratic_splitting(mats)
    rng = np.random.default_rng(args.seed + 1)
    vs = rng.uniform(-2.0, 2.0, size=(max(2, args.samples // 50), args.dim))
    g = commuting_spd_gamma(mats, vs)
    cert1 = certify_splitting(
        qs.potentials(), g, classical_cost("c1", args.n, args.dim),
        n_samples=args.samples, seed=args.seed, ineq_tol=args.tol, eq_tol=args.tol,
    )
    cert3 = certify_splitting(
        qs.shifted_potentials(), g, classical_cost("c3", args.n, args.dim),
        n_samples=args.samples, seed=args.seed, ineq_tol=args.tol, eq_tol=args.tol,
    )
    doc = {
        "config": config.to_json(),
        "Q": [m.to_json() for m in mats],
        "splitting": qs.to_json(),
        "certificate_c1": cert1.to_json(),
        "certificate_c3": cert3.to_json(),
    }
    return doc, cert1.passed and cert3.passed


def _example_counterexample(args: argparse.Namespace, config: RunConfig) -> tuple[dict, bool]:
    ce = counterexample_construct()
    rep = counterexample_verify(
        n_span=max(1, args.samples // 50), n_random=args.samples, seed=args.seed
    )
    doc = {
        "config": config.to_json(),
        "kernel_basis": [list(k) for k in ce.kernel_basis],
        "report": rep.to_json(),
    }
    return doc, rep.passed


def _example_curves(args: argparse.Namespace, config: RunConfig) -> tuple[dict, bool]:
    alphas = knott_smith_alphas()
    ts = _parse_grid(args.grid)
    if args.format == "csv":
        csv = emit_curve_figure_data(alphas, (ts[0], ts[-1]), len(ts))
        _emit(csv, args.out)
        return {}, True
    knots = sorted({a(t) for a in alphas for t in ts})
    cp = curve_potentials(alphas, knots)
    tup = SplittingTuple(cp.potentials, {}, {})
    g = GammaSet.from_points([[a(t) for a in alphas] for t in ts])
    prod = [
        pt
        for pt in itertools.product(*(project(g, i + 1) for i in range(3)))
    ]
    spec = classical_cost("c1", 3, 1)
    quad_tol = max(args.tol, 1e-8)
    cert = certify_splitting(
        tup, g, spec, test_points=prod, ineq_tol=quad_tol, eq_tol=quad_tol
    )
    doc = {
        "config": config.to_json(),
        "n_grid": len(ts),
        "quadrature_bounds": list(cp.error_bounds),
        "certificate": cert.to_json(),
    }
    return doc, cert.passed


def _example_knott_smith(args: argparse.Namespace, config: RunConfig) -> tuple[dict, bool]:
    alphas = knott_smith_alphas()
    ts = _parse_grid(f"{-args.tmax}:{args.tmax}:0.1")
    csv = emit_curve_figure_data(alphas, (ts[0], ts[-1]), len(ts))
    if args.format == "csv":
        _emit(csv, args.out)
        return {}, True

    forms, starred = knott_smith_forms()
    knots = sorted({a(t) for a in alphas for t in ts})
    cp = curve_potentials(alphas, knots)
    max_dev = 0.0
    for pot, form in zip(cp.potentials, forms):
        for p, v in zip(pot.points, pot.values):
            max_dev = max(max_dev, abs(v - form.value(p)))

    g = GammaSet.from_points([[a(t) for a in alphas] for t in ts])
    cert1 = certify_splitting(
        SplittingTuple.from_closed_forms(forms), g, classical_cost("c1", 3, 1),
        n_samples=args.samples, seed=args.seed, ineq_tol=args.tol, eq_tol=args.tol,
    )
    cert3 = certify_splitting(
        SplittingTuple.from_closed_forms(starred), g, classical_cost("c3", 3, 1),
        n_samples=args.samples, seed=args.seed, ineq_tol=args.tol, eq_tol=args.tol,
    )
    spot = knott_smith_potentials(1.0, 1.0, 1.0)
    doc = {
        "config": config.to_json(),
        "quadrature_max_deviation": max_dev,
        "certificate_c1": cert1.to_json(),
        "certificate_c3": cert3.to_json(),
        "spot_check": spot.to_json(),
        "figure_csv": csv,
    }
    ok = (
        cert1.passed
        and cert3.passed
        and max_dev <= 1e-6
        and abs(sum(spot.u) - 3.0) <= 1e-12
    )
    return doc, ok


_YOUNG_MAPS = {"identity": 1.0, "cube": 3.0}


def _example_young(args: argparse.Namespace, config: RunConfig) -> tuple[dict, bool]:
    name = args.g
    if name in _YOUNG_MAPS:
        power = _YOUNG_MAPS[name]
    elif name.startswith("power:"):
        try:
            power = float(name.split(":", 1)[1])
        except ValueError as exc:
            raise ParseError(f"bad power in {name!r}") from exc
        if power <= 0.0:
            raise ParseError("power must be positive")
    else:
        raise ParseError(
            f"unknown map {name!r}; use identity, cube, or power:<p>"
        )
    g = MonotoneBijection.identity() if power == 1.0 else MonotoneBijection.odd_power(power)
    check = young_check(g, args.a, args.b, tol=args.tol)
    doc = {
        "config": config.to_json(),
        "g": name,
        "a": args.a,
        "b": args.b,
        "young": check.to_json(),
    }
    return doc, check.rhs >= check.lhs - args.tol


def cmd_example(args: argparse.Namespace) -> int:
    if args.name not in EXAMPLE_NAMES:
        raise UnknownExample(
            f"unknown example {args.name!r}; choose from {', '.join(EXAMPLE_NAMES)}"
        )
    config = _config(args, ())
    runner = {
        "quadratic": _example_quadratic,
        "counterexample": _example_counterexample,
        "curves": _example_curves,
        "knott-smith": _example_knott_smith,
        "young": _example_young,
    }[args.name]
    doc, ok = runner(args, config)
    if doc:
        _emit_report(doc, args.out)
    return EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# rockafellar
# ---------------------------------------------------------------------------


def _load_pairs(path: str) -> list[tuple]:
    obj = _read_json_file(path)
    try:
        rows = obj["pairs"]
        return [(tuple(_as_floats(x)), tuple(_as_floats(y))) for x, y in rows]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad pairs payload in {path}: {exc}") from exc


def _as_floats(v) -> list[float]:
    if isinstance(v, (int, float)):
        return [float(v)]
    return [float(t) for t in v]


def _pairwise_cost(selector: str) -> PairwiseCost:
    if selector == "c1":
        return PairwiseCost.inner_product()
    if selector == "c2":
        return classical_cost("c2", 2, 1).pair_cost(1, 2)
    if selector == "c3":
        raise InputValidationError(
            "the shifted cost has no extra pairwise part; chains use c1"
        )
    return PairwiseCost.from_json(_read_json_file(selector))


def cmd_rockafellar(args: argparse.Namespace) -> int:
    pairs = _load_pairs(args.pairs)
    cost = _pairwise_cost(args.cost)
    base = _parse_vec(args.base) if args.base is not None else pairs[0][0]
    if args.grid is not None:
        if len(base) != 1:
            raise InputValidationError("--grid applies only to scalar marginals")
        eval_points = [(t,) for t in _parse_grid(args.grid)]
    else:
        eval_points = [p[0] for p in pairs]
    eval_points = list(eval_points) + [tuple(base)]

    config = _config(args, (args.pairs,))
    try:
        pot = rockafellar_potential(cost, pairs, base, eval_points, tol=args.tol)
    except NotCyclicallyMonotone as exc:
        sys.stderr.write(
            f"pairs are not cyclically monotone: cycle {list(exc.cycle)} "
            f"has gain {exc.gain:.6g}\n"
        )
        return EXIT_VIOLATION
    doc = {"config": config.to_json(), "potential": pot.to_json()}
    _emit_report(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, samples_default: int) -> None:
    p.add_argument("--tol", type=float, default=1e-9, help="absolute tolerance")
    p.add_argument("--seed", type=int, default=0, help="RNG seed recorded in reports")
    p.add_argument("--samples", type=int, default=samples_default,
                   help="random test-point count")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="output format where both are meaningful")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="monosplit",
        description="Verify multi-marginal monotonicity and build splitting potentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run monotonicity checks on a point-set file")
    p.add_argument("gamma", help="point-set JSON file")
    p.add_argument("--cost", default="c1",
                   help="c1, c2, c3, or a cost JSON file path")
    p.add_argument("--brute", type=int, default=None, metavar="N",
                   help="also run the permutation oracle for orders 2..N")
    p.add_argument("--sign-criterion", action="store_true",
                   help="also run the 1-D difference-sign test")
    _add_common(p, samples_default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("split", help="build chain potentials and certify them")
    p.add_argument("gamma", help="point-set JSON file")
    p.add_argument("--cost", default="c1",
                   help="c1, c2, c3, or a cost JSON file path")
    p.add_argument("--base", type=int, default=0,
                   help="index of the base point inside the set")
    p.add_argument("--grid", default=None, metavar="lo:hi:step",
                   help="extra scalar evaluation grid for every marginal")
    _add_common(p, samples_default=10_000)
    p.set_defaults(fn=cmd_split)

    p = sub.add_parser("example", help="reproduce a built-in example end to end")
    p.add_argument("name", help=f"one of: {', '.join(EXAMPLE_NAMES)}")
    p.add_argument("--cost", default=None, help=argparse.SUPPRESS)
    p.add_argument("--n", type=int, default=3, help="marginal count (quadratic)")
    p.add_argument("--dim", type=int, default=2, help="marginal dimension (quadratic)")
    p.add_argument("--grid", default="-1.5:1.5:0.1", metavar="lo:hi:step",
                   help="curve parameter grid (curves)")
    p.add_argument("--tmax", type=float, default=1.5,
                   help="parameter range half-width (knott-smith)")
    p.add_argument("--g", default="cube", help="map for young: identity, cube, power:<p>")
    p.add_argument("--a", type=float, default=2.0, help="first argument (young)")
    p.add_argument("--b", type=float, default=1.0, help="second argument (young)")
    _add_common(p, samples_default=10_000)
    p.set_defaults(fn=cmd_example)

    p = sub.add_parser("rockafellar", help="tabulate a chain antiderivative")
    p.add_argument("pairs", help="JSON file with a 'pairs' array of [x, y] rows")
    p.add_argument("--cost", default="c1",
                   help="c1, c2, or a pairwise-cost JSON file path")
    p.add_argument("--base", default=None,
                   help="base point as comma-separated floats (default: first x)")
    p.add_argument("--grid", default=None, metavar="lo:hi:step",
                   help="scalar evaluation grid (default: the pair sources)")
    _add_common(p, samples_default=0)
    p.set_defaults(fn=cmd_rockafellar)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.fn(args)
    except (ParseError, InputValidationError, UnknownExample) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_VIOLATION
    except MonosplitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
