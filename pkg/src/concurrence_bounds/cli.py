"""Command-line front end.

Exit codes: 0 success, 1 self-check failure, 2 invalid state, 3 unreadable or
malformed state file, 4 bad command-line arguments.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import time

import numpy as np

from . import __version__
from .bounds import OptimizerOptions, bound_report
from .errors import BadOptions, BadParams, BadRange, ConcurrenceError, ParseError, UnknownState, ValidationError
from .selfcheck import convention_factor, run_selfcheck
from .states import (
    horodecki_state,
    load_state,
    maximally_entangled,
    product_mixture,
    pure_density_matrix,
    random_state,
    save_state,
)
from .tensor import injected_fault

EXIT_OK = 0
EXIT_SELFCHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_PARSE = 3
EXIT_ARGS = 4

SCAN_HEADER = "a,lower_algebraic,lower_optimized,upper_optimized,negativity,is_ppt,seconds"
STATE_NAMES = ("horodecki", "maxent", "random", "product-mixture")


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    defaults = OptimizerOptions()
    p.add_argument("--seed", type=int, default=defaults.seed)
    p.add_argument("--restarts-lower", type=int, default=defaults.restarts_lower)
    p.add_argument("--restarts-upper", type=int, default=defaults.restarts_upper)
    p.add_argument(
        "--evals",
        type=int,
        default=None,
        help="per-restart evaluation budget for both optimizers "
        f"(defaults: lower {defaults.evals_lower}, upper {defaults.evals_upper})",
    )
    p.add_argument("--embed-n", type=int, default=None, help="rows N of the isometry V, r <= N <= 2r (default 2r)")
    p.add_argument("--rank-tol", type=float, default=None, help="eigenvalue cutoff for the decomposition")


def _options(args) -> OptimizerOptions:
    opts = OptimizerOptions(
        seed=args.seed,
        restarts_lower=args.restarts_lower,
        restarts_upper=args.restarts_upper,
        embed_n=args.embed_n,
    )
    if args.evals is not None:
        opts.evals_lower = opts.evals_upper = args.evals
    opts.validate()
    return opts


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="concbound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("bounds", help="lower and upper concurrence bounds for a state file")
    p.add_argument("state", help="state file (JSON)")
    _add_optimizer_flags(p)
    p.add_argument("--convention", choices=("paper", "wootters"), default="paper")
    p.add_argument("--out", help="also write the full report as JSON")

    p = sub.add_parser("scan", help="bounds along the Horodecki family, as CSV")
    p.add_argument("--a-min", type=float, default=0.1)
    p.add_argument("--a-max", type=float, default=0.9)
    p.add_argument("--steps", type=int, default=9)
    _add_optimizer_flags(p)
    p.add_argument("--no-timing", action="store_true", help="write 0 in the seconds column (byte-stable output)")
    p.add_argument("--out", help="write CSV here instead of standard output")

    p = sub.add_parser("gen", help="write a state file")
    p.add_argument("name", help=f"one of {', '.join(STATE_NAMES)}")
    p.add_argument("out")
    p.add_argument("--a", type=float, help="horodecki parameter")
    p.add_argument("--n", type=int, help="maxent local dimension")
    p.add_argument("--dims", help="n1,n2 for random states")
    p.add_argument("--rank", type=int, help="rank of a random state")
    p.add_argument("--terms", type=int, help="number of product terms")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("selfcheck", help="run the randomized oracle suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--inject-fault", choices=("f-sign",), help=argparse.SUPPRESS)
    return parser


def _parse_dims(text):
    if text is None:
        raise BadParams("--dims is required")
    try:
        n1, n2 = (int(x) for x in text.split(","))
    except ValueError:
        raise BadParams(f"--dims must look like 3,3, got {text!r}") from None
    return n1, n2


def cmd_gen(args, out) -> int:
    name = args.name
    if name == "horodecki":
        if args.a is None:
            raise BadParams("horodecki needs --a")
        rho = horodecki_state(args.a)
    elif name == "maxent":
        if args.n is None:
            raise BadParams("maxent needs --n")
        rho = pure_density_matrix(maximally_entangled(args.n))
    elif name == "random":
        rho = random_state(_parse_dims(args.dims), rank=args.rank, seed=args.seed)
    elif name == "product-mixture":
        rho = product_mixture(_parse_dims(args.dims), args.terms or 3, seed=args.seed)
    else:
        raise UnknownState(f"unknown state {name!r}; choose from {', '.join(STATE_NAMES)}")
    save_state(rho, args.out)
    print(f"wrote {name} state {tuple(rho.dims)} to {args.out}", file=out)
    return EXIT_OK


def cmd_bounds(args, out) -> int:
    rho = load_state(args.state)
    opts = _options(args)
    if args.convention == "wootters" and tuple(rho.dims) != (2, 2):
        raise BadOptions("--convention wootters applies to two-qubit states only")
    report = bound_report(rho, opts, rank_tol=args.rank_tol)
    scale = 1.0 / convention_factor() if args.convention == "wootters" else 1.0
    rows = [
        ("dims", f"{rho.dims.n1}x{rho.dims.n2}"),
        ("rank", report.diagnostics["r"]),
        ("t_matrices", f"{report.diagnostics['m_eff']} (bound {report.diagnostics['m_bound']})"),
        ("convention", args.convention),
        ("lower_algebraic", _fmt(report.lower_algebraic * scale)),
        ("lower_optimized", _fmt(report.lower_optimized * scale)),
        ("upper_optimized", _fmt(report.upper_optimized * scale)),
        ("negativity", _fmt(report.negativity)),
        ("is_ppt", str(report.is_ppt).lower()),
        ("entanglement_detected", str(not report.no_entanglement_detected).lower()),
        ("seconds", f"{report.diagnostics['seconds']:.3f}"),
    ]
    for key, value in rows:
        print(f"{key}: {value}", file=out)
    if args.out:
        payload = report.as_dict()
        payload["convention"] = args.convention
        payload["scale"] = scale
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    return EXIT_OK


def scan_horodecki(a_min, a_max, steps, opts, timing=True) -> str:
    """CSV of bounds along ``rho_a`` on ``linspace(a_min, a_max, steps)``."""
    if not (0 <= a_min < a_max <= 1):
        raise BadRange(f"need 0 <= a_min < a_max <= 1, got {a_min}, {a_max}")
    if steps < 2:
        raise BadRange("steps must be >= 2")
    buf = io.StringIO()
    buf.write(SCAN_HEADER + "\n")
    for a in np.linspace(a_min, a_max, steps):
        start = time.perf_counter()
        rep = bound_report(horodecki_state(float(a)), opts)
        seconds = time.perf_counter() - start if timing else 0.0
        fields = [
            _fmt(a),
            _fmt(rep.lower_algebraic),
            _fmt(rep.lower_optimized),
            _fmt(rep.upper_optimized),
            _fmt(rep.negativity),
            "true" if rep.is_ppt else "false",
            format(seconds, ".3f"),
        ]
        buf.write(",".join(fields) + "\n")
    return buf.getvalue()


def cmd_scan(args, out) -> int:
    csv_text = scan_horodecki(args.a_min, args.a_max, args.steps, _options(args), timing=not args.no_timing)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(csv_text)
    else:
        out.write(csv_text)
    return EXIT_OK


def cmd_selfcheck(args, out) -> int:
    if args.inject_fault:
        with injected_fault(args.inject_fault):
            results = run_selfcheck(args.seed, args.samples)
    else:
        results = run_selfcheck(args.seed, args.samples)
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        print(f"{status} {res.name}: {res.passed}/{res.total} (worst {res.worst:.3e})", file=out)
    ok = all(r.ok for r in results)
    print("all suites passed" if ok else "some suites FAILED", file=out)
    return EXIT_OK if ok else EXIT_SELFCHECK_FAILED


COMMANDS = {"bounds": cmd_bounds, "scan": cmd_scan, "gen": cmd_gen, "selfcheck": cmd_selfcheck}

_ARGUMENT_ERRORS = (BadOptions, BadParams, BadRange, UnknownState)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _ARGUMENT_ERRORS as exc:
        print(f"bad arguments: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except ValidationError as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConcurrenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
