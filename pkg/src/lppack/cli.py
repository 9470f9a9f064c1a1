"""Command-line front end.

Exit codes are shared by every subcommand: 0 for an affirmative result,
1 for a valid but negative one (not admissible, nothing found), 2 for bad
usage or input. Data goes to stdout (or ``--out``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bounds, constructions, lp_core, packing_search, phi_operator

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{float(x):.17g}"
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _points_csv(points) -> str:
    x = lp_core.pad_stack(points) if len(points) else np.zeros((0, 1))
    return _csv_text([f"x{k}" for k in range(x.shape[1])], x.tolist())


def _emit(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as f:
            f.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _exponent(text: str) -> float:
    try:
        return lp_core.as_exponent(text)
    except lp_core.InvalidInputError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _finite_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def cmd_bounds(args) -> int:
    q = args.q
    if q <= 1 or math.isinf(q):
        raise UsageError(f"--q must satisfy 1 < q < inf, got {q}")
    if args.steps < 1 or args.r_min > args.r_max or args.r_min < 0:
        raise UsageError("need 0 <= r-min <= r-max and steps >= 1")
    radii = np.linspace(args.r_min, args.r_max, args.steps) if args.steps > 1 else [args.r_min]
    formula = bounds.BOUND_ONE if q < 2 else bounds.BOUND_TWO
    rows = []
    for R in radii:
        try:
            res = bounds.psi(q, float(R))
            rows.append(res.to_dict())
        except bounds.DomainError:
            rows.append(
                {"n_max": None, "formula": formula, "q": lp_core.exponent_to_json(q),
                 "radius": float(R), "in_domain": False}
            )
    if args.format == "csv":
        text = _csv_text(
            ["q", "R", "formula", "n_max", "in_domain"],
            [(q, r["radius"], r["formula"], r["n_max"], r["in_domain"]) for r in rows],
        )
    else:
        text = _json_text(rows)
    _emit(text, args.out)
    return EXIT_OK


def cmd_construct(args) -> int:
    p = args.p
    if math.isinf(p):
        raise UsageError("constructions need a finite exponent")
    if args.kind == "basis":
        if args.n is None:
            raise UsageError("--n is required for --kind basis")
        config, cert = constructions.basis_config(p, args.n)
    else:
        if args.r is None:
            raise UsageError("--r is required for --kind hadamard")
        config, cert = constructions.hadamard_config(p, args.r)
    if args.format == "csv":
        text = _points_csv(config.points)
    else:
        text = config.to_json(indent=2) + "\n"
    _emit(text, args.out)
    _diag(json.dumps({"certificate": cert.to_dict()}))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        with open(args.config) as f:
            config = lp_core.PointConfig.from_json(f.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.config}: {exc}") from None
    report = lp_core.validate(config, tol=args.tol)
    data = report.to_dict()
    if args.format == "csv":
        text = _csv_text(list(data), [[report.n, report.radius, report.tol, report.max_norm,
                                       report.min_pairwise_distance, report.admissible,
                                       " ".join(map(str, report.worst_pair or ()))]])
    else:
        text = _json_text(data)
    _emit(text, args.out)
    return EXIT_OK if report.admissible else EXIT_NEGATIVE


def cmd_phinorm(args) -> int:
    report = phi_operator.phi_norm_estimate(
        args.q, args.n, args.d if args.d is not None else args.n, seed=args.seed, budget=args.budget
    )
    data = report.to_dict()
    if args.format == "csv":
        keys = [k for k in data if k != "witness"]
        text = _csv_text(keys, [[data[k] for k in keys]])
    else:
        text = _json_text(data)
    _emit(text, args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    params = packing_search.SearchParams(
        p=args.p, d=args.d, n=args.n, radius=args.r, restarts=args.restarts,
        max_steps=args.max_steps, seed=args.seed, penalty_tol=args.penalty_tol,
    )
    report = packing_search.search(params)
    data = report.to_dict()
    if args.format == "csv":
        keys = [k for k in data if k != "config"]
        text = _csv_text(keys, [[data[k] for k in keys]])
    else:
        text = _json_text(data)
    _emit(text, args.out)
    if args.points_csv and report.config is not None:
        _emit(_points_csv(report.config.points), args.points_csv)
    return EXIT_OK if report.success else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lppack",
        description="Packing bounds, constructions and experiments for unit-separated points in l_p balls.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(sp, default="json"):
        sp.add_argument("--format", choices=["json", "csv"], default=default)
        sp.add_argument("--out", default=None, help="output file (default: stdout)")

    sp = sub.add_parser("bounds", help="tabulate psi(q, R) over a radius grid")
    sp.add_argument("--q", type=_exponent, required=True)
    sp.add_argument("--r-min", type=_finite_float, required=True)
    sp.add_argument("--r-max", type=_finite_float, required=True)
    sp.add_argument("--steps", type=int, default=10)
    output_flags(sp, default="csv")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("construct", help="build a certified unit-separated configuration")
    sp.add_argument("--kind", choices=["basis", "hadamard"], required=True)
    sp.add_argument("--p", type=_exponent, required=True)
    sp.add_argument("--n", type=int, help="number of points (basis)")
    sp.add_argument("--r", type=int, help="Sylvester order exponent, 2^r points (hadamard)")
    output_flags(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="check a point configuration JSON file")
    sp.add_argument("config")
    sp.add_argument("--tol", type=_finite_float, default=lp_core.ADMISSIBILITY_TOL)
    output_flags(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("phinorm", help="estimate the pairwise-difference operator norm")
    sp.add_argument("--q", type=_exponent, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, default=None, help="dimension (default: n)")
    sp.add_argument("--budget", type=int, default=200, help="number of random restarts")
    sp.add_argument("--seed", type=int, default=0)
    output_flags(sp)
    sp.set_defaults(func=cmd_phinorm)

    sp = sub.add_parser("search", help="penalty search for an admissible configuration")
    sp.add_argument("--p", type=_exponent, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=_finite_float, required=True)
    sp.add_argument("--restarts", type=int, default=20)
    sp.add_argument("--max-steps", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--penalty-tol", type=_finite_float, default=1e-12)
    sp.add_argument("--points-csv", default=None, help="also write found points as CSV")
    output_flags(sp)
    sp.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, lp_core.InvalidInputError, bounds.DomainError,
            constructions.ResourceError) as exc:
        _diag(f"lppack {args.command}: error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
