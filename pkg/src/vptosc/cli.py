"""Command-line interface: coeffs, polynomial, solve, converge, verify.

Machine outputs render every number as a string: rationals exactly as
"num/den", reals at the requested precision. JSON and CSV carry the same
payload; `plain` adds approximate decimal previews for reading. Exit codes:
0 success, 1 verification/convergence failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from mpmath import mp

from . import __version__
from .bwcache import CacheError, get_bw_series
from .optimizer import converge_scan, optimize, scaling_polynomial_cached
from .oracle import OracleSettings, exact_energy_diag, exact_energy_grid
from .reexpansion import OscillatorSpec, reexpand
from .rootisolation import real_roots
from .scaling import (
    build_scaling_polynomial,
    combined_identity_residual,
    term_identity_residual,
    verify_binomial_identity,
)
from .series_core import (
    DEFAULT_DPS,
    as_rational,
    decimal_preview,
    generate_bw_coefficients,
    rational_str,
)


def _even_power(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value % 2 != 0 or value < 4:
        raise argparse.ArgumentTypeError("potential power must be an even integer >= 4")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _mpf_str(x, dps: int) -> str:
    with mp.workdps(dps):
        return mp.nstr(mp.mpf(x), dps, strip_zeros=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vptosc",
        description="Variational perturbation theory for x^p anharmonic oscillators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, order_flag=True):
        sp.add_argument("--p", type=_even_power, required=True, help="even power of x, >= 4")
        if order_flag:
            sp.add_argument("--order", type=_positive_int, required=True, help="expansion order N")
        sp.add_argument("--precision", type=_positive_int, default=DEFAULT_DPS,
                        help="working precision in decimal digits (default %(default)s)")
        sp.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
        sp.add_argument("--cache", default=None, help="coefficient cache directory")

    sp = sub.add_parser("coeffs", help="exact perturbation-series coefficients")
    sp.add_argument("--p", type=_even_power, required=True)
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--precision", type=_positive_int, default=DEFAULT_DPS)
    sp.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    sp.add_argument("--cache", default=None)

    sp = sub.add_parser("polynomial", help="scaling polynomial P_N and its real roots")
    sp.add_argument("--p", type=_even_power, required=True)
    sp.add_argument("--order", type=int, required=True, help="order N >= 0")
    sp.add_argument("--precision", type=_positive_int, default=DEFAULT_DPS)
    sp.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    sp.add_argument("--cache", default=None)

    sp = sub.add_parser("solve", help="order-N variational energy, flattest extremum")
    common(sp)
    sp.add_argument("--omega", type=_rational, required=True)
    sp.add_argument("--g", type=_rational, required=True)

    sp = sub.add_parser("converge", help="error table against the internal oracle")
    sp.add_argument("--p", type=_even_power, required=True)
    sp.add_argument("--max-order", type=_positive_int, required=True)
    sp.add_argument("--omega", type=_rational, required=True)
    sp.add_argument("--g", type=_rational, required=True)
    sp.add_argument("--precision", type=_positive_int, default=DEFAULT_DPS)
    sp.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    sp.add_argument("--cache", default=None)
    sp.add_argument("--basis-dim", type=int, default=None, help="oracle basis size override")
    sp.add_argument("--basis-frequency", type=float, default=None)
    sp.add_argument("--grid-points", type=int, default=None)
    sp.add_argument("--grid-halfwidth", type=float, default=None)

    sp = sub.add_parser("verify", help="exact identity suite and cache integrity")
    sp.add_argument("--p", type=_even_power, required=True)
    sp.add_argument("--max-order", type=_positive_int, required=True)
    sp.add_argument("--format", choices=("plain", "json", "csv"), default="plain")
    sp.add_argument("--cache", default=None)
    return parser


# -- payload builders ---------------------------------------------------------


def _payload_coeffs(args) -> dict:
    if args.order < 0:
        raise SystemExit(2)
    bw = get_bw_series(args.p, args.order, directory=args.cache)
    return {
        "command": "coeffs",
        "p": args.p,
        "level": 0,
        "order": args.order,
        "rows": [
            {"l": l, "exact": rational_str(c), "approx": decimal_preview(c)}
            for l, c in enumerate(bw.coeffs)
        ],
    }


def _payload_polynomial(args) -> dict:
    if args.order < 0:
        raise SystemExit(2)
    bw = get_bw_series(args.p, args.order, directory=args.cache)
    scal = build_scaling_polynomial(bw, args.order)
    roots = [] if scal.poly.degree < 1 else real_roots(scal.poly, dps=args.precision)
    return {
        "command": "polynomial",
        "p": args.p,
        "order": args.order,
        "degree": scal.poly.degree,
        "coefficients": [rational_str(c) for c in scal.poly.coeffs],
        "pretty": scal.poly.pretty("sigma"),
        "precision_digits": args.precision,
        "roots": [_mpf_str(r, args.precision) for r in roots],
    }


def _candidate_payload(c, dps: int) -> dict:
    return {
        "sigma": _mpf_str(c.sigma, dps),
        "omega_trial": _mpf_str(c.omega_trial, dps),
        "energy": _mpf_str(c.energy, dps),
        "flatness": _mpf_str(c.flatness, dps),
        "kind": c.kind,
    }


def _payload_solve(args) -> dict:
    get_bw_series(args.p, args.order, directory=args.cache)  # keep the cache warm
    spec = OscillatorSpec(omega=args.omega, g=args.g, p=args.p)
    result = optimize(spec, args.order, dps=args.precision)
    return {
        "command": "solve",
        "p": args.p,
        "omega": rational_str(spec.omega),
        "g": rational_str(spec.g),
        "order": args.order,
        "precision_digits": args.precision,
        "used_fallback": result.used_fallback,
        "chosen": _candidate_payload(result.chosen, args.precision),
        "candidates": [_candidate_payload(c, args.precision) for c in result.all_candidates],
    }


def _payload_converge(args) -> dict:
    get_bw_series(args.p, args.max_order, directory=args.cache)
    spec = OscillatorSpec(omega=args.omega, g=args.g, p=args.p)
    overrides = {}
    if args.basis_dim is not None:
        overrides["basis_dim"] = args.basis_dim
    if args.basis_frequency is not None:
        overrides["basis_frequency"] = args.basis_frequency
    if args.grid_points is not None:
        overrides["grid_points"] = args.grid_points
    if args.grid_halfwidth is not None:
        overrides["grid_halfwidth"] = args.grid_halfwidth
    settings = OracleSettings(**overrides)
    diag = exact_energy_diag(spec, settings)
    grid = exact_energy_grid(spec, settings)
    cross = abs(diag.energy - grid.energy) <= 1e-9 * max(1.0, abs(diag.energy))
    report = converge_scan(spec, args.max_order, diag.energy, dps=args.precision)
    return {
        "command": "converge",
        "p": args.p,
        "omega": rational_str(spec.omega),
        "g": rational_str(spec.g),
        "max_order": args.max_order,
        "precision_digits": args.precision,
        "oracle_energy": repr(diag.energy),
        "oracle_converged": bool(diag.converged and grid.converged and cross),
        "rows": [
            {
                "order": row.order,
                "energy": _mpf_str(row.energy, args.precision),
                "error": _mpf_str(row.error, args.precision),
                "sigma": _mpf_str(row.sigma, args.precision),
                "kind": row.kind,
            }
            for row in report.rows
        ],
    }


def _payload_verify(args) -> dict:
    checks = []
    failures = []

    def record(identity: str, ok: bool, detail: dict):
        checks.append({"identity": identity, **detail, "ok": ok})
        if not ok:
            failures.append({"identity": identity, **detail})

    n = args.max_order
    try:
        bw = get_bw_series(args.p, n, directory=args.cache, strict=True)
    except CacheError as exc:
        return {
            "command": "verify",
            "p": args.p,
            "max_order": n,
            "checks": [],
            "failures": [{"identity": "cache", "error": str(exc)}],
            "all_passed": False,
        }

    fresh = generate_bw_coefficients(args.p, n)
    for l, (a, b) in enumerate(zip(bw.coeffs, fresh.coeffs)):
        if a != b:
            record(
                "cache",
                False,
                {"l": l, "cached": rational_str(a), "recomputed": rational_str(b)},
            )
    if not failures:
        record("cache", True, {"orders_checked": n + 1})

    series = reexpand(fresh, n)
    for l in range(n):
        residual = term_identity_residual(series, l)
        detail = {"l": l}
        if not residual.is_zero:
            detail["residual_monomials"] = {
                str(k): rational_str(c) for k, c in enumerate(residual.coeffs) if c != 0
            }
        record("term", residual.is_zero, detail)
    for l in range(n):
        residual = combined_identity_residual(series, l)
        detail = {"l": l}
        if not residual.is_zero:
            detail["residual_monomials"] = {
                str(k): rational_str(c) for k, c in enumerate(residual.coeffs) if c != 0
            }
        record("combined", residual.is_zero, detail)
    for l in range(n + 1):
        for j in range(l + 1):
            record("binomial", verify_binomial_identity(args.p, j, l), {"j": j, "l": l})

    return {
        "command": "verify",
        "p": args.p,
        "max_order": n,
        "checks": checks,
        "failures": failures,
        "all_passed": not failures,
    }


# -- renderers ----------------------------------------------------------------


def _rows_of(payload: dict) -> tuple[list[str], list[dict]]:
    """The tabular section of each payload, for CSV and plain rendering."""
    cmd = payload["command"]
    if cmd == "coeffs":
        return ["l", "exact", "approx"], payload["rows"]
    if cmd == "polynomial":
        rows = [{"power": i, "coefficient": c} for i, c in enumerate(payload["coefficients"])]
        rows += [{"power": f"root{i}", "coefficient": r} for i, r in enumerate(payload["roots"])]
        return ["power", "coefficient"], rows
    if cmd == "solve":
        # candidates are sorted flattest-first and the head is the chosen one
        rows = [dict(c, chosen="yes" if i == 0 else "no") for i, c in enumerate(payload["candidates"])]
        return ["sigma", "omega_trial", "energy", "flatness", "kind", "chosen"], rows
    if cmd == "converge":
        return ["order", "energy", "error", "sigma", "kind"], payload["rows"]
    if cmd == "verify":
        keys = ["identity", "l", "j", "ok"]
        rows = [{k: chk.get(k, "") for k in keys} for chk in payload["checks"]]
        return keys, rows
    raise ValueError(cmd)


def render(payload: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(payload, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        header, rows = _rows_of(payload)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=header, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    # plain
    lines = []
    cmd = payload["command"]
    if cmd == "coeffs":
        lines.append(f"# perturbation coefficients p={payload['p']} order={payload['order']}")
        lines.append("l  exact  approx(~)")
        for row in payload["rows"]:
            lines.append(f"{row['l']}  {row['exact']}  ~{row['approx']}")
    elif cmd == "polynomial":
        lines.append(f"# scaling polynomial p={payload['p']} N={payload['order']}")
        lines.append(f"P_N(sigma) = {payload['pretty']}")
        lines.append(f"degree = {payload['degree']}")
        roots = ", ".join(payload["roots"]) if payload["roots"] else "(none)"
        lines.append(f"real roots ({payload['precision_digits']} digits): {roots}")
    elif cmd == "solve":
        lines.append(
            f"# solve p={payload['p']} omega={payload['omega']} g={payload['g']} N={payload['order']}"
        )
        chosen = payload["chosen"]
        lines.append(f"chosen ({chosen['kind']}): sigma={chosen['sigma']}")
        lines.append(f"  omega_trial = {chosen['omega_trial']}")
        lines.append(f"  energy      = {chosen['energy']}")
        lines.append(f"  flatness    = {chosen['flatness']}")
        if payload["used_fallback"]:
            lines.append("  (no extremum at this order: turning-point fallback)")
        lines.append("candidates (flattest first):")
        for c in payload["candidates"]:
            lines.append(
                f"  sigma={c['sigma']} omega={c['omega_trial']} W={c['energy']} "
                f"flatness={c['flatness']} kind={c['kind']}"
            )
    elif cmd == "converge":
        lines.append(
            f"# converge p={payload['p']} omega={payload['omega']} g={payload['g']} "
            f"oracle={payload['oracle_energy']} converged={payload['oracle_converged']}"
        )
        lines.append("order  energy  error  sigma  kind")
        for row in payload["rows"]:
            lines.append(
                f"{row['order']}  {row['energy']}  {row['error']}  {row['sigma']}  {row['kind']}"
            )
    elif cmd == "verify":
        lines.append(f"# verify p={payload['p']} max_order={payload['max_order']}")
        counts: dict[str, int] = {}
        for chk in payload["checks"]:
            counts[chk["identity"]] = counts.get(chk["identity"], 0) + 1
        for name, total in counts.items():
            bad = sum(1 for f in payload["failures"] if f["identity"] == name)
            lines.append(f"{name}: {total - bad}/{total} passed")
        for f in payload["failures"]:
            lines.append(f"FAILED: {f}")
        lines.append("all passed" if payload["all_passed"] else "FAILURES detected")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "coeffs":
            payload = _payload_coeffs(args)
        elif args.command == "polynomial":
            payload = _payload_polynomial(args)
        elif args.command == "solve":
            payload = _payload_solve(args)
        elif args.command == "converge":
            payload = _payload_converge(args)
        elif args.command == "verify":
            payload = _payload_verify(args)
        else:  # pragma: no cover
            parser.error(f"unknown command {args.command}")
    except CacheError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    sys.stdout.write(render(payload, args.format))
    if args.command == "verify" and not payload["all_passed"]:
        return 1
    if args.command == "converge" and not payload["oracle_converged"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
