"""Command-line interface.

Every command emits one envelope ``{"command", "base", "order", "results",
"provenance"}``.  Exact rationals serialize as ``"p/q"`` strings, intervals as
``{"lo", "hi", "dec"}`` where ``dec`` holds only the digits shared by both
endpoints, and truncation-based values as decimals with their uncertainty.  Exit status: 0 success, 1 usage error, 2 computational failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction
from math import factorial
from typing import Any, Sequence

from . import bounds, certify, constants, exact, series
from .errors import ComputationError
from .interval import Interval

__all__ = ["main", "build_parser", "frac_str", "parse_frac", "interval_json", "shared_decimal"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# --- serialization -------------------------------------------------------------


def frac_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from exc


def _trunc_digits(x: Fraction, places: int) -> int:
    return (x.numerator * 10**places) // x.denominator


def shared_decimal(iv: Interval, max_places: int = 60) -> str:
    """Decimal digits common to every point of a one-signed interval (truncated)."""
    lo, hi = iv.lo, iv.hi
    if lo < 0 < hi:
        return ""
    sign = ""
    if hi <= 0 and lo < 0:
        lo, hi, sign = -hi, -lo, "-"
    best = None
    for places in range(max_places + 1):
        a, b = _trunc_digits(lo, places), _trunc_digits(hi, places)
        if a != b:
            break
        best = (a, places)
    if best is None:
        return ""
    digits, places = best
    text = str(digits).rjust(places + 1, "0")
    if places == 0:
        return sign + text
    return f"{sign}{text[:-places]}.{text[-places:]}"


def interval_json(iv: Interval) -> dict:
    return {"lo": frac_str(iv.lo), "hi": frac_str(iv.hi), "dec": shared_decimal(iv)}


def heuristic_json(h: constants.HeuristicValue, digits: int = 30) -> dict:
    return {
        "dec": constants.decimal_str(h.value, digits),
        "uncertainty": constants.decimal_str(h.uncertainty, 3) if h.uncertainty else "0",
        "provenance": h.provenance,
    }


def _cell(v) -> Any:
    if isinstance(v, Interval):
        return interval_json(v)
    if isinstance(v, constants.HeuristicValue):
        return heuristic_json(v)
    if isinstance(v, Fraction):
        return frac_str(v)
    return v


def _csv_cell(v) -> str:
    if isinstance(v, Interval):
        return shared_decimal(v)
    if isinstance(v, constants.HeuristicValue):
        return constants.decimal_str(v.value, 12)
    if isinstance(v, Fraction):
        return frac_str(v)
    return str(v)


def pole_json(p: certify.CertifiedPole) -> dict:
    return {
        "rho": interval_json(p.rho),
        "gamma": interval_json(p.gamma),
        "alpha": interval_json(p.alpha),
        "kappa": interval_json(p.kappa),
        "radius": frac_str(p.R),
        "zero_count_inside_R": p.zero_count_inside_R,
        "min_modulus_on_circle": interval_json(p.min_modulus),
        "tail_T_at_R": frac_str(p.tail_at_R),
        "tail_S_at_rho": frac_str(p.tail_S),
        "tail_T_prime_at_rho": frac_str(p.tail_T_prime),
    }


# --- commands ---------------------------------------------------------------------


def _env(args, results: dict, provenance: dict | None = None, order=None, rows=None) -> dict:
    env = {
        "command": args.command,
        "base": getattr(args, "base", None),
        "order": order,
        "results": results,
        "provenance": provenance or {},
    }
    if rows is not None:
        env["_rows"] = rows
    return env


def cmd_count(args) -> dict:
    values = exact.q_values(args.base, args.upto)
    results = {"m": list(range(args.upto + 1)), "q": values}
    prov = {"q": "exact"}
    rows = [{"m": m, "q": v} for m, v in enumerate(values)]
    if args.oracle:
        oracle = [exact.brute_force_q(args.base, m, args.guard) for m in range(args.upto + 1)]
        results["oracle"] = oracle
        results["agree"] = oracle == values
        prov["oracle"] = "exact-enumeration"
        for r, o in zip(rows, oracle):
            r["oracle"] = o
    return _env(args, results, prov, rows=rows)


def cmd_ws(args) -> dict:
    v = exact.ws(args.base, args.s, args.n)
    total = v * factorial(args.n)
    results = {"s": args.s, "n": args.n, "W": frac_str(total), "W_over_nfact": frac_str(v)}
    return _env(args, results, {"W": "exact"})


def cmd_maxreps(args) -> dict:
    theta, nu = constants.theta_nu(args.base, args.order)
    rows = []
    ok = True
    for n in range(1, args.upto + 1):
        M, s = exact.max_reps(args.base, n)
        holds = Fraction(M, factorial(n)) <= nu**n
        ok = ok and holds
        rows.append({"n": n, "M": M, "argmax_s": s, "bound_holds": holds})
    results = {"rows": rows, "nu": constants.decimal_str(nu, 20), "all_bounds_hold": ok}
    return _env(args, results, {"M": "exact", "nu": "heuristic-truncation"}, order=args.order, rows=rows)


def cmd_series(args) -> dict:
    s = series.det_T(args.base, args.order) if args.which == "T" else series.det_S(args.base, args.order)
    coeffs = [frac_str(c) for c in s]
    rows = [{"n": n, "coeff": c} for n, c in enumerate(coeffs)]
    return _env(args, {"which": args.which, "coeffs": coeffs}, {"coeffs": "exact"}, order=args.order, rows=rows)


def cmd_bounds(args) -> dict:
    results: dict[str, Any] = {"n": args.n, "which": args.which}
    prov = {}
    results["explicit"] = interval_json(bounds.coeff_bound_explicit(args.base, args.n, args.which))
    prov["explicit"] = "certified-enclosure"
    if args.refined:
        results["refined"] = interval_json(bounds.coeff_bound_refined(args.base, args.n, args.which))
        prov["refined"] = "certified-enclosure"
    if args.tail:
        if args.radius is None:
            raise UsageError("--tail requires --radius")
        if args.split == "auto":
            tb, M = bounds.best_tail_bound(args.base, args.n, args.radius, args.which)
        else:
            M = None if args.split in (None, "none") else int(args.split)
            tb = bounds.tail_bound(args.base, args.n, args.radius, M, args.which)
        results["tail"] = interval_json(tb)
        results["radius"] = frac_str(args.radius)
        results["split"] = M
        prov["tail"] = "certified-enclosure"
    return _env(args, results, prov)


def cmd_certify(args) -> dict:
    p = certify.certified_constants(args.base, args.order, args.radius, args.width)
    prov = {k: "certified-enclosure" for k in ("rho", "gamma", "alpha", "kappa")}
    return _env(args, pole_json(p), prov, order=args.order)


def cmd_constants(args) -> dict:
    rep = constants.constants_report(args.base, args.order, args.param_order, certify=args.all)
    results = {name: heuristic_json(v) for name, v in rep.heuristic.items()}
    if rep.certified is not None:
        results["certified"] = pole_json(rep.certified)
    results["param_order"] = args.param_order
    return _env(args, results, dict(rep.provenance), order=args.order)


def _parse_bases(text: str) -> list[int]:
    try:
        if ".." in text:
            a, b = text.split("..")
            out = list(range(int(a), int(b) + 1))
        else:
            out = [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad base range {text!r}") from exc
    if not out or min(out) < 2:
        raise argparse.ArgumentTypeError("bases must be integers >= 2")
    return out


def cmd_tables(args) -> dict:
    t = constants.reproduce_tables(args.bases, args.order, args.param_order, certify=not args.no_certify)
    results = {name: [{k: _cell(v) for k, v in row.items()} for row in rows] for name, rows in t.as_dict().items()}
    prov = {
        "table1": "heuristic-truncation" if args.no_certify else "certified-enclosure",
        "table2": "heuristic-truncation",
        "table3": "heuristic-truncation",
    }
    env = _env(args, results, prov, order=args.order)
    env["_tables"] = t.as_dict()
    return env


def cmd_dist(args) -> dict:
    d = exact.param_distribution(args.base, args.m, args.param, args.guard)
    mu, s2 = constants.param_constants(args.base, args.param_order, args.param)
    results = {
        "m": args.m,
        "param": args.param,
        "pmf": {str(k): frac_str(v) for k, v in d.pmf.items()},
        "counts": {str(k): v for k, v in d.counts.items()},
        "total": d.total,
        "mean": frac_str(d.mean),
        "variance": frac_str(d.variance),
        "clt_mean": constants.decimal_str(mu * args.m, 12),
        "clt_variance": constants.decimal_str(s2 * args.m, 12),
    }
    rows = [{"value": k, "count": d.counts[k], "pmf": frac_str(v)} for k, v in d.pmf.items()]
    prov = {"pmf": "exact", "clt_mean": "heuristic-truncation", "clt_variance": "heuristic-truncation"}
    return _env(args, results, prov, order=args.param_order, rows=rows)


def cmd_expand(args) -> dict:
    terms = constants.expansion_terms(args.base, args.order, args.terms)
    rows = [
        {
            "amplitude": constants.decimal_str(a, 31),
            "base": constants.decimal_str(b, 31),
        }
        for a, b in terms
    ]
    return _env(args, {"terms": rows}, {"terms": "heuristic-truncation"}, order=args.order, rows=rows)


# --- parser ------------------------------------------------------------------------


def _base(text: str) -> int:
    try:
        b = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"base must be an integer, got {text!r}") from exc
    if b < 2:
        raise argparse.ArgumentTypeError("base must be at least 2")
    return b


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return v


def _pos(text: str) -> int:
    v = _nonneg(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="powcomp", description="Compositions of 1 into powers of a base.")
    parser.add_argument("--format", choices=("json", "csv", "text"), default="json")
    parser.add_argument("--output", help="write results to this file instead of stdout")
    parser.add_argument("--timing", action="store_true", help="include wall time in the envelope")
    # the same options after the subcommand; SUPPRESS keeps the top-level defaults
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=argparse.SUPPRESS)
    common.add_argument("--output", default=argparse.SUPPRESS)
    common.add_argument("--timing", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    p = add("count", cmd_count, "q_b(m) for m = 0..upto")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--upto", type=_nonneg, required=True)
    p.add_argument("--oracle", action="store_true", help="also run the brute-force enumeration")
    p.add_argument("--guard", type=_nonneg, default=None, help="override the oracle size guard")

    p = add("ws", cmd_ws, "W_b(s, n)")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--s", type=_pos, required=True)
    p.add_argument("--n", type=_pos, required=True)

    p = add("maxreps", cmd_maxreps, "M_b(n), its argmax and the nu^n bound")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--upto", type=_pos, required=True)
    p.add_argument("--order", type=_pos, default=60, help="truncation order for theta")

    p = add("series", cmd_series, "coefficients of T or S")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--order", type=_pos, required=True)
    p.add_argument("--which", choices=("T", "S"), default="T")

    p = add("bounds", cmd_bounds, "certified coefficient and tail bounds")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--n", type=_pos, required=True)
    p.add_argument("--which", choices=("T", "S"), default="T")
    p.add_argument("--refined", action="store_true")
    p.add_argument("--tail", action="store_true")
    p.add_argument("--radius", type=parse_frac)
    p.add_argument("--split", default=None, help="split point M, 'none' or 'auto'")

    p = add("certify", cmd_certify, "certified dominant pole and constants")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--order", type=_pos, default=60)
    p.add_argument("--radius", type=parse_frac, default=None)
    p.add_argument("--width", type=parse_frac, default=None)

    p = add("constants", cmd_constants, "all constants for one base")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--order", type=_pos, default=60)
    p.add_argument("--param-order", type=_pos, default=40)
    p.add_argument("--all", action="store_true", help="include certified enclosures")

    p = add("tables", cmd_tables, "reproduce the three constant tables")
    p.add_argument("--bases", type=_parse_bases, default=list(range(2, 9)))
    p.add_argument("--order", type=_pos, default=60)
    p.add_argument("--param-order", type=_pos, default=40)
    p.add_argument("--no-certify", action="store_true", help="heuristic values for alpha and gamma")

    p = add("dist", cmd_dist, "exact parameter distribution on C_m")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--m", type=_nonneg, required=True)
    p.add_argument("--param", choices=exact.PARAM_KINDS, required=True)
    p.add_argument("--guard", type=_nonneg, default=None)
    p.add_argument("--param-order", type=_pos, default=40)

    p = add("expand", cmd_expand, "leading terms of the multi-pole expansion")
    p.add_argument("--base", type=_base, required=True)
    p.add_argument("--terms", type=_pos, default=3)
    p.add_argument("--order", type=_pos, default=60)
    return parser


# --- rendering ------------------------------------------------------------------------


def _render_csv(env: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if "_tables" in env:
        for name, rows in env["_tables"].items():
            cols = constants.TABLE_COLUMNS[name]
            writer.writerow([f"# {name}"])
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_csv_cell(row[c]) for c in cols])
        return buf.getvalue()
    rows = env.get("_rows")
    if rows is None:
        rows = [{k: v for k, v in env["results"].items() if not isinstance(v, (dict, list))}]
    if rows:
        cols = list(rows[0].keys())
        writer.writerow(cols)
        for row in rows:
            writer.writerow([_csv_cell(row[c]) for c in cols])
    return buf.getvalue()


def _render_text(env: dict) -> str:
    lines = [f"{env['command']} (base {env['base']})" if env.get("base") else env["command"]]
    for key, value in env["results"].items():
        if isinstance(value, list) and value and not isinstance(value[0], dict):
            value = ", ".join(str(v) for v in value)
        elif isinstance(value, dict) and "dec" in value:
            value = f"{value['dec']}  [{value.get('lo', '')}, {value.get('hi', '')}]" if "lo" in value else value["dec"]
        elif isinstance(value, (list, dict)):
            value = json.dumps(value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def render(env: dict, fmt: str) -> str:
    if fmt == "csv":
        return _render_csv(env)
    if fmt == "text":
        return _render_text(env)
    public = {k: v for k, v in env.items() if not k.startswith("_")}
    return json.dumps(public, indent=2) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    start = time.perf_counter()
    try:
        env = args.func(args)
    except UsageError as exc:
        print(f"powcomp: error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"powcomp: computation failed [{exc.stage}]: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"powcomp: error: {exc}", file=sys.stderr)
        return 1
    if args.timing:
        env["wall_time_s"] = round(time.perf_counter() - start, 3)
    text = render(env, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
