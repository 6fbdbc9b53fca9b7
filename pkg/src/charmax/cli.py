"""Command-line front end.

Every failure prints one line ``<CODE>: <message>`` on stderr and exits
nonzero: 2 usage, 3 budget, 4 identity check, 5 not found, 6 non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .chargroup import CoefficientVector
from .config import FORMATS, RunConfig, load_config
from .delta import delta_exact_small, delta_heuristic, rm_upper_bound
from .discrepancy import discrepancy_report, etk_m_schedule, subgroup_point_set
from .errors import CharmaxError, IdentityCheckError, ResourceLimitError
from .numtheory import (PrimePair, build_group_context, build_subgroup_context, is_prime,
                        largest_prime_factor, scan_fouvry_primes)
from .pipeline import build_counterexample, verify_ch_reduction, verify_counterexample
from .rearrangement import BadOrderWitness, discretize_via_shift, search_bad_permutation

EXIT_CODES = {"E_USAGE": 2, "E_BUDGET": 3, "E_IDENTITY": 4, "E_NOTFOUND": 5, "E_NONCONVERGENCE": 6}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        usage = " ".join(self.format_usage().split())
        raise UsageError(f"{message} ({usage})")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or (isinstance(obj, (float, np.floating)) and not math.isfinite(obj)):
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _text_table(header, rows) -> str:
    cells = [[str(h) for h in header]] + [
        [format(v, ".6f") if isinstance(v, float) else str(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _emit(out, fmt, payload=None, header=None, rows=None):
    if fmt == "json":
        out.write(dumps(payload) + "\n")
    elif fmt == "csv":
        out.write(_csv(header, rows))
    else:
        out.write(_text_table(header, rows))


# ---------------------------------------------------------------- commands

def cmd_scan(args, config, out):
    if args.limit < 1:
        raise UsageError("--limit must be at least 1 (usage: charmax scan --limit N)")
    pairs = scan_fouvry_primes(args.limit, config.B, config.fouvry_exponent)
    fmt = config.format or "csv"
    _emit(out, fmt, [pp.to_json() for pp in pairs], ["p", "q", "exponent_achieved"],
          [(pp.p, pp.q, pp.ratio_exponent) for pp in pairs])
    return 0


def _delta_one(N, mode, config):
    if mode == "exact":
        return delta_exact_small(N, config.exact_budget, config.seed)
    if mode == "heuristic":
        return delta_heuristic(N, config.heuristic_restarts, config.heuristic_iters, config.seed)
    return rm_upper_bound(N)


def cmd_delta(args, config, out):
    if any(n < 3 for n in args.n):
        raise UsageError("--n must be at least 3")
    fmt = config.format or "json"
    if fmt == "json":
        results = [_delta_one(n, args.mode, config).to_json() for n in args.n]
        out.write(dumps(results[0] if len(results) == 1 else results) + "\n")
        return 0
    rows = []
    for n in args.n:
        lower = delta_heuristic(n, config.heuristic_restarts, config.heuristic_iters, config.seed).value
        try:
            exact = delta_exact_small(n, config.exact_budget, config.seed).value
        except ResourceLimitError:
            exact = "-"
        rows.append((n, lower, exact, rm_upper_bound(n).value))
    _emit(out, fmt, header=["N", "lower_bound", "exact", "rm_ceiling"], rows=rows)
    return 0


def _pair_for(p, q):
    if not is_prime(p) or p < 3:
        raise UsageError(f"--p must be an odd prime, got {p}")
    return PrimePair(p, q if q is not None else largest_prime_factor(p - 1))


def cmd_counterexample(args, config, out):
    if args.scan is not None:
        pairs = scan_fouvry_primes(args.scan, config.B, config.fouvry_exponent)
        rows = []
        for pair in pairs:
            report = build_counterexample(pair, config)
            verify_counterexample(report)
            rows.append((pair.p, pair.q, report.s, report.delta_lower_bound,
                         report.reference_scale, round(report.runtime_ms, 3)))
        header = ["p", "q", "s", "delta_lower_bound", "ref_scale", "runtime_ms"]
        fmt = config.format or "csv"
        _emit(out, fmt, [dict(zip(header, r)) for r in rows], header, rows)
        return 0
    if args.p is None:
        raise UsageError("counterexample needs --p or --scan")
    witness = None
    if args.witness:
        with open(args.witness, encoding="utf-8") as fh:
            witness = BadOrderWitness.from_json(json.load(fh))
    report = build_counterexample(_pair_for(args.p, args.q), config, s=args.s, witness=witness)
    out.write(dumps(report.to_json()) + "\n")
    verify_counterexample(report)
    return 0


def cmd_reduction(args, config, out):
    p = args.p
    if not is_prime(p):
        raise UsageError(f"--p must be prime, got {p}")
    k = args.k if args.k is not None else int(math.floor(math.log2(p))) - 1
    rng = np.random.default_rng(config.seed)
    a = CoefficientVector.from_dense(rng.standard_normal(k) + 1j * rng.standard_normal(k))
    report = verify_ch_reduction(p, k, a)
    out.write(dumps(report.to_json()) + "\n")
    if not report.ok:
        raise IdentityCheckError(f"reduction chain for p={p} failed")
    return 0


def cmd_discrepancy(args, config, out):
    pair = _pair_for(args.p, args.q)
    sub = build_subgroup_context(build_group_context(pair.p), pair.q)
    m = args.m if args.m is not None else etk_m_schedule(args.s, config.delta1)
    report = discrepancy_report(sub, args.s, m, args.resolution)
    if args.points_csv:
        with open(args.points_csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(subgroup_point_set(sub, args.s).to_csv())
    out.write(dumps(report) + "\n")
    if report["etk_bound"] < report["empirical_lower"]:
        raise IdentityCheckError("discrepancy lower bound exceeds the ETK bound")
    return 0


def cmd_rearrange(args, config, out):
    M = args.m if args.m is not None else 4 * args.n
    if args.n < 1 or M < args.n:
        raise UsageError("need --n >= 1 and --m >= --n")
    budget = args.budget if args.budget is not None else config.search_budget
    w = search_bad_permutation(args.n, M, budget, config.seed, restarts=config.restarts,
                               iters=config.iters, c1=config.c1)
    payload = w.to_json()
    tau0, count = discretize_via_shift(w.b, w.sigma, M, config.tau_grid, w.threshold)
    payload["shift"] = {"grid": config.tau_grid, "tau0": tau0, "count": count,
                        "fraction": count / M, "c2": config.c2}
    if args.export:
        with open(args.export, "w", encoding="utf-8") as fh:
            fh.write(dumps(w.to_json()) + "\n")
    out.write(dumps(payload) + "\n")
    return 0


# ----------------------------------------------------------------- parsing

def _global_flags(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--seed", type=int, default=default, help="random seed (default 0)")
    parser.add_argument("--config", default=default, help="key=value config file")
    parser.add_argument("--format", choices=FORMATS, default=default, help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="charmax", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("scan", help="primes p whose p-1 has a large prime factor")
    _global_flags(p, suppress=True)
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--B", type=float, dest="B")
    p.add_argument("--exponent", type=float, dest="fouvry_exponent")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("delta", help="estimate Delta(N)")
    _global_flags(p, suppress=True)
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--mode", choices=("exact", "heuristic", "rm"), default="heuristic")
    p.add_argument("--restarts", type=int, dest="heuristic_restarts")
    p.add_argument("--iters", type=int, dest="heuristic_iters")
    p.add_argument("--exact-budget", type=int, dest="exact_budget")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("counterexample", help="subgroup counterexample for a prime p")
    _global_flags(p, suppress=True)
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--scan", type=int, metavar="LIMIT", help="run every scanned prime up to LIMIT")
    p.add_argument("--witness", help="JSON file from `rearrange --export`")
    p.add_argument("--delta", type=float, dest="delta_param")
    p.add_argument("--s-cap", type=int, dest="s_cap")
    p.add_argument("--budget", type=int, dest="search_budget")
    p.add_argument("--B", type=float, dest="B")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("reduction", help="powers-of-2 reduction chain for a prime p")
    _global_flags(p, suppress=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_reduction)

    p = sub.add_parser("discrepancy", help="subgroup point set coverage and ETK bound")
    _global_flags(p, suppress=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--points-csv", help="also write the point set as CSV")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("rearrange", help="search for a bad ordering of e(sigma(n) x / M)")
    _global_flags(p, suppress=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--grid", type=int, dest="tau_grid")
    p.add_argument("--c1", type=float, dest="c1")
    p.add_argument("--export", help="write (sigma, b) as JSON for `counterexample --witness`")
    p.set_defaults(func=cmd_rearrange)
    return parser


_CONFIG_KEYS = {f for f in RunConfig.__dataclass_fields__}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError("a subcommand is required (scan, delta, counterexample, "
                             "reduction, discrepancy, rearrange)")
        overrides = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS}
        path = args.config or os.environ.get("CHARMAX_CONFIG")
        config = load_config(path, **overrides)
        return args.func(args, config, out)
    except UsageError as exc:
        print(f"E_USAGE: {exc}", file=sys.stderr)
        return EXIT_CODES["E_USAGE"]
    except CharmaxError as exc:
        print(f"{exc.code}: {exc}", file=sys.stderr)
        return EXIT_CODES.get(exc.code, 1)
    except (ValueError, OSError) as exc:
        print(f"E_USAGE: {exc}", file=sys.stderr)
        return EXIT_CODES["E_USAGE"]


if __name__ == "__main__":
    sys.exit(main())
