"""Command-line driver: parse, preprocess, run, verify, print.

Exit codes: 0 success, 1 verification failure, 2 input/usage error,
3 resource cap hit. The interpolant goes to stdout; stats go to stderr,
as a single JSON line under --format stats-json.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .conditional import DEFAULT_MAX_CDAGS, DEFAULT_MAX_CLAUSES, compute_conditional_ui
from .errors import InputError, ResourceLimitError
from .euf import DEFAULT_MAX_CUBES, euf_equiv, euf_valid
from .formulas import fsize, mk_and
from .parse import format_formula, parse, print_ui
from .preprocess import flatten
from .tableaux import DEFAULT_MAX_BRANCHES, compute_tableaux_ui
from .terms import lit_general

STATS_KEYS = (
    "branches_explored",
    "rule4_firings",
    "s2_size",
    "s3_size",
    "num_cdags",
    "ui_compressed_size",
    "ui_unravelled_size",
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="euf-ui",
        description="Compute the uniform interpolant of an existentially "
        "quantified EUF constraint.",
    )
    p.add_argument("file", nargs="?", default="-",
                   help="problem file (default: stdin)")
    p.add_argument("--algorithm", choices=("tableaux", "conditional", "both"),
                   default="conditional")
    p.add_argument("--unravel", action="store_true",
                   help="print the fully expanded interpolant instead of the let form")
    p.add_argument("--verify", choices=("off", "residue", "equivalence"), default="off")
    p.add_argument("--max-branches", type=int, default=DEFAULT_MAX_BRANCHES)
    p.add_argument("--max-clauses", type=int, default=DEFAULT_MAX_CLAUSES)
    p.add_argument("--max-cdags", type=int, default=DEFAULT_MAX_CDAGS)
    p.add_argument("--max-cubes", type=int, default=DEFAULT_MAX_CUBES)
    p.add_argument("--timeout-ms", type=int, default=None)
    p.add_argument("--format", choices=("smtlib-like", "stats-json"), default="smtlib-like")
    p.add_argument("--strategy", choices=("default", "reversed"), default="default")
    p.add_argument("--prune", choices=("syntactic", "semantic"), default="syntactic")
    p.add_argument("--jobs", type=int, default=1)
    return p


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise InputError(f"not valid UTF-8: {exc}") from None


def _ui_sizes(result, unravel: bool) -> dict:
    sizes = {"ui_compressed_size": fsize(result.formula())}
    if unravel:
        sizes["ui_unravelled_size"] = fsize(result.formula(unravel=True))
    return sizes


def _collect_stats(args, tab, cond) -> dict:
    stats = {k: 0 for k in STATS_KEYS if k != "ui_unravelled_size"}
    if tab is not None:
        stats["branches_explored"] = tab.stats["branches_explored"]
        stats["rule4_firings"] = tab.stats["rule4_firings"]
    if cond is not None:
        stats["s2_size"] = cond.stats["s2_size"]
        stats["s3_size"] = cond.stats["s3_size"]
        stats["num_cdags"] = cond.stats["num_cdags"]
    stats.update(_ui_sizes(cond if cond is not None else tab, args.unravel))
    return stats


def _emit_stats(args, stats: dict, elapsed_ms: int) -> None:
    if args.format == "stats-json":
        print(json.dumps(stats, sort_keys=True), file=sys.stderr)
    else:
        pairs = " ".join(f"{k}={stats[k]}" for k in STATS_KEYS if k in stats)
        print(f"stats: {pairs} elapsed_ms={elapsed_ms}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verify == "equivalence" and args.algorithm != "both":
        parser.error("--verify equivalence requires --algorithm both")

    try:
        problem = parse(_read_input(args.file))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    started = time.monotonic()
    timeout_at = None
    if args.timeout_ms is not None:
        timeout_at = started + args.timeout_ms / 1000.0

    tab = cond = None
    try:
        pre = flatten(problem)
        if args.algorithm in ("tableaux", "both"):
            tab = compute_tableaux_ui(
                pre,
                strategy=args.strategy,
                max_branches=args.max_branches,
                timeout_at=timeout_at,
                prune=args.prune,
                jobs=args.jobs,
            )
        if args.algorithm in ("conditional", "both"):
            cond = compute_conditional_ui(
                pre,
                max_clauses=args.max_clauses,
                max_cdags=args.max_cdags,
                timeout_at=timeout_at,
            )

        verified_line = None
        if args.verify == "residue":
            inp = mk_and([lit_general(l) for l in problem.body.literals])
            for result in (tab, cond):
                if result is None:
                    continue
                ok, cube = euf_valid(inp, result.formula(), max_cubes=args.max_cubes)
                if not ok:
                    print("verification-failed residue "
                          + format_formula(mk_and(cube)))
                    return 1
        elif args.verify == "equivalence":
            ok, witness = euf_equiv(tab.formula(), cond.formula(), max_cubes=args.max_cubes)
            if not ok:
                direction, cube = witness
                print(f"verification-failed {direction} " + format_formula(mk_and(cube)))
                return 1
            verified_line = "equivalent"
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3

    mode = "unravelled" if args.unravel else "compressed"
    if args.algorithm == "both":
        print(f"tableaux: {print_ui(tab, mode)}")
        print(f"conditional: {print_ui(cond, mode)}")
    else:
        print(print_ui(tab if args.algorithm == "tableaux" else cond, mode))
    if verified_line:
        print(verified_line)

    elapsed_ms = int((time.monotonic() - started) * 1000)
    _emit_stats(args, _collect_stats(args, tab, cond), elapsed_ms)
    return 0


if __name__ == "__main__":
    sys.exit(main())
