"""
MAIN ENTRY POINT - CLI for weighted post* analysis of recursive state machines.

WORKFLOW:
  1. load   → services.persistence reads the JSON document (RSM or CRSM)
  2. check  → module_rsm.validate() reports structural violations
  3. run    → module_confdist.post_star() / module_concurrent / module_oracle
  4. output → result lines on stdout, diagnostics on stderr, files on request

COMMANDS:
  - validate <rsm>
  - post-star <rsm> --init <config|entries:M> [--out <file>] [--dot <file>]
  - query <rsm> --init ... --queries <file>     → "kind input => weight" lines
  - concurrent <crsm> -k <int> --check <g;cfg1;cfg2>
  - oracle <rsm> --init ... --queries <file>
  - bench dense --sizes 10,20,40,80 [--csv <file>]

EXIT STATUS:
  0 success, 1 invalid document or RSM, 2 usage error,
  3 non-termination / budget / inconclusive oracle
"""
import argparse
import sys
from typing import List, Optional

from colorama import deinit, init

from confdist.config import load_config
from confdist.core.constants import (
    DEFAULT_BENCH_SIZES, EXIT_DIAGNOSTIC, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION
)
from confdist.core.errors import (
    AutomatonShapeError, BudgetExceededError, ContextBoundError, DocumentError,
    InconclusiveError, NonTerminationError
)
from confdist.core.state import EngineStats
from confdist.modules.module_automaton import dot_export
from confdist.modules.module_concurrent import is_global_config_reachable, k_bounded_reach
from confdist.modules.module_confdist import post_star
from confdist.modules.module_rsm import validate
from confdist.services.bench_service import bench_dense, rows_to_csv, speedup_trend, write_csv
from confdist.services.persistence import load_crsm, load_queries, load_rsm, save_automaton
from confdist.services.query_service import initial_automaton, prepare, run_oracle_queries, run_queries
from confdist.utils.console import log_console
from confdist.utils.file_ops import safe_write_text
from confdist.utils.helpers import format_seconds
from confdist.utils.validation import parse_global_configuration, parse_sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confdist",
        description="Weighted post* saturation and distance queries for recursive state machines.")
    parser.add_argument("--config", help="Optional JSON settings file (limits, oracle bounds, bench sizes).")
    subparsers = parser.add_subparsers(dest="command", required=True)

    validate_parser = subparsers.add_parser("validate", help="Check an RSM document.")
    validate_parser.add_argument("rsm", help="Path to the RSM JSON document.")

    post_parser = subparsers.add_parser("post-star", help="Saturate the automaton of an initial set.")
    post_parser.add_argument("rsm")
    post_parser.add_argument("--init", required=True, help="Initial configuration node[b1,b2] or entries:Module.")
    post_parser.add_argument("--out", help="Write the saturated automaton as JSON.")
    post_parser.add_argument("--dot", help="Write the saturated automaton as Graphviz DOT.")

    query_parser = subparsers.add_parser("query", help="Answer distance queries from A_post*.")
    query_parser.add_argument("rsm")
    query_parser.add_argument("--init", required=True)
    query_parser.add_argument("--queries", required=True, help="Path to the query JSON document.")
    query_parser.add_argument("--block-size", type=int, help="Answer superconfig queries through z-blocks of this size.")

    concurrent_parser = subparsers.add_parser("concurrent", help="k-bounded reachability of a concurrent RSM.")
    concurrent_parser.add_argument("crsm", help="Path to the CRSM JSON document.")
    concurrent_parser.add_argument("-k", type=int, required=True, help="Number of contexts (k-1 switches).")
    concurrent_parser.add_argument("--check", action="append", default=[],
                                   help="Global configuration g;node1[stack];node2[stack]. Repeatable.")

    oracle_parser = subparsers.add_parser("oracle", help="Answer queries by stack-bounded explicit search.")
    oracle_parser.add_argument("rsm")
    oracle_parser.add_argument("--init", required=True)
    oracle_parser.add_argument("--queries", required=True)

    bench_parser = subparsers.add_parser("bench", help="Time ConfDist against the pushdown baseline.")
    bench_parser.add_argument("family", choices=["dense"])
    bench_parser.add_argument("--sizes", help="Comma-separated sizes, default from settings.")
    bench_parser.add_argument("--csv", help="Write results as CSV.")
    bench_parser.add_argument("--repetitions", type=int, help="Timed runs per engine and size (median).")
    bench_parser.add_argument("--quiet", action="store_true", help="No progress bar.")
    return parser


# ============== Commands ==============

def _load_valid_rsm(path: str):
    rsm = load_rsm(path)
    report = validate(rsm)
    if not report.ok:
        for violation in report:
            log_console(violation, "error")
        return None
    return rsm


def cmd_validate(args, settings) -> int:
    rsm = _load_valid_rsm(args.rsm)
    if rsm is None:
        log_console(f"{args.rsm}: invalid RSM", "error")
        return EXIT_VALIDATION
    log_console(
        f"{args.rsm}: ok ({rsm.module_count} modules, {len(rsm.nodes)} nodes, "
        f"{rsm.transition_count} transitions, semiring {rsm.semiring.name})", "success")
    return EXIT_OK


def cmd_post_star(args, settings) -> int:
    rsm = _load_valid_rsm(args.rsm)
    if rsm is None:
        return EXIT_VALIDATION
    rsm, initial = prepare(rsm, args.init)
    stats = EngineStats()
    apost = post_star(rsm, initial_automaton(rsm, initial), settings.relaxation_cap, stats)
    print(f"states={len(apost.states)} transitions={apost.transition_count} marks={apost.marks} "
          f"relaxations={stats.relaxations} operations={stats.operations}")
    if args.out and not save_automaton(apost, args.out):
        return EXIT_USAGE
    if args.dot and not safe_write_text(args.dot, dot_export(apost)):
        return EXIT_USAGE
    return EXIT_OK


def cmd_query(args, settings) -> int:
    rsm = _load_valid_rsm(args.rsm)
    if rsm is None:
        return EXIT_VALIDATION
    for result in run_queries(rsm, args.init, load_queries(args.queries), settings, args.block_size):
        print(result.line)
    return EXIT_OK


def cmd_oracle(args, settings) -> int:
    rsm = _load_valid_rsm(args.rsm)
    if rsm is None:
        return EXIT_VALIDATION
    for result in run_oracle_queries(rsm, args.init, load_queries(args.queries), settings):
        print(result.line)
    return EXIT_OK


def cmd_concurrent(args, settings) -> int:
    crsm = load_crsm(args.crsm)
    checks = [(text, parse_global_configuration(crsm, text)) for text in args.check]
    reach = k_bounded_reach(crsm, args.k, settings.relaxation_cap)
    log_console(f"k={args.k}: {sum(len(r) for r in reach.rounds)} items, "
                f"{reach.post_star_calls} post* calls")
    for text, gc in checks:
        verdict = "true" if is_global_config_reachable(reach, gc) else "false"
        print(f"reachable {text} => {verdict}")
    return EXIT_OK


def cmd_bench(args, settings) -> int:
    sizes = parse_sizes(args.sizes) if args.sizes else list(settings.bench_sizes or DEFAULT_BENCH_SIZES)
    repetitions = args.repetitions or settings.bench_repetitions
    if repetitions < 1:
        raise ValueError("--repetitions must be positive")
    rows = bench_dense(sizes, repetitions, show_progress=not args.quiet, relaxation_cap=settings.relaxation_cap)
    for row in rows:
        log_console(f"n={row.n}: confdist {format_seconds(row.confdist_seconds)}, "
                    f"wpds {format_seconds(row.wpds_seconds)}, speedup {row.speedup:.2f}")
    if len(rows) > 1:
        log_console(f"speedup trend (largest/smallest n): {speedup_trend(rows):.2f}")
    if args.csv:
        if not write_csv(rows, args.csv):
            return EXIT_USAGE
        log_console(f"CSV written to {args.csv}", "success")
    else:
        sys.stdout.write(rows_to_csv(rows))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "post-star": cmd_post_star,
    "query": cmd_query,
    "concurrent": cmd_concurrent,
    "oracle": cmd_oracle,
    "bench": cmd_bench,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parses command line arguments and dispatches to a command.
    Returns the exit status instead of exiting.
    """
    init()
    try:
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else EXIT_USAGE
        settings = load_config(args.config)
        try:
            return COMMANDS[args.command](args, settings)
        except DocumentError as e:
            log_console(f"Invalid document: {e}", "error")
            return EXIT_VALIDATION
        except AutomatonShapeError as e:
            log_console(f"Invalid automaton: {e}", "error")
            return EXIT_VALIDATION
        except (NonTerminationError, BudgetExceededError, InconclusiveError) as e:
            log_console(f"{type(e).__name__}: {e}", "error")
            return EXIT_DIAGNOSTIC
        except FileNotFoundError as e:
            log_console(str(e), "error")
            return EXIT_USAGE
        except KeyError as e:
            log_console(f"Unknown name: {e.args[0] if e.args else e}", "error")
            return EXIT_USAGE
        except (ContextBoundError, ValueError) as e:
            log_console(f"Usage error: {e}", "error")
            return EXIT_USAGE
    finally:
        deinit()


if __name__ == "__main__":
    sys.exit(main())
