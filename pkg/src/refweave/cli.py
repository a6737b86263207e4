"""Command line entry point: ``refweave detect|merge|bench``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import harness
from .pipeline import DEFAULT_TIMEOUT, MergeOutcome, ScenarioError, parse_tree, plain_merge, refmerge
from .refdetect import THETA, detect_between
from .textmerge import IOFailure, MarkerError, metrics, read_tree, write_tree

EXIT_CLEAN, EXIT_CONFLICTS, EXIT_ERROR = 0, 1, 2


def cmd_detect(args) -> int:
    v1 = parse_tree(read_tree(args.dir_a), str(args.dir_a))
    v2 = parse_tree(read_tree(args.dir_b), str(args.dir_b))
    for r in detect_between(v1, v2, args.theta):
        print(r)
    return EXIT_CLEAN


def cmd_merge(args) -> int:
    sc = harness.load_scenario(args.scenario)
    if args.plain:
        outcome = MergeOutcome(plain_merge(sc))
    else:
        outcome = refmerge(sc, timeout_secs=args.timeout_secs)
    lines = outcome.report_lines()
    m = metrics(outcome.tree)
    lines.append(f"METRICS files={m.conflicting_files} blocks={m.conflict_blocks} loc={m.conflicting_loc} "
                 f"ref_conflicts={len(outcome.ref_conflicts)}")
    print("\n".join(lines))
    if args.out:
        out = Path(args.out)
        write_tree(outcome.tree, out)
        (out.parent / f"{out.name}.report.txt").write_text("\n".join(lines) + "\n")
    if outcome.timed_out:
        return EXIT_ERROR
    return EXIT_CLEAN if outcome.clean else EXIT_CONFLICTS


def cmd_bench(args) -> int:
    tools = [t.strip() for t in args.tools.split(",") if t.strip()]
    reports = harness.bench(args.corpus, tools, args.timeout_secs, args.jobs)
    print(harness.render_table(reports), end="")
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        harness.write_jsonl(reports, args.report)
        from .plots import render_figures
        for fig in render_figures(reports, args.report):
            print(f"figure: {fig}")
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="refweave", description="Refactoring-aware three-way merge")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("detect", help="list refactorings between two source trees")
    d.add_argument("dir_a", type=Path)
    d.add_argument("dir_b", type=Path)
    d.add_argument("--theta", type=float, default=THETA, help="similarity threshold")
    d.set_defaults(func=cmd_detect)

    m = sub.add_parser("merge", help="merge one scenario directory")
    m.add_argument("scenario", type=Path)
    m.add_argument("--plain", action="store_true", help="line-based merge only")
    m.add_argument("--timeout-secs", type=float, default=DEFAULT_TIMEOUT)
    m.add_argument("--out", type=Path, help="directory for the merged tree")
    m.set_defaults(func=cmd_merge)

    b = sub.add_parser("bench", help="run a corpus of scenarios")
    b.add_argument("corpus", type=Path)
    b.add_argument("--tools", default="plain,refweave")
    b.add_argument("--report", type=Path, help="JSONL output; figures are written beside it")
    b.add_argument("--timeout-secs", type=float, default=DEFAULT_TIMEOUT)
    b.add_argument("--jobs", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (harness.LayoutError, ScenarioError, MarkerError, IOFailure, ValueError, OSError) as exc:
        print(f"refweave: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
