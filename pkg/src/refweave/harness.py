"""Scenario loading, baseline comparison and corpus benchmarking."""
from __future__ import annotations

import difflib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

from .pipeline import DEFAULT_TIMEOUT, MergeOutcome, MergeScenario, plain_merge, refmerge
from .textmerge import ConflictMetrics, MergedTree, metrics, read_tree

log = logging.getLogger(__name__)

TOOLS = ("plain", "refweave")
RESOLVED, CHANGED, UNCHANGED, TIMEOUT, BASELINE = "Resolved", "Changed", "Unchanged", "Timeout", "Baseline"
GRANULARITIES = ("files", "blocks", "loc")


class LayoutError(Exception):
    pass


def read_manifest(path: Path) -> Dict[str, str]:
    out = {}
    for line in path.read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise LayoutError(f"{path}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _commits(d: Path) -> Optional[List[Dict[str, str]]]:
    if not d.is_dir():
        return None
    return [read_tree(c) for c in sorted(d.iterdir()) if c.is_dir()]


def load_scenario(directory) -> MergeScenario:
    d = Path(directory)
    if not d.is_dir():
        raise LayoutError(f"{d} is not a directory")
    for part in ("base", "left", "right"):
        if not (d / part).is_dir():
            raise LayoutError(f"{d}: missing {part}/")
    manifest = read_manifest(d / "manifest.txt") if (d / "manifest.txt").is_file() else {}
    expected = read_tree(d / "expected") if (d / "expected").is_dir() else None
    return MergeScenario(manifest.get("id", d.name), read_tree(d / "base"), read_tree(d / "left"),
                         read_tree(d / "right"), _commits(d / "left_commits"),
                         _commits(d / "right_commits"), expected, manifest.get("notes", ""))


@dataclass
class ScenarioReport:
    id: str
    tool: str
    metrics: ConflictMetrics
    ref_conflicts: int = 0
    status: str = BASELINE
    deltas: Dict[str, Dict[str, object]] = field(default_factory=dict)
    seconds: float = 0.0
    expected_diff_lines: Optional[int] = None
    details: List[str] = field(default_factory=list)

    @property
    def conflict_free(self) -> bool:
        return self.metrics.as_tuple() == (0, 0, 0) and self.ref_conflicts == 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["metrics"] = dict(zip(GRANULARITIES, self.metrics.as_tuple()))
        return d


@dataclass
class Comparison:
    status: str
    pct: Dict[str, Optional[float]]
    direction: Dict[str, str]


def compare(baseline: ScenarioReport, candidate: ScenarioReport) -> Comparison:
    b, c = baseline.metrics.as_tuple(), candidate.metrics.as_tuple()
    pct, direction = {}, {}
    for g, bv, cv in zip(GRANULARITIES, b, c):
        pct[g] = (bv - cv) / bv * 100.0 if bv > 0 else None
        direction[g] = "reduced" if cv < bv else "increased" if cv > bv else "equal"
    if candidate.status == TIMEOUT:
        status = TIMEOUT
    elif b == c and baseline.ref_conflicts == candidate.ref_conflicts:
        status = UNCHANGED
    elif candidate.conflict_free:
        status = RESOLVED
    else:
        status = CHANGED
    return Comparison(status, pct, direction)


def diff_count(merged: Dict[str, str], expected: Dict[str, str]) -> int:
    """Lines that differ between a merge and the recorded developer merge."""
    n = 0
    for p in sorted(set(merged) | set(expected)):
        a, b = merged.get(p, "").splitlines(), expected.get(p, "").splitlines()
        n += sum(1 for ln in difflib.unified_diff(a, b, lineterm="", n=0)
                 if ln[:1] in "+-" and not ln.startswith(("+++", "---")))
    return n


def _report(sc: MergeScenario, tool: str, tree: MergedTree, outcome: Optional[MergeOutcome], seconds: float):
    rep = ScenarioReport(sc.id, tool, metrics(tree), seconds=round(seconds, 3))
    if outcome is not None:
        rep.ref_conflicts = len(outcome.ref_conflicts)
        rep.details = outcome.report_lines()
        if outcome.timed_out:
            rep.status = TIMEOUT
    if sc.expected is not None and not (outcome and outcome.timed_out):
        rep.expected_diff_lines = diff_count(tree.files, sc.expected)
    return rep


def run_loaded(sc: MergeScenario, tool: str, timeout_secs: Optional[float] = DEFAULT_TIMEOUT,
               baseline: Optional[ScenarioReport] = None) -> ScenarioReport:
    if tool not in TOOLS:
        raise ValueError(f"unknown tool {tool!r}")
    start = time.monotonic()
    if tool == "plain":
        tree, outcome = plain_merge(sc), None
    else:
        outcome = refmerge(sc, timeout_secs=timeout_secs)
        tree = outcome.tree
    rep = _report(sc, tool, tree, outcome, time.monotonic() - start)
    if tool != "plain":
        if baseline is None:
            baseline = _report(sc, "plain", plain_merge(sc), None, 0.0)
        cmp = compare(baseline, rep)
        rep.status = cmp.status
        rep.deltas = {g: {"direction": cmp.direction[g], "pct": cmp.pct[g]} for g in GRANULARITIES}
    return rep


def run_scenario(directory, tool: str, timeout_secs: Optional[float] = DEFAULT_TIMEOUT) -> ScenarioReport:
    return run_loaded(load_scenario(directory), tool, timeout_secs)


def scenario_dirs(corpus) -> List[Path]:
    root = Path(corpus)
    found = sorted(p.parent for p in root.rglob("base") if p.is_dir() and (p.parent / "left").is_dir())
    if not found:
        raise LayoutError(f"{root}: no scenarios found")
    return found


def _run_all_tools(args) -> List[ScenarioReport]:
    directory, tools, timeout_secs = args
    sc = load_scenario(directory)
    baseline = run_loaded(sc, "plain")
    return [baseline if t == "plain" else run_loaded(sc, t, timeout_secs, baseline) for t in tools]


def bench(corpus, tools: Sequence[str] = TOOLS, timeout_secs: Optional[float] = DEFAULT_TIMEOUT,
          jobs: int = 1) -> List[ScenarioReport]:
    """Run every scenario under ``corpus``; reports come back sorted by (id, tool order)."""
    for t in tools:
        if t not in TOOLS:
            raise ValueError(f"unknown tool {t!r}")
    work = [(d, tuple(tools), timeout_secs) for d in scenario_dirs(corpus)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_run_all_tools, work))
    else:
        batches = [_run_all_tools(w) for w in work]
    reports = [r for b in batches for r in b]
    order = {t: i for i, t in enumerate(tools)}
    return sorted(reports, key=lambda r: (r.id, order[r.tool]))


def write_jsonl(reports: Iterable[ScenarioReport], path) -> None:
    with open(path, "w") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def summarize(reports: Sequence[ScenarioReport]) -> Dict[str, Dict[str, int]]:
    out: Dict[str, Dict[str, int]] = {}
    for r in reports:
        row = out.setdefault(r.tool, {"scenarios": 0, "files": 0, "blocks": 0, "loc": 0, "ref_conflicts": 0})
        row["scenarios"] += 1
        for g, v in zip(GRANULARITIES, r.metrics.as_tuple()):
            row[g] += v
        row["ref_conflicts"] += r.ref_conflicts
        row[r.status] = row.get(r.status, 0) + 1
    return out


def render_table(reports: Sequence[ScenarioReport]) -> str:
    head = f"{'scenario':<28} {'tool':<9} {'files':>5} {'blocks':>6} {'loc':>5} {'refc':>4}  status"
    lines = [head, "-" * len(head)]
    for r in reports:
        f, b, loc = r.metrics.as_tuple()
        lines.append(f"{r.id:<28} {r.tool:<9} {f:>5} {b:>6} {loc:>5} {r.ref_conflicts:>4}  {r.status}")
    lines.append("")
    for tool, row in summarize(reports).items():
        counts = ", ".join(f"{k}={row[k]}" for k in (RESOLVED, CHANGED, UNCHANGED, TIMEOUT) if k in row)
        lines.append(f"{tool}: {row['scenarios']} scenarios, files={row['files']} blocks={row['blocks']} "
                     f"loc={row['loc']} ref_conflicts={row['ref_conflicts']}" + (f" ({counts})" if counts else ""))
    return "\n".join(lines) + "\n"
