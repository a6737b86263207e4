"""End-to-end refactoring-aware merge of one scenario."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .interaction import Combined, InteractionVerdict, combine
from .lang import MJSyntaxError, PathMismatch, DuplicateDeclaration, parse_file, print_unit
from .lang.program import Program, build_program
from .refdetect import detect_along
from .refmodel import Refactoring, RefactoringKind as K
from .refops import InversionLog, ReplayLog, invert_all, replay_all
from .simplify import ProcessedRefList, simplify
from .textmerge import MergedTree, has_markers, map_left_span, merge_trees, parse_conflicts

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 900.0
SOURCE_SUFFIX = ".mj"

Tree = Dict[str, str]


class ScenarioError(Exception):
    pass


class Timeout(Exception):
    pass


@dataclass
class MergeScenario:
    id: str
    base: Tree
    left: Tree
    right: Tree
    left_commits: Optional[List[Tree]] = None
    right_commits: Optional[List[Tree]] = None
    expected: Optional[Tree] = None
    notes: str = ""


@dataclass
class MergeOutcome:
    tree: MergedTree
    ref_conflicts: List[InteractionVerdict] = field(default_factory=list)
    detected: Dict[str, List[Refactoring]] = field(default_factory=dict)
    processed: Dict[str, ProcessedRefList] = field(default_factory=dict)
    inversion: Dict[str, InversionLog] = field(default_factory=dict)
    replay: Optional[ReplayLog] = None
    combined: Optional[Combined] = None
    timed_out: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.tree.conflicts and not self.tree.delete_modify and not self.ref_conflicts

    def report_lines(self) -> List[str]:
        lines = []
        for side in ("L", "R"):
            for r in self.detected.get(side, []):
                lines.append(f"DETECTED {r}")
        for side in ("L", "R"):
            inv = self.inversion.get(side)
            for e in (inv.entries if inv else []):
                state = "OK" if e.applied else f"SKIPPED {e.reason}"
                lines.append(f"INVERTED {state} {e.refactoring}")
        for e in (self.replay.entries if self.replay else []):
            state = "OK" if e.applied else f"SKIPPED {e.reason}"
            lines.append(f"REPLAYED {state} {e.refactoring}")
        lines += [str(v) for v in self.ref_conflicts]
        for path, side in self.tree.delete_modify:
            lines.append(f"DELETE_MODIFY {path} deleted_by={side}")
        if self.timed_out:
            lines.append("TIMEOUT")
        return lines


class _Deadline:
    def __init__(self, seconds: Optional[float]):
        self.end = None if seconds is None else time.monotonic() + seconds

    def check(self, step: str):
        if self.end is not None and time.monotonic() > self.end:
            raise Timeout(step)


def is_source(path: str) -> bool:
    return path.endswith(SOURCE_SUFFIX)


def parse_tree(tree: Tree, label: str = "", check_paths: bool = True) -> Program:
    try:
        files = [parse_file(p, t) for p, t in sorted(tree.items()) if is_source(p)]
        return build_program(files, check_paths=check_paths)[0]
    except (MJSyntaxError, PathMismatch, DuplicateDeclaration, ValueError) as exc:
        raise ScenarioError(f"{label}: {exc}") from exc


def plain_merge(scenario: MergeScenario) -> MergedTree:
    return merge_trees(scenario.base, scenario.left, scenario.right)


def _commit_chain(base: Tree, commits: Optional[Sequence[Tree]], tip: Tree) -> List[Tree]:
    chain = [base] + list(commits or [])
    if chain[-1] != tip:
        chain.append(tip)
    return chain


def _units(program: Program):
    return {f.path: f.unit for f in program.files}


def _touched(before: Program, after: Program) -> Set[str]:
    a, b = _units(before), _units(after)
    return {p for p in set(a) | set(b) if a.get(p) != b.get(p)}


def _text_tree(raw: Tree, program: Program, touched: Set[str]) -> Tree:
    """Raw bytes for untouched paths, canonical prints for paths inversion touched."""
    units = _units(program)
    out = {p: t for p, t in raw.items() if not (is_source(p) and p in touched)}
    for p in touched:
        if p in units:
            out[p] = print_unit(units[p])
        else:
            out.pop(p, None)
    return out


def refmerge(scenario: MergeScenario, detect: bool = True, timeout_secs: Optional[float] = DEFAULT_TIMEOUT,
             replay_semantic: bool = True) -> MergeOutcome:
    """Refactoring-aware merge; ``detect=False`` reduces it to the plain merge."""
    if not detect:
        return MergeOutcome(plain_merge(scenario))
    deadline = _Deadline(timeout_secs)
    try:
        return _refmerge(scenario, deadline, replay_semantic)
    except Timeout as exc:
        log.warning("scenario %s timed out during %s", scenario.id, exc)
        return MergeOutcome(MergedTree(), timed_out=True, notes=[f"timeout during {exc}"])


def _refmerge(sc: MergeScenario, deadline: _Deadline, replay_semantic: bool) -> MergeOutcome:
    base = parse_tree(sc.base, "base")
    parents = {"L": sc.left, "R": sc.right}
    commits = {"L": sc.left_commits, "R": sc.right_commits}
    out = MergeOutcome(MergedTree())
    inverted: Dict[str, Program] = {}
    programs: Dict[str, Program] = {}
    # steps 1 and 2
    for side in ("L", "R"):
        chain = [parse_tree(t, f"{side} commit {i}") for i, t in
                 enumerate(_commit_chain(sc.base, commits[side], parents[side]))]
        programs[side] = chain[-1]
        raw = [replace(r, branch=side) for r in detect_along(chain)] if len(chain) > 1 else []
        out.detected[side] = raw
        processed = simplify(raw)
        out.processed[side] = processed
        deadline.check("detection")
        inverted[side], out.inversion[side] = invert_all(chain[-1], processed.refs)
        deadline.check("inversion")
    # step 3
    touched = _touched(programs["L"], inverted["L"]) | _touched(programs["R"], inverted["R"])
    trees = {"B": _text_tree(sc.base, base, touched)}
    for side in ("L", "R"):
        trees[side] = _text_tree(parents[side], inverted[side], touched)
    merged = merge_trees(trees["B"], trees["L"], trees["R"])
    deadline.check("merge")
    # step 4
    ok = {}
    for side in ("L", "R"):
        entries = out.inversion[side].entries
        ok[side] = [e.refactoring for e in entries if e.applied]
    comb = combine(base, ok["L"], ok["R"], replay_semantic=replay_semantic)
    out.combined = comb
    out.ref_conflicts = list(comb.conflicts)
    # step 5
    out.tree, out.replay = _replay(merged, comb.replay.refs, out, trees)
    deadline.check("replay")
    return out


def _replay(merged: MergedTree, refs: Sequence[Refactoring], out: MergeOutcome, trees):
    clean = {p: t for p, t in merged.files.items() if is_source(p) and not has_markers(t)}
    try:
        program = parse_tree(clean, "merged", check_paths=False)
    except ScenarioError as exc:
        out.notes.append(f"merged tree not parseable, replay skipped: {exc}")
        return merged, ReplayLog()
    anchors = {}
    for i, r in enumerate(refs):
        if r.kind == K.ExtractMethod:
            anchors[i] = _extract_anchor(r, out, merged, program)
    replayed, rlog = replay_all(program, refs, anchors)
    before, after = _units(program), _units(replayed)
    files = dict(merged.files)
    for p in set(before) - set(after):
        files.pop(p, None)
    for p, unit in after.items():
        if before.get(p) != unit:
            files[p] = print_unit(unit)
    conflicts = [b for p in sorted(files) for b in parse_conflicts(files[p], p)]
    tree = MergedTree(files, conflicts,
                      {p: v for p, v in merged.provenance.items() if p in files and files[p] == merged.files.get(p)},
                      {p: v for p, v in merged.hunks.items() if p in files and files[p] == merged.files.get(p)},
                      list(merged.delete_modify))
    return tree, rlog


def _extract_anchor(r: Refactoring, out: MergeOutcome, merged: MergedTree, program: Program) -> Optional[Tuple[int, int]]:
    """Statement range in the merged host that holds the block once inlined for ``r``."""
    side = r.branch
    processed = out.processed.get(side)
    inv = out.inversion.get(side)
    if processed is None or inv is None:
        return None
    idx = next((i for i, x in enumerate(processed.refs) if x.seq == r.seq), None)
    anchor = inv.anchors.get(idx)
    if anchor is None:
        return None
    text = merged.files.get(anchor.path)
    if text is None or has_markers(text):
        return None
    span = map_left_span(merged.hunks.get(anchor.path, ()), anchor.lines[0], anchor.lines[1],
                         "left" if side == "L" else "right")
    if span is None:
        return None
    info = program.index.methods.get(r.before)
    if info is None:
        return None
    hit = [k for k, s in enumerate(info.decl.body) if s.line <= span[1] and s.end_line >= span[0]]
    return (hit[0], hit[-1]) if hit else None
