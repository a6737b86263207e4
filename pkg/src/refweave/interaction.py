"""Cross-branch refactoring interactions: conflicts, commutation, combination."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .lang.program import ElementId, Program
from .refmodel import (FAMILY_KINDS, HIERARCHY, MOVE_RENAMES, MOVES, RENAMES, Refactoring,
                       RefactoringKind as K, family_kind, inverse, rebase)
from .simplify import BOTTOM_UP, ProcessedRefList

SAME_SOURCE = "SameSourceDiffTarget"
SAME_TARGET = "DiffSourceSameTarget"
OVERRIDE = "AccidentalOverride"
OVERLOAD = "AccidentalOverload"
SEMANTIC = (OVERRIDE, OVERLOAD)

CONFLICT = "Conflict"
COMMUTATIVE = "Commutative"
INDEPENDENT = "Independent"


@dataclass(frozen=True)
class InteractionVerdict:
    left: Refactoring
    right: Refactoring
    verdict: str
    reason: Optional[str] = None

    @property
    def pair(self) -> Tuple[Refactoring, Refactoring]:
        return (self.left, self.right)

    def __str__(self) -> str:
        if self.verdict == CONFLICT:
            return f"REF_CONFLICT {self.reason} L: {self.left} R: {self.right}"
        return f"{self.verdict.upper()} L: {self.left} R: {self.right}"


# ---------------------------------------------------------------------------
# element roles

def aspects(r: Refactoring) -> Dict[str, object]:
    """Values a refactoring assigns to its element, keyed by aspect."""
    if r.kind == K.InlineMethod:
        return {"removed": True}
    if r.kind == K.ExtractMethod:
        return {}
    if r.kind in HIERARCHY:
        return {"container": (r.after.container, r.classes)}
    if r.kind in MOVE_RENAMES:
        return {"name": r.after.name, "container": r.after.container}
    if r.kind in MOVES:
        return {"container": r.after.container}
    return {"name": r.after.name}


def result(r: Refactoring) -> Optional[ElementId]:
    """The element a refactoring produces (the created method for extract)."""
    return None if r.kind == K.InlineMethod else r.after


def origin(r: Refactoring) -> Optional[ElementId]:
    """The pre-existing element that turns into ``result(r)``."""
    return None if r.kind == K.ExtractMethod else r.before


def overrides(program: Program, m1: Optional[ElementId], m2: Optional[ElementId]) -> bool:
    if m1 is None or m2 is None or m1.kind != "Method" or m2.kind != "Method":
        return False
    c1, c2 = m1.container, m2.container
    idx = program.index
    related = c1 != c2 and (idx.is_subclass(c1, c2) or idx.is_subclass(c2, c1))
    return related and m1.name == m2.name and m1.params == m2.params


def overloads(program: Program, m1: Optional[ElementId], m2: Optional[ElementId]) -> bool:
    if m1 is None or m2 is None or m1.kind != "Method" or m2.kind != "Method":
        return False
    return m1.container == m2.container and m1.name == m2.name and m1.params != m2.params


def same(r1: Refactoring, r2: Refactoring) -> bool:
    return r1 == r2


def has_conflict(base: Program, r1: Refactoring, r2: Refactoring) -> Optional[str]:
    """Conflict reason for a left/right pair expressed against ``base``, if any."""
    if same(r1, r2):
        return None
    if r1.before == r2.before:
        a1, a2 = aspects(r1), aspects(r2)
        if "removed" in a1 or "removed" in a2:
            return SAME_SOURCE
        if any(a1[k] != a2[k] for k in a1.keys() & a2.keys()):
            return SAME_SOURCE
    t1, t2 = result(r1), result(r2)
    if r1.before != r2.before and t1 is not None and t1 == t2:
        return SAME_TARGET
    o1, o2 = origin(r1), origin(r2)
    if overrides(base, t1, t2) and not overrides(base, o1, o2):
        return OVERRIDE
    if overloads(base, t1, t2) and not overloads(base, o1, o2):
        return OVERLOAD
    return None


def is_commutative(r1: Refactoring, r2: Refactoring) -> bool:
    return r1.kind != r2.kind and r1.before == r2.before and not order_sensitive(r1, r2)


def order_sensitive(r1: Refactoring, r2: Refactoring) -> bool:
    """Same-element pairs whose outcome depends on replay order.

    An extracted method lands in whatever class hosts the method at that
    moment, and a single rename cannot follow every copy of a push-down.
    """
    for a, b in ((r1, r2), (r2, r1)):
        if a.kind in (K.ExtractMethod, K.InlineMethod) and b.kind in MOVES | MOVE_RENAMES:
            return True
        if a.kind in HIERARCHY and len(a.classes) > 1 and b.kind in RENAMES:
            return True
    return False


def classify(base: Program, r1: Refactoring, r2: Refactoring) -> InteractionVerdict:
    reason = has_conflict(base, r1, r2)
    if reason is not None:
        return InteractionVerdict(r1, r2, CONFLICT, reason)
    if is_commutative(r1, r2):
        return InteractionVerdict(r1, r2, COMMUTATIVE)
    return InteractionVerdict(r1, r2, INDEPENDENT)


def fuse(r1: Refactoring, r2: Refactoring) -> Optional[Refactoring]:
    """One refactoring doing both commutative rename/move family refactorings."""
    if r1.kind not in FAMILY_KINDS or r2.kind not in FAMILY_KINDS:
        return None
    a1, a2 = aspects(r1), aspects(r2)
    name = a1.get("name", a2.get("name", r1.before.name))
    cont = a1.get("container", a2.get("container", r1.before.container))
    after = ElementId(r1.before.kind, f"{cont}.{name}" if cont else name, r1.before.params)
    kind = family_kind(r1.before.kind, name != r1.before.name, cont != r1.before.container)
    return replace(r1, kind=kind, after=after) if kind is not None else None


# ---------------------------------------------------------------------------
# list combination

def to_base(refs: Sequence[Refactoring]) -> List[Refactoring]:
    """Express every entry of a sequentially applicable list against its start program."""
    out = []
    for j, r in enumerate(refs):
        for prev in reversed(refs[:j]):
            r = rebase(r, inverse(prev))
        out.append(r)
    return out


@dataclass
class Combined:
    replay: ProcessedRefList
    conflicts: List[InteractionVerdict]
    verdicts: List[InteractionVerdict] = field(default_factory=list)
    duplicates: List[Refactoring] = field(default_factory=list)

    def __iter__(self) -> Iterator:
        return iter((self.replay, self.conflicts))

    @property
    def conflicting(self) -> List[Refactoring]:
        return [r for v in self.conflicts for r in v.pair]


def combine(base: Program, left: Sequence[Refactoring], right: Sequence[Refactoring],
            replay_semantic: bool = False) -> Combined:
    """Merge two TopDown lists into one BottomUp replay list.

    Every refactoring in a conflicting pair is withheld. With
    ``replay_semantic`` refactorings whose only conflicts are accidental
    overrides or overloads are still replayed (the conflict stays reported).
    """
    lb, rb = to_base(list(left)), to_base(list(right))
    verdicts, conflicts = [], []
    dropped_right = set()
    duplicates = []
    for j, r2 in enumerate(rb):
        for r1 in lb:
            if same(r1, r2):
                dropped_right.add(j)
                duplicates.append(r2)
    blocked: Dict[Tuple[str, int], List[str]] = {}
    # left key -> (right key, fused refactoring)
    fused: Dict[Tuple[str, int], Tuple[Tuple[str, int], Refactoring]] = {}
    mated = set()
    for i, r1 in enumerate(lb):
        for j, r2 in enumerate(rb):
            if j in dropped_right:
                continue
            v = classify(base, r1, r2)
            if v.verdict == INDEPENDENT:
                continue
            verdicts.append(v)
            if v.verdict == CONFLICT:
                conflicts.append(v)
                blocked.setdefault(("L", i), []).append(v.reason)
                blocked.setdefault(("R", j), []).append(v.reason)
            elif ("L", i) not in fused and ("R", j) not in mated:
                f = fuse(r1, r2)
                if f is not None:
                    fused[("L", i)] = (("R", j), f)
                    mated.add(("R", j))

    def allowed(key) -> bool:
        reasons = blocked.get(key)
        return not reasons or (replay_semantic and all(x in SEMANTIC for x in reasons))

    live = {k: f for k, (mate, f) in fused.items() if allowed(k) and allowed(mate)}
    absorbed = {fused[k][0] for k in live}
    keep = []
    for side, refs in (("L", lb), ("R", rb)):
        for i, r in enumerate(refs):
            key = (side, i)
            if (side == "R" and i in dropped_right) or not allowed(key) or key in absorbed:
                continue
            keep.append(live.get(key, r))
    return Combined(replay_order(keep), conflicts, verdicts, duplicates)


def _replay_rank(kind) -> int:
    return 0 if kind in RENAMES else 2 if kind == K.ExtractMethod else 1


def replay_order(refs: Sequence[Refactoring]) -> ProcessedRefList:
    """BottomUp; within a level renames go first and extracts last.

    Extracting last keeps renamed references from binding to the new method,
    and renaming first lets moves and push-downs carry the new name.
    """
    refs = sorted(refs, key=lambda r: (-r.level, _replay_rank(r.kind), r.seq))
    return ProcessedRefList(tuple(refs), BOTTOM_UP)


# ---------------------------------------------------------------------------
# rule table

ALL_KINDS = list(K)


def applicable_rules(k1: K, k2: K) -> Tuple[str, ...]:
    """Which of the four general rules can fire for a kind pair."""
    def elem(k):
        if k in (K.RenamePackage,):
            return "Package"
        if k in (K.RenameClass, K.MoveClass, K.MoveAndRenameClass):
            return "Class"
        if k == K.RenameParameter:
            return "Parameter"
        if "Field" in k.value:
            return "Field"
        return "Method"
    rules = []
    creates1 = k1 != K.InlineMethod
    creates2 = k2 != K.InlineMethod
    if elem(k1) == elem(k2):
        sample = {K.ExtractMethod: set(), K.InlineMethod: {"removed"}}
        def keys(k):
            if k in sample:
                return sample[k]
            if k in MOVE_RENAMES:
                return {"name", "container"}
            if k in MOVES:
                return {"container"}
            return {"name"}
        a1, a2 = keys(k1), keys(k2)
        if "removed" in a1 | a2 or a1 & a2:
            rules.append(SAME_SOURCE)
        if creates1 and creates2:
            rules.append(SAME_TARGET)
        if elem(k1) == "Method" and creates1 and creates2:
            rules += [OVERRIDE, OVERLOAD]
    return tuple(rules)


def rule_table() -> Dict[Tuple[str, str], Tuple[str, ...]]:
    return {(a.value, b.value): applicable_rules(a, b) for a in ALL_KINDS for b in ALL_KINDS}


def render_rule_table() -> str:
    """Markdown page listing the rule subset for every kind pair."""
    lines = ["# Refactoring interaction table", "",
             "Rules: A = same source, different target; B = different source, same target;",
             "C = accidental override; D = accidental overload.", "",
             "| left \\ right | " + " | ".join(k.value for k in ALL_KINDS) + " |",
             "|---" * (len(ALL_KINDS) + 1) + "|"]
    abbrev = {SAME_SOURCE: "A", SAME_TARGET: "B", OVERRIDE: "C", OVERLOAD: "D"}
    for a in ALL_KINDS:
        cells = ["".join(abbrev[r] for r in applicable_rules(a, b)) or "-" for b in ALL_KINDS]
        lines.append(f"| {a.value} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
