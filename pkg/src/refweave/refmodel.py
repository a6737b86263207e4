"""The refactoring vocabulary: kinds, descriptors, inverses and id mapping."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

from .lang.program import ElementId


class RefactoringKind(str, Enum):
    RenameMethod = "RenameMethod"
    MoveMethod = "MoveMethod"
    MoveAndRenameMethod = "MoveAndRenameMethod"
    RenameClass = "RenameClass"
    MoveClass = "MoveClass"
    MoveAndRenameClass = "MoveAndRenameClass"
    InlineMethod = "InlineMethod"
    ExtractMethod = "ExtractMethod"
    PullUpMethod = "PullUpMethod"
    PushDownMethod = "PushDownMethod"
    RenameField = "RenameField"
    MoveField = "MoveField"
    MoveAndRenameField = "MoveAndRenameField"
    PullUpField = "PullUpField"
    PushDownField = "PushDownField"
    RenamePackage = "RenamePackage"
    RenameParameter = "RenameParameter"

    def __str__(self):
        return self.value


K = RefactoringKind

PACKAGE, CLASS, MEMBER, PARAMETER = 0, 1, 2, 3

_LEVEL = {K.RenamePackage: PACKAGE, K.RenameClass: CLASS, K.MoveClass: CLASS,
          K.MoveAndRenameClass: CLASS, K.RenameParameter: PARAMETER}

INVERSE_KIND = {
    K.ExtractMethod: K.InlineMethod, K.InlineMethod: K.ExtractMethod,
    K.PullUpMethod: K.PushDownMethod, K.PushDownMethod: K.PullUpMethod,
    K.PullUpField: K.PushDownField, K.PushDownField: K.PullUpField,
}

RENAMES = {K.RenameMethod, K.RenameClass, K.RenameField, K.RenamePackage, K.RenameParameter}
MOVES = {K.MoveMethod, K.MoveClass, K.MoveField, K.PullUpMethod, K.PushDownMethod,
         K.PullUpField, K.PushDownField}
MOVE_RENAMES = {K.MoveAndRenameMethod, K.MoveAndRenameClass, K.MoveAndRenameField}
HIERARCHY = {K.PullUpMethod, K.PushDownMethod, K.PullUpField, K.PushDownField}

# element kind -> (rename, move, move-and-rename)
_FAMILY = {
    "Method": (K.RenameMethod, K.MoveMethod, K.MoveAndRenameMethod),
    "Field": (K.RenameField, K.MoveField, K.MoveAndRenameField),
    "Class": (K.RenameClass, K.MoveClass, K.MoveAndRenameClass),
}
FAMILY_KINDS = {k for trio in _FAMILY.values() for k in trio}


@dataclass(frozen=True)
class Refactoring:
    """One detected refactoring.

    For ExtractMethod ``before`` is the host and ``after`` the new method;
    InlineMethod is the mirror image. ``stmt_range`` is an inclusive index
    range into the host body and ``binding`` maps each parameter of the
    extracted method to the argument tokens used at the call. Pull-up and
    push-down carry the subclass set in ``classes``.
    """

    kind: RefactoringKind
    before: ElementId
    after: ElementId
    stmt_range: Optional[Tuple[int, int]] = None
    binding: Tuple[Tuple[str, Tuple[str, ...]], ...] = ()
    classes: Tuple[str, ...] = ()
    branch: str = field(default="L", compare=False)
    seq: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "kind", RefactoringKind(self.kind))

    @property
    def host(self) -> Optional[ElementId]:
        if self.kind == K.ExtractMethod:
            return self.before
        if self.kind == K.InlineMethod:
            return self.after
        return None

    @property
    def level(self) -> int:
        return granularity(self.kind)

    def __str__(self) -> str:
        return serialize(self)


def granularity(kind: RefactoringKind) -> int:
    return _LEVEL.get(RefactoringKind(kind), MEMBER)


def inverse(r: Refactoring) -> Refactoring:
    """The refactoring that undoes ``r``; an involution."""
    return replace(r, kind=INVERSE_KIND.get(r.kind, r.kind), before=r.after, after=r.before)


def serialize(r: Refactoring) -> str:
    parts = [str(r.kind), f"before={r.before}", f"after={r.after}", f"branch={r.branch}"]
    if r.stmt_range is not None:
        parts.append(f"range={r.stmt_range[0]}..{r.stmt_range[1]}")
    if r.classes:
        parts.append("classes=" + ",".join(r.classes))
    if r.binding:
        parts.append("args=" + ";".join(f"{p}:{' '.join(a)}".replace(" ", "·") for p, a in r.binding))
    return " ".join(parts)


def deserialize(line: str) -> Refactoring:
    kind, *rest = line.split(" ")
    kv = dict(part.split("=", 1) for part in rest)
    rng = None
    if "range" in kv:
        a, b = kv["range"].split("..")
        rng = (int(a), int(b))
    binding = ()
    if "args" in kv:
        binding = tuple((p, tuple(a.split("·")) if a else ())
                        for p, a in (item.split(":", 1) for item in kv["args"].split(";")))
    classes = tuple(kv["classes"].split(",")) if "classes" in kv else ()
    return Refactoring(RefactoringKind(kind), ElementId.parse(kv["before"]),
                       ElementId.parse(kv["after"]), rng, binding, classes,
                       kv.get("branch", "L"))


# ---------------------------------------------------------------------------
# element mapping

_SUBPACKAGE = re.compile(r"[a-z_]")


def _map_prefix(qn: str, old: str, new: str, package: bool = False) -> str:
    if qn == old:
        return new
    if qn.startswith(old + "."):
        rest = qn[len(old) + 1:]
        # lowercase next segment under a package prefix is a subpackage
        if package and "." in rest and _SUBPACKAGE.match(rest):
            return qn
        return new + "." + rest
    return qn


def _map_types(params, fn):
    return None if params is None else tuple(fn(t) for t in params)


def _map_qn(eid: ElementId, fn) -> ElementId:
    return ElementId(eid.kind, fn(eid.qualified_name), _map_types(eid.params, fn))


def map_id(r: Refactoring, eid: ElementId) -> ElementId:
    """Where ``eid`` ends up once ``r`` has been applied."""
    k = r.kind
    if k == K.RenamePackage:
        old, new = r.before.qualified_name, r.after.qualified_name
        return _map_qn(eid, lambda q: _map_prefix(q, old, new, package=True))
    if granularity(k) == CLASS:
        old, new = r.before.qualified_name, r.after.qualified_name
        return _map_qn(eid, lambda q: _map_prefix(q, old, new))
    if k in (K.ExtractMethod, K.InlineMethod):
        return eid
    if k == K.RenameParameter:
        return r.after if eid == r.before else eid
    member_kind = r.before.kind
    sources = {r.before}
    if k in (K.PullUpMethod, K.PullUpField):
        sources |= {r.before.with_container(c) for c in r.classes}
    if eid.kind == member_kind and eid in sources:
        return r.after
    if member_kind == "Method" and eid.kind == "Parameter" and eid.method in sources:
        return ElementId("Parameter", f"{r.after.qualified_name}.{eid.name}", r.after.params)
    return eid


def _map_class(r: Refactoring, qn: str) -> str:
    return map_id(r, ElementId("Class", qn)).qualified_name


def rebase(r: Refactoring, prev: Refactoring) -> Refactoring:
    """Express ``r`` against a program on which ``prev`` has already been applied."""
    before = map_id(prev, r.before)
    mapped_after = map_id(prev, r.after)
    k = r.kind
    if k in RENAMES:
        after = before.with_name(r.after.name)
    elif k in MOVES:
        after = ElementId(r.after.kind, f"{mapped_after.container}.{before.name}", before.params)
    elif k in MOVE_RENAMES:
        after = ElementId(r.after.kind, f"{mapped_after.container}.{r.after.name}", before.params)
    elif k == K.ExtractMethod:
        after = ElementId("Method", f"{before.container}.{r.after.name}", mapped_after.params)
    else:
        after = mapped_after
    if k == K.RenamePackage:
        after = r.after
    classes = tuple(_map_class(prev, c) for c in r.classes)
    return replace(r, before=before, after=after, classes=classes)


def family_kind(element_kind: str, renamed: bool, moved: bool) -> Optional[RefactoringKind]:
    trio = _FAMILY.get(element_kind)
    if trio is None or not (renamed or moved):
        return None
    if renamed and moved:
        return trio[2]
    return trio[0] if renamed else trio[1]


def aspects(r: Refactoring) -> Tuple[bool, bool]:
    """(changes name, changes container) for rename/move family refactorings."""
    return (r.before.name != r.after.name, r.before.container != r.after.container)
