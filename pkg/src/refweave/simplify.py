"""Fold transitive refactorings, rewrite chains, and order refactoring lists.

A processed list in TopDown order is sequentially applicable: each entry is
expressed against the program obtained by applying the entries before it.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Iterator, List, Optional, Tuple

from .refmodel import FAMILY_KINDS, MEMBER, Refactoring, family_kind, inverse, rebase

TOP_DOWN = "TopDown"
BOTTOM_UP = "BottomUp"

_DROP = object()


@dataclass(frozen=True)
class ProcessedRefList:
    refs: Tuple[Refactoring, ...] = ()
    order: str = TOP_DOWN

    def __iter__(self) -> Iterator[Refactoring]:
        return iter(self.refs)

    def __len__(self) -> int:
        return len(self.refs)

    def __getitem__(self, i):
        return self.refs[i]


def _seq(first: Refactoring, second: Refactoring) -> int:
    """Seq of a folded member record: when the member first left its place."""
    if first.level != MEMBER or first.before.container != first.after.container:
        return first.seq
    return second.seq


def compose(first: Refactoring, second: Refactoring):
    """Single refactoring equivalent to ``first`` then ``second``.

    Returns ``None`` when they do not chain and ``_DROP`` when they cancel.
    """
    if second == inverse(first):
        return _DROP
    if first.after != second.before:
        return None
    if first.kind == second.kind:
        if first.before == second.after:
            return _DROP
        return replace(first, after=second.after, seq=_seq(first, second))
    if first.kind in FAMILY_KINDS and second.kind in FAMILY_KINDS and \
            first.before.kind == second.after.kind:
        b, a = first.before, second.after
        kind = family_kind(b.kind, b.name != a.name, b.container != a.container)
        if kind is None:
            return _DROP
        return replace(first, kind=kind, after=a, seq=_seq(first, second))
    return None


def simplify(raw: Iterable[Refactoring]) -> ProcessedRefList:
    """Process seq-ordered detector output into a TopDown list."""
    stored: List[Refactoring] = []
    for r in raw:
        # finer refactorings already stored will be replayed after r
        stored = [rebase(s, r) if s.level > r.level else s for s in stored]
        for i in range(len(stored) - 1, -1, -1):
            folded = compose(stored[i], r)
            if folded is None:
                continue
            if folded is _DROP:
                del stored[i]
            else:
                stored[i] = folded
            if folded is _DROP or folded.seq < r.seq:
                # same-level records now replayed after r's effect
                stored[i:] = [rebase(s, r) if s.level == r.level and s is not folded else s
                              for s in stored[i:]]
            break
        else:
            stored.append(r)
    return order_topdown(stored)


def order_topdown(refs: Iterable[Refactoring]) -> ProcessedRefList:
    return ProcessedRefList(tuple(sorted(refs, key=lambda r: (r.level, r.seq))), TOP_DOWN)


def order_bottomup(refs: Iterable[Refactoring]) -> ProcessedRefList:
    return ProcessedRefList(tuple(sorted(refs, key=lambda r: (-r.level, r.seq))), BOTTOM_UP)


def first_fold(refs) -> Optional[Tuple[int, int]]:
    """Indices of a pair that would still fold, if any (an invariant check)."""
    refs = list(refs)
    for i, a in enumerate(refs):
        for j in range(i + 1, len(refs)):
            if a.kind == refs[j].kind and a.after == refs[j].before:
                return i, j
    return None
