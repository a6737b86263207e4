"""Refactoring detection between two program versions.

Elements are matched by identity first (modulo already matched
containers), then by token-multiset Jaccard similarity. The output is
sequentially applicable: sorted by (granularity, qualified name), each
record is expressed against the program produced by the records before it.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

from .lang.ast import Block, ClassDecl, FieldDecl, MethodDecl
from .lang.program import ElementId, Index, Program, method_id
from .lang.tokens import iter_stmts, split_dotted
from .refmodel import CLASS, RefactoringKind as K, Refactoring, family_kind, map_id
from .refops import PULL_UP as PULL_UP_KINDS, call_of, map_lines, substitute

THETA = 0.5


def jaccard(a: Counter, b: Counter) -> float:
    union = sum((a | b).values())
    return 1.0 if union == 0 else sum((a & b).values()) / union


def _body_tokens(stmts) -> List[str]:
    """Statement tokens with each dotted chain reduced to its last name.

    Qualifiers only say where a name is found, and moves change them.
    """
    out: List[str] = []
    for _, s in iter_stmts(stmts):
        if isinstance(s, Block):
            continue
        for tok in s.tokens:
            if tok == ".":
                if out:
                    out.pop()
                continue
            out.append(tok)
    return out


def member_bag(decl) -> Counter:
    if isinstance(decl, FieldDecl):
        return Counter(split_dotted(decl.type) + tuple(decl.init or ()))
    return Counter(list(split_dotted(decl.return_type)) +
                   [t for p in decl.params for t in split_dotted(p.type)] + _body_tokens(decl.body))


def class_bag(decl: ClassDecl) -> Counter:
    bag: Counter = Counter()
    for m in decl.members:
        if isinstance(m, ClassDecl):
            bag[m.name] += 1
            bag += class_bag(m)
        else:
            bag[m.name] += 1
            bag += member_bag(m)
    return bag


class _Detector:
    def __init__(self, v1: Program, v2: Program, theta: float):
        self.i1: Index = v1.index
        self.i2: Index = v2.index
        self.theta = theta
        self.pmap: Dict[str, str] = {}
        self.cmap: Dict[str, str] = {}
        self.mmap: Dict[ElementId, ElementId] = {}
        self.found: List[Refactoring] = []
        self._bags: Dict[Tuple[int, object], Counter] = {}
        self._names: Optional[Dict[str, str]] = None

    # similarity -------------------------------------------------------------
    def class_sim(self, q1: str, q2: str) -> float:
        return jaccard(self._bag(1, q1, lambda: class_bag(self.i1.classes[q1].decl)),
                       self._bag(2, q2, lambda: class_bag(self.i2.classes[q2].decl)))

    def member_sim(self, m1: ElementId, m2: ElementId) -> float:
        """Only valid once classes are matched: v1 type names are read through ``cmap``."""
        return jaccard(self._bag(1, m1, lambda: self._renamed(member_bag(self._decl(self.i1, m1)))),
                       self._bag(2, m2, lambda: member_bag(self._decl(self.i2, m2))))

    def _renamed(self, bag: Counter) -> Counter:
        if self._names is None:
            pairs = {}
            for q1, q2 in self.cmap.items():
                a, b = q1.rsplit(".", 1)[-1], q2.rsplit(".", 1)[-1]
                pairs.setdefault(a, set()).add(b)
            self._names = {a: next(iter(b)) for a, b in pairs.items() if len(b) == 1 and a not in b}
        out: Counter = Counter()
        for tok, n in bag.items():
            out[self._names.get(tok, tok)] += n
        return out

    def _bag(self, side, key, make):
        if (side, key) not in self._bags:
            self._bags[side, key] = make()
        return self._bags[side, key]

    @staticmethod
    def _decl(idx: Index, eid: ElementId):
        return (idx.methods if eid.kind == "Method" else idx.fields)[eid].decl

    # mapping helpers -----------------------------------------------------------
    def map_type(self, t: str) -> str:
        return self.cmap.get(t, t)

    def map_container(self, q1: str) -> str:
        info = self.i1.classes[q1]
        if info.outer is not None:
            return self.cmap.get(info.outer, info.outer)
        return self.pmap.get(info.package, info.package)

    def expected_member(self, m1: ElementId) -> Optional[ElementId]:
        c2 = self.cmap.get(m1.container)
        if c2 is None:
            return None
        if m1.kind == "Method":
            return method_id(c2, m1.name, [self.map_type(t) for t in m1.params])
        return ElementId("Field", f"{c2}.{m1.name}")

    def same_sig(self, m1: ElementId, m2: ElementId) -> bool:
        return m1.kind != "Method" or tuple(self.map_type(t) for t in m1.params) == m2.params

    # rules -------------------------------------------------------------------------
    def packages(self):
        gone = sorted(p for p in self.i1.packages if p not in self.i2.packages)
        new = sorted(p for p in self.i2.packages if p not in self.i1.packages)
        for p1 in gone:
            classes = [q for q, info in self.i1.classes.items() if info.package == p1]
            for p2 in new:
                pairs = [(q, p2 + q[len(p1):]) for q in classes]
                if all(q2 in self.i2.classes and self.class_sim(q, q2) >= self.theta for q, q2 in pairs):
                    self.found.append(Refactoring(K.RenamePackage, ElementId("Package", p1),
                                                  ElementId("Package", p2)))
                    self.pmap[p1] = p2
                    self.cmap.update(pairs)
                    new.remove(p2)
                    break

    def _implied_classes(self):
        used = set(self.cmap.values())
        for q1 in sorted(self.i1.classes, key=lambda q: (q.count("."), q)):
            if q1 in self.cmap:
                continue
            q2 = f"{self.map_container(q1)}.{q1.rsplit('.', 1)[-1]}".lstrip(".")
            if q2 in self.i2.classes and q2 not in used:
                self.cmap[q1] = q2
                used.add(q2)

    def classes(self):
        self._implied_classes()
        used = set(self.cmap.values())
        u1 = [q for q in self.i1.classes if q not in self.cmap]
        u2 = [q for q in self.i2.classes if q not in used]
        pairs = sorted(((-s, q1, q2) for q1 in u1 for q2 in u2
                        for s in [self.class_sim(q1, q2)] if s >= self.theta))
        matched = []
        for _, q1, q2 in pairs:
            if q1 in self.cmap or q2 in used:
                continue
            self.cmap[q1] = q2
            used.add(q2)
            matched.append((q1, q2))
        self._implied_classes()
        for q1, q2 in matched:
            c1 = self.map_container(q1)
            c2 = q2.rsplit(".", 1)[0] if "." in q2 else ""
            kind = family_kind("Class", q1.rsplit(".", 1)[-1] != q2.rsplit(".", 1)[-1], c1 != c2)
            if kind is not None:
                self.found.append(Refactoring(kind, ElementId("Class", q1), ElementId("Class", q2)))

    def _members(self, idx: Index) -> List[ElementId]:
        return sorted(list(idx.methods) + list(idx.fields))

    def members_identity(self):
        used = set()
        for m1 in self._members(self.i1):
            m2 = self.expected_member(m1)
            if m2 is not None and self.i2.exists(m2) and m2 not in used:
                self.mmap[m1] = m2
                used.add(m2)
        self.u1 = [m for m in self._members(self.i1) if m not in self.mmap]
        self.u2 = [m for m in self._members(self.i2) if m not in used]

    def hierarchy(self):
        i2 = self.i2
        for m2 in list(self.u2):
            if m2 not in self.u2:
                continue
            srcs = [m1 for m1 in self.u1 if m1.kind == m2.kind and m1.name == m2.name
                    and self.same_sig(m1, m2) and m1.container in self.cmap
                    and i2.superclass(self.cmap[m1.container]) == m2.container
                    and self.member_sim(m1, m2) >= self.theta]
            if srcs:
                kind = K.PullUpMethod if m2.kind == "Method" else K.PullUpField
                self.found.append(Refactoring(kind, srcs[0], m2,
                                              classes=tuple(sorted(m.container for m in srcs))))
                self._consume(srcs, [m2])
        for m1 in list(self.u1):
            if m1 not in self.u1:
                continue
            sup = self.cmap.get(m1.container)
            tgts = [m2 for m2 in self.u2 if m2.kind == m1.kind and m2.name == m1.name
                    and self.same_sig(m1, m2) and sup is not None
                    and i2.superclass(m2.container) == sup
                    and self.member_sim(m1, m2) >= self.theta]
            if tgts:
                kind = K.PushDownMethod if m1.kind == "Method" else K.PushDownField
                self.found.append(Refactoring(kind, m1, tgts[0],
                                              classes=tuple(sorted(m.container for m in tgts))))
                self._consume([m1], tgts)

    def _consume(self, ones, twos):
        self.u1 = [m for m in self.u1 if m not in ones]
        self.u2 = [m for m in self.u2 if m not in twos]

    def moves(self):
        cands = []
        for m1 in self.u1:
            for m2 in self.u2:
                if m1.kind != m2.kind or not self.same_sig(m1, m2):
                    continue
                kind = family_kind(m1.kind, m1.name != m2.name,
                                   self.cmap.get(m1.container, m1.container) != m2.container)
                if kind is None:
                    continue
                s = self.member_sim(m1, m2)
                if s >= self.theta:
                    cands.append((-s, str(m1), str(m2), m1, m2, kind))
        cands.sort(key=lambda c: c[:3])
        for _, _, _, m1, m2, kind in cands:
            if m1 in self.u1 and m2 in self.u2:
                self.found.append(Refactoring(kind, m1, m2))
                self.mmap[m1] = m2
                self._consume([m1], [m2])

    def extracts(self):
        for h1, h2 in sorted(self.mmap.items()):
            if h1.kind != "Method":
                continue
            b1 = self.i1.methods[h1].decl.body
            b2 = self.i2.methods[h2].decl.body
            if b1 == b2:
                continue
            # a one-statement extract or inline keeps the host length
            if len(b2) <= len(b1):
                self._extract(h1, h2, b1, b2)
            if len(b2) >= len(b1):
                self._inline(h1, h2, b1, b2)

    def _extract(self, h1, h2, b1, b2):
        n = len(b1) - len(b2) + 1
        i = 0
        while i < len(b2) - 1 and b1[i] == b2[i]:
            i += 1
        if b1[i + n:] != b2[i + 1:]:
            return
        stmt = b2[i]
        name = getattr(stmt, "tokens", ("",))[0] if not isinstance(stmt, Block) else ""
        args = call_of(stmt, name)
        if args is None:
            return
        x = self.i2.bare_method(h2.container, name, len(args))
        if x is None or x not in self.u2:
            return
        decl: MethodDecl = self.i2.methods[x].decl
        mapping = {(p.name,): a for p, a in zip(decl.params, args)}
        if map_lines(decl.body, lambda t: substitute(t, mapping)) != tuple(b1[i:i + n]):
            return
        binding = tuple((p.name, tuple(a)) for p, a in zip(decl.params, args))
        self.found.append(Refactoring(K.ExtractMethod, h1, x, (i, i + n - 1), binding))
        self._consume([], [x])

    def _inline(self, h1, h2, b1, b2):
        for i, stmt in enumerate(b1):
            if isinstance(stmt, Block) or not stmt.tokens:
                continue
            name = stmt.tokens[0]
            args = call_of(stmt, name)
            if args is None:
                continue
            y = self.i1.bare_method(h1.container, name, len(args))
            if y is None or y not in self.u1:
                continue
            decl: MethodDecl = self.i1.methods[y].decl
            n = len(decl.body)
            if n == 0 or len(b2) != len(b1) - 1 + n:
                continue
            if b1[:i] != b2[:i] or b1[i + 1:] != b2[i + n:]:
                continue
            mapping = {(p.name,): a for p, a in zip(decl.params, args)}
            if map_lines(decl.body, lambda t: substitute(t, mapping)) != tuple(b2[i:i + n]):
                continue
            binding = tuple((p.name, tuple(a)) for p, a in zip(decl.params, args))
            self.found.append(Refactoring(K.InlineMethod, y, h1, (i, i + n - 1), binding))
            self._consume([y], [])
            return

    def params(self):
        for m1, m2 in sorted(self.mmap.items()):
            if m1.kind != "Method":
                continue
            d1, d2 = self.i1.methods[m1].decl, self.i2.methods[m2].decl
            if len(d1.params) != len(d2.params):
                continue
            renames = [(p.name, q.name) for p, q in zip(d1.params, d2.params) if p.name != q.name]
            if not renames:
                continue
            mapping = {(a,): (b,) for a, b in renames}
            if map_lines(d1.body, lambda t: substitute(t, mapping)) != d2.body:
                continue
            for a, b in renames:
                before = ElementId("Parameter", f"{m1.qualified_name}.{a}", m1.params)
                self.found.append(Refactoring(K.RenameParameter, before, before.with_name(b)))

    # output -------------------------------------------------------------------
    def sequence(self) -> List[Refactoring]:
        order = sorted(self.found, key=lambda r: (r.level, r.before.qualified_name, str(r.before)))
        back = {q2: q1 for q1, q2 in self.cmap.items()}
        out: List[Refactoring] = []
        for r in order:
            before = r.before
            for prev in out:
                before = map_id(prev, before)
            classes = r.classes
            after = r.after
            if r.kind in PULL_UP_KINDS:
                classes = tuple(sorted(self._forward(out, "Class", c) for c in classes))
            if r.level == CLASS:
                cont = after.container
                if cont in back:
                    cont = self._forward(out, "Class", back[cont])
                after = ElementId("Class", f"{cont}.{after.name}" if cont else after.name)
            elif r.kind == K.RenameParameter:
                after = before.with_name(r.after.name)
            elif r.kind == K.InlineMethod:
                after = ElementId("Method", self._forward(out, "Method", r.after).qualified_name,
                                  self._forward(out, "Method", r.after).params)
            out.append(replace(r, before=before, after=after, classes=classes))
        return out

    @staticmethod
    def _forward(done, kind, x):
        eid = x if isinstance(x, ElementId) else ElementId(kind, x)
        for prev in done:
            eid = map_id(prev, eid)
        return eid if isinstance(x, ElementId) else eid.qualified_name

    def run(self) -> List[Refactoring]:
        self.packages()
        self.classes()
        self.members_identity()
        self.hierarchy()
        self.moves()
        self.extracts()
        self.params()
        return self.sequence()


def detect_between(v1: Program, v2: Program, theta: float = THETA) -> List[Refactoring]:
    """Refactorings that turn ``v1`` into ``v2``."""
    return _Detector(v1, v2, theta).run()


def detect_along(commits: Sequence[Program], theta: float = THETA) -> List[Refactoring]:
    """Raw refactorings along consecutive commit pairs, seq-numbered in order."""
    if len(commits) < 2:
        raise ValueError("need at least two versions")
    out: List[Refactoring] = []
    for a, b in zip(commits, commits[1:]):
        for r in detect_between(a, b, theta):
            out.append(replace(r, seq=len(out)))
    return out
