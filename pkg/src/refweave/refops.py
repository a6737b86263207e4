"""Apply, invert and replay refactorings on Programs, rewriting references."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from .lang.ast import CompilationUnit, Line, MethodDecl, Param, expected_path
from .lang.printer import print_unit_with_lines
from .lang.program import ElementId, Index, Program
from .lang.tokens import Block, apply_edits, iter_classes, split_dotted, token_sites
from .refmodel import (CLASS, HIERARCHY, RefactoringKind as K, Refactoring, granularity,
                       inverse, map_id, rebase)

log = logging.getLogger(__name__)

CLASS_MOVES = {K.MoveClass, K.MoveAndRenameClass}
MEMBER_MOVES = {K.MoveMethod, K.MoveField, K.MoveAndRenameMethod, K.MoveAndRenameField} | HIERARCHY
PUSH_DOWN = {K.PushDownMethod, K.PushDownField}
PULL_UP = {K.PullUpMethod, K.PullUpField}


class ElementMissing(Exception):
    def __init__(self, r: Refactoring, element: Optional[ElementId] = None, why: str = ""):
        self.refactoring = r
        self.element = element
        super().__init__(f"{element or r.before} missing" + (f": {why}" if why else ""))


class Collision(Exception):
    def __init__(self, target: ElementId):
        self.target = target
        super().__init__(f"{target} already exists")


# ---------------------------------------------------------------------------
# structural helpers

def class_names(idx: Index, qn: str) -> Tuple[str, ...]:
    """Class name path of ``qn`` inside its file."""
    pkg = idx.classes[qn].package
    return tuple((qn[len(pkg) + 1:] if pkg else qn).split("."))


def locate(unit: CompilationUnit, names: Sequence[str]) -> Optional[Tuple[int, ...]]:
    for cpath, ns, _ in iter_classes(unit):
        if ns == tuple(names):
            return cpath
    return None


def update_class(unit: CompilationUnit, cpath, fn) -> CompilationUnit:
    """Replace the class at ``cpath`` with ``fn(cls)``; ``None`` removes it."""
    def rebuild(items, path):
        items = list(items)
        i = path[0]
        if len(path) == 1:
            new = fn(items[i])
        else:
            new = replace(items[i], members=rebuild(items[i].members, path[1:]))
        if new is None:
            del items[i]
        else:
            items[i] = new
        return tuple(items)
    return replace(unit, classes=rebuild(unit.classes, cpath))


def _drop_member(index):
    return lambda c: replace(c, members=c.members[:index] + c.members[index + 1:])


def _append_member(decl):
    return lambda c: replace(c, members=c.members + (decl,))


def _renamed(decl, name):
    return decl if decl.name == name else replace(decl, name=name)


@dataclass
class _Files:
    """Mutable file set keyed by original path while a refactoring is assembled."""

    units: Dict[str, CompilationUnit]
    touched: set = field(default_factory=set)

    def update(self, path, names, fn):
        cpath = locate(self.units[path], names)
        self.units[path] = update_class(self.units[path], cpath, fn)
        self.touched.add(path)

    def get(self, path, names):
        unit = self.units[path]
        cls = None
        for cp, ns, c in iter_classes(unit):
            if ns == tuple(names):
                cls = c
        return cls


# ---------------------------------------------------------------------------
# rename / move engine

class _Transform:
    def __init__(self, program: Program, r: Refactoring):
        self.program = program
        self.idx = program.index
        self.r = r
        self.path_map: Dict[str, Optional[str]] = {}
        self._check()

    # preconditions -------------------------------------------------------
    def sources(self) -> List[ElementId]:
        r = self.r
        if r.kind in PULL_UP:
            extra = [r.before.with_container(c) for c in r.classes]
            return sorted({e for e in [r.before] + extra if self.idx.exists(e)})
        return [r.before]

    def targets(self) -> List[ElementId]:
        r = self.r
        if r.kind in PUSH_DOWN:
            return [r.after.with_container(c) for c in (r.classes or (r.after.container,))]
        return [r.after]

    def _check(self):
        r, idx = self.r, self.idx
        if not idx.exists(r.before):
            raise ElementMissing(r)
        if r.kind == K.RenamePackage:
            if idx.exists(r.after):
                raise Collision(r.after)
            return
        if granularity(r.kind) == CLASS:
            if idx.exists(r.after):
                raise Collision(r.after)
            target = r.after.container
            b = r.before.qualified_name
            if target == b or target.startswith(b + "."):
                raise ElementMissing(r, r.after, "class moved into itself")
            # a container that is not a class is taken as a (possibly new) package
            return
        if r.kind == K.RenameParameter:
            if idx.exists(r.after):
                raise Collision(r.after)
            return
        for t in self.targets():
            if t.container not in idx.classes:
                raise ElementMissing(r, ElementId("Class", t.container))
            if idx.exists(t) and t not in self.sources():
                raise Collision(t)
            if t.kind == "Method" and t not in self.sources():
                # same name and arity would make call sites ambiguous
                same = [m for m in idx.class_methods[t.container]
                        if m.decl.name == t.name and len(m.id.params) == len(t.params)
                        and m.id not in self.sources()]
                if same:
                    raise Collision(t)

    # id mapping ------------------------------------------------------------
    def emap(self, eid: ElementId, scope_cls: Optional[str] = None) -> ElementId:
        r = self.r
        if r.kind in PUSH_DOWN and scope_cls is not None:
            member = eid.method if eid.kind == "Parameter" else eid
            if member == r.before:
                for c in r.classes:
                    if scope_cls == c or self.idx.is_subclass(scope_cls, c) or scope_cls.startswith(c + "."):
                        moved = r.after.with_container(c)
                        if eid.kind == "Parameter":
                            return ElementId("Parameter", f"{moved.qualified_name}.{eid.name}", moved.params)
                        return moved
        return map_id(r, eid)

    def map_class(self, qn: str) -> str:
        return map_id(self.r, ElementId("Class", qn)).qualified_name

    def ctx_moved(self, scope) -> bool:
        """True when the code at ``scope`` ends up in a different lexical environment."""
        r = self.r
        if r.kind in CLASS_MOVES and r.before.container != r.after.container:
            b = r.before.qualified_name
            return scope.cls is not None and (scope.cls == b or scope.cls.startswith(b + "."))
        if r.kind in MEMBER_MOVES:
            return scope.member is not None and scope.member in self.sources()
        return False

    def new_ctx(self, ref, world: Index):
        sc = ref.scope
        if sc.cls is None:
            return None, self.path_map.get(ref.path)
        if sc.member is not None and sc.member.kind in ("Method", "Field"):
            ncls = self.emap(sc.member, sc.cls).container
            if self.r.kind in PUSH_DOWN and sc.member == self.r.before:
                ncls = self.targets()[0].container
        else:
            ncls = self.map_class(sc.cls)
        info = world.classes.get(ncls)
        npath = info.path if info else self.path_map.get(ref.path)
        if ref.loc[1:2] == ("super",):
            ncls = info.outer if info else None
        return ncls, npath

    # restructuring -----------------------------------------------------------
    def restructure(self, units: Dict[str, CompilationUnit]) -> Dict[str, CompilationUnit]:
        r, idx = self.r, self.idx
        files = _Files(dict(units))
        k = r.kind
        if k == K.RenamePackage:
            for p in idx.packages[r.before.qualified_name]:
                files.units[p] = replace(files.units[p], package=r.after.qualified_name)
                files.touched.add(p)
        elif granularity(k) == CLASS:
            self._restructure_class(files)
        elif k == K.RenameParameter:
            info = idx.params[r.before]
            names = class_names(idx, info.owner)
            mi = info.mpath[-1]

            def ren(c):
                m = c.members[mi]
                ps = tuple(Param(p.type, r.after.name) if p.name == r.before.name else p for p in m.params)
                return replace(c, members=c.members[:mi] + (replace(m, params=ps),) + c.members[mi + 1:])
            files.update(info.path, names, ren)
        else:
            self._restructure_member(files)
        out: Dict[str, CompilationUnit] = {}
        for path, unit in files.units.items():
            if unit is None:
                self.path_map[path] = None
                continue
            new = expected_path(unit) if path in files.touched else path
            if new in out:
                raise Collision(ElementId("Class", new))
            self.path_map[path] = new
            out[new] = unit
        return out

    def _restructure_class(self, files: _Files):
        r, idx = self.r, self.idx
        bq = r.before.qualified_name
        info = idx.classes[bq]
        names = class_names(idx, bq)
        decl = _renamed(files.get(info.path, names), r.after.name)
        if r.before.container == r.after.container:
            files.update(info.path, names, lambda c: decl)
            return
        target = r.after.container
        src_unit = files.units[info.path]
        if target in idx.classes:
            tinfo = idx.classes[target]
            if info.outer is None and len(src_unit.classes) == 1:
                files.units[info.path] = None
            else:
                files.update(info.path, names, lambda c: None)
            files.update(tinfo.path, class_names(idx, target), _append_member(decl))
            return
        if info.outer is None and len(src_unit.classes) == 1:
            files.units[info.path] = replace(src_unit, package=target, classes=(decl,))
            files.touched.add(info.path)
            return
        files.update(info.path, names, lambda c: None)
        if src_unit.package == target:
            unit = files.units[info.path]
            files.units[info.path] = replace(unit, classes=unit.classes + (decl,))
            return
        new_unit = CompilationUnit(target, src_unit.imports, (decl,), (), ())
        key = "+" + expected_path(new_unit)
        files.units[key] = new_unit
        files.touched.add(key)

    def _restructure_member(self, files: _Files):
        r, idx = self.r, self.idx
        table = idx.methods if r.before.kind == "Method" else idx.fields
        first = table[r.before]
        decl = files.get(first.path, class_names(idx, first.owner)).members[first.mpath[-1]]
        srcs = self.sources()
        tgts = self.targets()
        if len(srcs) == 1 and len(tgts) == 1 and srcs[0].container == tgts[0].container:
            mi = first.mpath[-1]
            new = _renamed(decl, tgts[0].name)
            files.update(first.path, class_names(idx, first.owner),
                         lambda c: replace(c, members=c.members[:mi] + (new,) + c.members[mi + 1:]))
            return
        for s in srcs:
            info = table[s]
            files.update(info.path, class_names(idx, info.owner), _drop_member(info.mpath[-1]))
        for t in tgts:
            tinfo = idx.classes[t.container]
            files.update(tinfo.path, class_names(idx, t.container), _append_member(_renamed(decl, t.name)))

    # reference rewriting -----------------------------------------------------
    def world(self, units) -> Index:
        return Program(tuple(_source_files(self.restructure(units)))).index

    def run(self) -> Program:
        idx = self.idx
        units = {p: f.unit for p, f in idx.files.items()}
        refs = idx.refs
        spans: Dict[Tuple[str, tuple], list] = {}

        def add(ref, start, end, toks, prio):
            spans.setdefault((ref.path, ref.loc), []).append((start, end, tuple(toks), prio))

        # imports name the mapped class in full
        for ref in refs:
            if ref.where == "import":
                t2 = self.emap(ref.target)
                if t2 != ref.target:
                    add(ref, ref.start, ref.end, split_dotted(t2.qualified_name), 0)
        w1 = self.world(_splice(units, spans))
        for ref in refs:
            if ref.kind != "class" or ref.where == "import":
                continue
            t2 = self.emap(ref.target)
            ncls, npath = self.new_ctx(ref, w1)
            old = _ref_tokens(units, ref)
            if t2 == ref.target and not self.ctx_moved(ref.scope) and \
                    w1.resolve_class(old[::2], npath, ncls) == t2.qualified_name:
                continue
            new = render_class(w1, t2.qualified_name, npath, ncls)
            if new != old:
                add(ref, ref.start, ref.end, new, 0)
        w2 = self.world(_splice(units, spans))
        for ref in refs:
            if ref.kind == "param":
                t2 = self.emap(ref.target, ref.scope.cls)
                if t2.name != ref.target.name:
                    add(ref, ref.start, ref.end, (t2.name,), 1)
                continue
            if ref.kind not in ("method", "field"):
                continue
            t2 = self.emap(ref.target, ref.scope.cls)
            moved = self.ctx_moved(ref.scope)
            if t2 == ref.target and not moved:
                continue
            if ref.qual in ("this", "var", "other"):
                if t2.name != ref.target.name:
                    add(ref, ref.end, ref.end, (t2.name,), 1)
                continue
            if ref.qual == "bare" and not moved and t2.name == ref.target.name and \
                    self.r.kind not in MEMBER_MOVES and granularity(self.r.kind) != CLASS:
                continue
            ncls, npath = self.new_ctx(ref, w2)
            if _reachable(w2, ncls, t2, ref.arity):
                new = (t2.name,)
            else:
                new = render_class(w2, t2.container, npath, ncls) + (".", t2.name)
            if new != _ref_tokens(units, ref):
                add(ref, ref.start, ref.end, new, 1)
        final = self.restructure(_splice(units, spans))
        return Program(tuple(_source_files(final)))


def _source_files(units: Dict[str, CompilationUnit]):
    from .lang.ast import SourceFile
    return [SourceFile(p, u) for p, u in units.items()]


def _ref_tokens(units, ref) -> Tuple[str, ...]:
    toks = _site_tokens(units[ref.path], ref.loc)
    return tuple(toks[ref.start:ref.end + 1])


def _site_tokens(unit, loc):
    for key, toks in token_sites(unit):
        if key == loc:
            return toks
    raise KeyError(loc)


def _splice(units, spans) -> Dict[str, CompilationUnit]:
    """Apply span replacements; member spans swallow class spans nested inside them."""
    by_path: Dict[str, dict] = {}
    for (path, loc), items in spans.items():
        items = sorted(set(items), key=lambda s: (s[0], -s[3], -s[1]))
        kept = []
        for s in items:
            if any(k[3] > s[3] and k[0] <= s[0] and s[1] <= k[1] for k in items):
                continue
            kept.append(s)
        toks = list(_site_tokens(units[path], loc))
        for start, end, new, _ in sorted(kept, key=lambda s: -s[0]):
            toks[start:end + 1] = new
        by_path.setdefault(path, {})[loc] = tuple(toks)
    return {p: apply_edits(u, by_path[p]) if p in by_path else u for p, u in units.items()}


def render_class(world: Index, qn: str, path: Optional[str], cls: Optional[str]) -> Tuple[str, ...]:
    """Shortest dotted suffix of ``qn`` that resolves to it from the given context."""
    parts = qn.split(".")
    for k in range(1, len(parts) + 1):
        chain = parts[-k:]
        if world.resolve_class(chain, path, cls) == qn:
            return split_dotted(".".join(chain))
    log.warning("AmbiguousReference: %s not resolvable from %s", qn, path)
    return split_dotted(qn)


def _reachable(world: Index, cls: Optional[str], target: ElementId, arity: int) -> bool:
    if cls is None:
        return False
    if target.kind == "Method":
        found = world.bare_method(cls, target.name, arity)
    else:
        found = world.bare_field(cls, target.name)
    return found is not None and found.qualified_name == target.qualified_name


# ---------------------------------------------------------------------------
# extract / inline

def map_lines(stmts, fn):
    out = []
    for s in stmts:
        if isinstance(s, Block):
            out.append(replace(s, stmts=map_lines(s.stmts, fn)))
        else:
            block = replace(s.block, stmts=map_lines(s.block.stmts, fn)) if s.block else None
            out.append(replace(s, tokens=fn(s.tokens), block=block))
    return tuple(out)


def substitute(tokens, mapping: Dict[Tuple[str, ...], Tuple[str, ...]]) -> Tuple[str, ...]:
    """Replace token runs (longest first) that are not member selections."""
    keys = sorted((k for k in mapping if k and mapping[k] != k), key=len, reverse=True)
    out, i = [], 0
    while i < len(tokens):
        if i == 0 or tokens[i - 1] != ".":
            for k in keys:
                if tuple(tokens[i:i + len(k)]) == k:
                    out.extend(mapping[k])
                    i += len(k)
                    break
            else:
                out.append(tokens[i])
                i += 1
            continue
        out.append(tokens[i])
        i += 1
    return tuple(out)


def split_args(tokens) -> List[Tuple[str, ...]]:
    """Top-level comma separated arguments of a call ``name ( ... )``."""
    inner = tokens[2:-1]
    if not inner:
        return []
    args, cur, depth = [], [], 0
    for t in inner:
        if t in ("(", "["):
            depth += 1
        elif t in (")", "]"):
            depth -= 1
        if t == "," and depth == 0:
            args.append(tuple(cur))
            cur = []
        else:
            cur.append(t)
    args.append(tuple(cur))
    return args


def call_of(stmt, name: str) -> Optional[List[Tuple[str, ...]]]:
    """Arguments if ``stmt`` is exactly ``name(args);``."""
    if not isinstance(stmt, Line) or stmt.block is not None:
        return None
    t = stmt.tokens
    if len(t) < 3 or t[0] != name or t[1] != "(" or t[-1] != ")":
        return None
    depth = 0
    for i, tok in enumerate(t[1:], 1):
        depth += tok in ("(", "[")
        depth -= tok in (")", "]")
        if depth == 0 and i != len(t) - 1:
            return None
    return split_args(t)


def _replace_member(c, mi, new):
    return replace(c, members=c.members[:mi] + (new,) + c.members[mi + 1:])


def _files_of(program: Program) -> Dict[str, CompilationUnit]:
    return {f.path: f.unit for f in program.files}


def _extract(program: Program, r: Refactoring) -> Program:
    idx = program.index
    info = idx.methods.get(r.before)
    if info is None:
        raise ElementMissing(r)
    if idx.exists(r.after):
        raise Collision(r.after)
    if r.after.container not in idx.classes:
        raise ElementMissing(r, ElementId("Class", r.after.container))
    host: MethodDecl = info.decl
    a, b = r.stmt_range or (-1, -1)
    if not 0 <= a <= b < len(host.body):
        raise ElementMissing(r, r.before, f"range {a}..{b} outside host body")
    if len(r.binding) != len(r.after.params):
        raise ElementMissing(r, r.after, "binding does not match signature")
    reverse = {tuple(arg): (p,) for p, arg in r.binding}
    body = map_lines(host.body[a:b + 1], lambda t: substitute(t, reverse))
    tinfo = idx.classes[r.after.container]
    params = tuple(
        Param("".join(render_class(idx, t, tinfo.path, tinfo.qn)) if t in idx.classes else t, p)
        for (p, _), t in zip(r.binding, r.after.params))
    args: List[str] = [r.after.name, "("]
    for i, (_, arg) in enumerate(r.binding):
        if i:
            args.append(",")
        args.extend(arg)
    args.append(")")
    call = Line(tuple(args), None, (), 0, 0)
    new_host = replace(host, body=host.body[:a] + (call,) + host.body[b + 1:])
    created = MethodDecl("void", r.after.name, params, body, host.static, (), (), 0)
    files = _Files(_files_of(program))
    mi = info.mpath[-1]
    files.update(info.path, class_names(idx, info.owner), lambda c: _replace_member(c, mi, new_host))
    files.update(tinfo.path, class_names(idx, tinfo.qn), _append_member(created))
    return Program(tuple(_source_files(files.units)))


def find_call(host: MethodDecl, name: str, hint: Optional[int]) -> Optional[int]:
    if hint is not None and 0 <= hint < len(host.body) and call_of(host.body[hint], name) is not None:
        return hint
    hits = [i for i, s in enumerate(host.body) if call_of(s, name) is not None]
    return hits[0] if len(hits) == 1 else None


def _inline(program: Program, r: Refactoring) -> Program:
    """Inline ``r.before`` at its call in ``r.after``; returns the new program."""
    return _inline_at(program, r)[0]


def _inline_at(program: Program, r: Refactoring):
    idx = program.index
    minfo = idx.methods.get(r.before)
    hinfo = idx.methods.get(r.after)
    if minfo is None or hinfo is None:
        raise ElementMissing(r, r.before if minfo is None else r.after)
    host, callee = hinfo.decl, minfo.decl
    at = find_call(host, callee.name, r.stmt_range[0] if r.stmt_range else None)
    if at is None:
        raise ElementMissing(r, r.before, "no call site in host")
    args = call_of(host.body[at], callee.name)
    if len(args) != len(callee.params):
        raise ElementMissing(r, r.before, "argument count mismatch")
    mapping = {(p.name,): a for p, a in zip(callee.params, args)}
    spliced = map_lines(callee.body, lambda t: substitute(t, mapping))
    lead = host.body[at].comments
    if lead and spliced:
        spliced = (replace(spliced[0], comments=lead + spliced[0].comments),) + spliced[1:]
    new_host = replace(host, body=host.body[:at] + spliced + host.body[at + 1:])
    call_loc = (hinfo.mpath, "body", (at,))
    others = [x for x in idx.refs if x.kind == "method" and x.target == r.before
              and not (x.path == hinfo.path and x.loc == call_loc)]
    files = _Files(_files_of(program))
    hmi, mmi = hinfo.mpath[-1], minfo.mpath[-1]
    same_class = hinfo.owner == minfo.owner
    if same_class:
        def edit(c):
            members = list(c.members)
            members[hmi] = new_host
            if not others:
                del members[mmi]
            return replace(c, members=tuple(members))
        files.update(hinfo.path, class_names(idx, hinfo.owner), edit)
    else:
        files.update(hinfo.path, class_names(idx, hinfo.owner), lambda c: _replace_member(c, hmi, new_host))
        if not others:
            files.update(minfo.path, class_names(idx, minfo.owner), _drop_member(mmi))
    return Program(tuple(_source_files(files.units))), (at, at + len(spliced) - 1)


# ---------------------------------------------------------------------------
# public operations

def apply(program: Program, r: Refactoring) -> Program:
    """Perform ``r`` and rewrite every reference it affects."""
    if r.kind == K.ExtractMethod:
        return _extract(program, r)
    if r.kind == K.InlineMethod:
        return _inline(program, r)
    if r.before == r.after and r.kind not in HIERARCHY:
        # a rebased refactoring whose effect is already in place
        if not program.index.exists(r.before):
            raise ElementMissing(r)
        return program
    return _Transform(program, r).run()


@dataclass
class LogEntry:
    refactoring: Refactoring
    applied: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return {"refactoring": str(self.refactoring), "applied": self.applied, "reason": self.reason}


@dataclass(frozen=True)
class Anchor:
    """Where an inlined block sits in the printed refactoring-free file."""

    path: str
    host: ElementId
    stmt_range: Tuple[int, int]
    lines: Tuple[int, int]


@dataclass
class InversionLog:
    entries: List[LogEntry] = field(default_factory=list)
    # position in the input list -> anchor of the inlined statements
    anchors: Dict[int, Anchor] = field(default_factory=dict)

    @property
    def failures(self) -> List[LogEntry]:
        return [e for e in self.entries if not e.applied]


@dataclass
class ReplayLog:
    entries: List[LogEntry] = field(default_factory=list)

    @property
    def failures(self) -> List[LogEntry]:
        return [e for e in self.entries if not e.applied]


def invert_all(parent: Program, refs: Sequence[Refactoring]):
    """Undo ``refs`` (TopDown order) on ``parent``; returns (program, InversionLog).

    A TopDown list applies forward from the base one entry at a time, so the
    exact undo walks it backwards. Log entries keep the input order.
    """
    program = parent
    applied: List[Refactoring] = []
    entries: Dict[int, LogEntry] = {}
    logbook = InversionLog()
    pending: Dict[int, Tuple[ElementId, Tuple[int, int], int]] = {}
    for i in range(len(refs) - 1, -1, -1):
        r = refs[i]
        inv = inverse(r)
        for prev in applied:
            inv = rebase(inv, prev)
        try:
            if inv.kind == K.InlineMethod:
                program, rng = _inline_at(program, inv)
                pending[i] = (inv.after, rng, len(applied) + 1)
            else:
                program = apply(program, inv)
        except (ElementMissing, Collision) as exc:
            log.info("inversion skipped: %s (%s)", r, exc)
            entries[i] = LogEntry(r, False, str(exc))
            continue
        applied.append(inv)
        entries[i] = LogEntry(r, True)
    logbook.entries = [entries[i] for i in range(len(refs))]
    for i, (host, rng, upto) in pending.items():
        for later in applied[upto:]:
            host = map_id(later, host)
        anchor = anchor_for(program, host, rng)
        if anchor is not None:
            logbook.anchors[i] = anchor
    return program, logbook


def anchor_for(program: Program, host: ElementId, rng: Tuple[int, int]) -> Optional[Anchor]:
    info = program.index.methods.get(host)
    if info is None:
        return None
    _, line_map = print_unit_with_lines(program.file(info.path).unit)
    names = class_names(program.index, info.owner)
    spans = line_map.get((names, info.mpath[-1]))
    if not spans or rng[1] >= len(spans):
        return None
    return Anchor(info.path, host, rng, (spans[rng[0]][0], spans[rng[1]][1]))


def replay_all(merged: Program, refs: Sequence[Refactoring],
               anchors: Optional[Dict[int, Optional[Tuple[int, int]]]] = None):
    """Re-apply ``refs`` (BottomUp order) to ``merged``; returns (program, ReplayLog).

    ``anchors`` overrides the statement range of extract refactorings by
    list position; ``None`` there means the range holds conflict markers
    and the refactoring is left undone.
    """
    anchors = anchors or {}
    program = merged
    applied: List[Refactoring] = []
    logbook = ReplayLog()
    for i, r in enumerate(refs):
        cur = r
        for prev in applied:
            cur = rebase(cur, prev)
        if i in anchors:
            if anchors[i] is None:
                logbook.entries.append(LogEntry(r, False, "anchored span holds conflict markers"))
                continue
            cur = replace(cur, stmt_range=anchors[i])
        try:
            program = apply(program, cur)
        except (ElementMissing, Collision) as exc:
            log.info("replay skipped: %s (%s)", r, exc)
            logbook.entries.append(LogEntry(r, False, str(exc)))
            continue
        applied.append(cur)
        logbook.entries.append(LogEntry(r, True))
    return program, logbook
