"""Programs, element identities, name resolution and reference bindings."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .ast import ClassDecl, FieldDecl, Line, MethodDecl, SourceFile, expected_path
from .parser import is_ident
from .tokens import iter_classes, iter_stmts, token_sites

log = logging.getLogger(__name__)

KINDS = ("Package", "Class", "Method", "Field", "Parameter")

KEYWORDS = frozenset("""
    return new throw if else while for do this super null true false break
    continue instanceof switch case default try catch finally class static
    package import extends final
""".split())


@dataclass(frozen=True, order=True)
class ElementId:
    """Identity of a program element.

    ``params`` holds the canonical parameter types (fully qualified where
    the type names a class) and is present iff kind is Method or Parameter.
    For parameters ``qualified_name`` is the method's name plus the
    parameter name.
    """

    kind: str
    qualified_name: str
    params: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown element kind {self.kind}")
        if (self.params is not None) != (self.kind in ("Method", "Parameter")):
            raise ValueError(f"signature presence mismatch for {self.kind}")

    @property
    def name(self) -> str:
        return self.qualified_name.rsplit(".", 1)[-1]

    @property
    def container(self) -> str:
        return self.qualified_name.rsplit(".", 1)[0] if "." in self.qualified_name else ""

    @property
    def method(self) -> "ElementId":
        """The method a parameter belongs to."""
        assert self.kind == "Parameter"
        return ElementId("Method", self.container, self.params)

    def with_name(self, name: str) -> "ElementId":
        qn = f"{self.container}.{name}" if self.container else name
        return ElementId(self.kind, qn, self.params)

    def with_container(self, container: str) -> "ElementId":
        qn = f"{container}.{self.name}" if container else self.name
        return ElementId(self.kind, qn, self.params)

    def __str__(self) -> str:
        if self.kind == "Method":
            return f"Method:{self.qualified_name}({','.join(self.params)})"
        if self.kind == "Parameter":
            return f"Parameter:{self.container}({','.join(self.params)})#{self.name}"
        return f"{self.kind}:{self.qualified_name}"

    @classmethod
    def parse(cls, text: str) -> "ElementId":
        kind, _, rest = text.partition(":")
        if kind in ("Method", "Parameter"):
            head, _, tail = rest.partition("(")
            sig, _, pname = tail.partition(")")
            params = tuple(sig.split(",")) if sig else ()
            if kind == "Parameter":
                return cls(kind, f"{head}.{pname.lstrip('#')}", params)
            return cls(kind, head, params)
        return cls(kind, rest)


def method_id(owner: str, name: str, params: Sequence[str]) -> ElementId:
    return ElementId("Method", f"{owner}.{name}", tuple(params))


class DuplicateDeclaration(Exception):
    def __init__(self, element: ElementId):
        self.element = element
        super().__init__(f"duplicate declaration {element}")


class PathMismatch(Exception):
    def __init__(self, path: str, expected: str = ""):
        self.path = path
        super().__init__(f"file {path} should be at {expected}")


class UnknownElement(Exception):
    def __init__(self, element: ElementId):
        self.element = element
        super().__init__(f"unknown element {element}")


@dataclass(frozen=True)
class ClassInfo:
    qn: str
    decl: ClassDecl
    path: str
    cpath: Tuple[int, ...]
    outer: Optional[str]
    package: str


@dataclass(frozen=True)
class MemberInfo:
    id: ElementId
    owner: str
    decl: object
    path: str
    mpath: Tuple[int, ...]


@dataclass(frozen=True)
class Scope:
    """Where a token sits: file, innermost class, and enclosing member."""

    path: str
    cls: Optional[str]
    member: Optional[ElementId] = None


@dataclass(frozen=True)
class Ref:
    """A resolved reference occupying tokens ``start..end`` of one sequence.

    ``qual`` says how a member reference is written: ``bare`` (``m(``),
    ``class`` (``C.m(``, the span covers the qualifier), ``this``, ``var``
    (typed receiver) or ``other`` (untyped expression receiver).
    """

    kind: str  # class, method, field, param
    path: str
    loc: Tuple
    start: int
    end: int
    target: ElementId
    scope: Scope
    qual: str = "bare"
    arity: int = 0
    # where this sequence is: import, decl (types) or code
    where: str = "code"


@dataclass(frozen=True)
class RefSite:
    path: str
    loc: Tuple
    index: int


class Index:
    """Declaration tables and resolution services for one Program."""

    def __init__(self, files: Sequence[SourceFile]):
        self.files: Dict[str, SourceFile] = {f.path: f for f in files}
        self.classes: Dict[str, ClassInfo] = {}
        self.packages: Dict[str, List[str]] = {}
        self.notes: List[str] = []
        self.duplicates: List[ElementId] = []
        for f in files:
            pkg = f.unit.package
            self.packages.setdefault(pkg, []).append(f.path)
            for cpath, names, cls in iter_classes(f.unit):
                qn = ".".join(([pkg] if pkg else []) + list(names))
                outer = ".".join(([pkg] if pkg else []) + list(names[:-1])) if len(names) > 1 else None
                if qn in self.classes:
                    self.duplicates.append(ElementId("Class", qn))
                    continue
                self.classes[qn] = ClassInfo(qn, cls, f.path, cpath, outer, pkg)
        self.methods: Dict[ElementId, MemberInfo] = {}
        self.fields: Dict[ElementId, MemberInfo] = {}
        self.params: Dict[ElementId, MemberInfo] = {}
        self.class_methods: Dict[str, List[MemberInfo]] = {q: [] for q in self.classes}
        self.class_fields: Dict[str, Dict[str, MemberInfo]] = {q: {} for q in self.classes}
        for qn, info in self.classes.items():
            for mi, m in enumerate(info.decl.members):
                mpath = info.cpath + (mi,)
                if isinstance(m, MethodDecl):
                    sig = self.canonical_types(m.param_types, info.path, qn)
                    mid = method_id(qn, m.name, sig)
                    if mid in self.methods:
                        self.duplicates.append(mid)
                        continue
                    minfo = MemberInfo(mid, qn, m, info.path, mpath)
                    self.methods[mid] = minfo
                    self.class_methods[qn].append(minfo)
                    for p in m.params:
                        pid = ElementId("Parameter", f"{mid.qualified_name}.{p.name}", sig)
                        self.params[pid] = MemberInfo(pid, qn, p, info.path, mpath)
                elif isinstance(m, FieldDecl):
                    fid = ElementId("Field", f"{qn}.{m.name}")
                    if fid in self.fields:
                        self.duplicates.append(fid)
                        continue
                    finfo = MemberInfo(fid, qn, m, info.path, mpath)
                    self.fields[fid] = finfo
                    self.class_fields[qn][m.name] = finfo
        self._supers: Dict[str, List[str]] = {}

    # declarations ------------------------------------------------------
    def all_ids(self) -> List[ElementId]:
        ids = [ElementId("Package", p) for p in self.packages]
        ids += [ElementId("Class", q) for q in self.classes]
        ids += list(self.methods) + list(self.fields) + list(self.params)
        return ids

    def exists(self, eid: ElementId) -> bool:
        if eid.kind == "Package":
            return eid.qualified_name in self.packages
        if eid.kind == "Class":
            return eid.qualified_name in self.classes
        table = {"Method": self.methods, "Field": self.fields, "Parameter": self.params}[eid.kind]
        return eid in table

    def method_decl(self, eid: ElementId) -> Optional[MethodDecl]:
        info = self.methods.get(eid)
        return info.decl if info else None

    # resolution --------------------------------------------------------
    def lexical(self, cls: Optional[str]) -> List[str]:
        out = []
        while cls is not None:
            out.append(cls)
            cls = self.classes[cls].outer if cls in self.classes else None
        return out

    def resolve_class(self, chain: Sequence[str], path: str, cls: Optional[str] = None) -> Optional[str]:
        """Resolve a dotted class name seen in ``path`` (inside class ``cls``)."""
        full = ".".join(chain)
        if full in self.classes:
            return full
        head = chain[0]
        found = None
        for c in self.lexical(cls):
            if f"{c}.{head}" in self.classes:
                found = f"{c}.{head}"
                break
            if c.rsplit(".", 1)[-1] == head:
                found = c
                break
        if found is None and path in self.files:
            unit = self.files[path].unit
            hits = [imp for imp in unit.imports if imp.rsplit(".", 1)[-1] == head]
            if len(hits) > 1:
                self.notes.append(f"Ambiguity: {head} in {path} matches {', '.join(hits)}")
                return None
            if hits and hits[0] in self.classes:
                found = hits[0]
            if found is None:
                local = f"{unit.package}.{head}" if unit.package else head
                info = self.classes.get(local)
                if info is not None and info.outer is None:
                    found = local
        if found is None:
            return None
        for seg in chain[1:]:
            nxt = f"{found}.{seg}"
            if nxt not in self.classes or self.classes[nxt].outer != found:
                return None
            found = nxt
        return found

    def canonical_type(self, text: str, path: str, cls: Optional[str]) -> str:
        qn = self.resolve_class(text.split("."), path, cls)
        return qn if qn is not None else text

    def canonical_types(self, texts: Iterable[str], path: str, cls: Optional[str]) -> Tuple[str, ...]:
        return tuple(self.canonical_type(t, path, cls) for t in texts)

    def superclass(self, qn: str) -> Optional[str]:
        info = self.classes.get(qn)
        if info is None or not info.decl.superclass:
            return None
        return self.resolve_class(info.decl.superclass.split("."), info.path, info.outer)

    def supers(self, qn: str) -> List[str]:
        """``qn`` followed by its transitive superclasses."""
        if qn not in self._supers:
            chain, cur = [], qn
            while cur is not None and cur not in chain:
                chain.append(cur)
                cur = self.superclass(cur)
            self._supers[qn] = chain
        return self._supers[qn]

    def is_subclass(self, sub: str, sup: str) -> bool:
        return sub != sup and sup in self.supers(sub)

    def find_method(self, cls: str, name: str, arity: Optional[int]) -> Optional[ElementId]:
        for c in self.supers(cls):
            ms = [m for m in self.class_methods.get(c, ()) if m.decl.name == name]
            if not ms:
                continue
            if len(ms) == 1:
                return ms[0].id
            ms = [m for m in ms if len(m.decl.params) == arity]
            return ms[0].id if len(ms) == 1 else None
        return None

    def find_field(self, cls: str, name: str) -> Optional[ElementId]:
        for c in self.supers(cls):
            f = self.class_fields.get(c, {}).get(name)
            if f is not None:
                return f.id
        return None

    def bare_method(self, scope_cls: Optional[str], name: str, arity: int) -> Optional[ElementId]:
        for c in self.lexical(scope_cls):
            if any(m.decl.name == name for h in self.supers(c) for m in self.class_methods.get(h, ())):
                return self.find_method(c, name, arity)
        return None

    def bare_field(self, scope_cls: Optional[str], name: str) -> Optional[ElementId]:
        for c in self.lexical(scope_cls):
            f = self.find_field(c, name)
            if f is not None:
                return f
        return None

    def unique_method(self, name: str, arity: int) -> Optional[ElementId]:
        ms = [m.id for m in self.methods.values() if m.decl.name == name]
        if len(ms) > 1:
            ms = [m for m in ms if len(m.params) == arity]
        return ms[0] if len(ms) == 1 else None

    def member_type(self, eid: ElementId) -> Optional[str]:
        """Class a field's type or a method's return type resolves to."""
        info = self.methods.get(eid) or self.fields.get(eid)
        if info is None:
            return None
        text = info.decl.return_type if eid.kind == "Method" else info.decl.type
        return self.resolve_class(text.split("."), info.path, info.owner)

    # bindings ----------------------------------------------------------
    @cached_property
    def refs(self) -> List[Ref]:
        out: List[Ref] = []
        for path in sorted(self.files):
            out.extend(_bind_file(self, self.files[path]))
        return out


def _count_args(tokens, open_idx) -> int:
    if open_idx + 1 < len(tokens) and tokens[open_idx + 1] == ")":
        return 0
    depth, commas = 0, 0
    for t in tokens[open_idx:]:
        if t in ("(", "["):
            depth += 1
        elif t in (")", "]"):
            depth -= 1
            if depth == 0:
                break
        elif t == "," and depth == 1:
            commas += 1
    return commas + 1


def local_decls(body) -> Dict[str, str]:
    """Local variable declarations ``Type name [= ...]`` anywhere in a body."""
    out: Dict[str, str] = {}
    for _, s in iter_stmts(body):
        if not isinstance(s, Line):
            continue
        toks = s.tokens
        starts = [0] + [i + 2 for i in range(len(toks) - 1)
                        if toks[i] == "for" and toks[i + 1] == "("]
        for i in starts:
            decl = _decl_at(toks, i)
            if decl:
                out.setdefault(decl[1], decl[0])
    return out


def _decl_at(toks, i):
    if i >= len(toks) or not is_ident(toks[i]) or toks[i] in KEYWORDS:
        return None
    j = i
    while j + 2 < len(toks) and toks[j + 1] == "." and is_ident(toks[j + 2]):
        j += 2
    if j + 1 >= len(toks):
        return None
    name = toks[j + 1]
    if not is_ident(name) or name in KEYWORDS:
        return None
    if j + 2 < len(toks) and toks[j + 2] not in ("=", ":", ";"):
        return None
    return "".join(toks[i:j + 1]), name


def _chain(tokens, i) -> List[int]:
    chain = [i]
    j = i
    while j + 2 < len(tokens) and tokens[j + 1] == "." and is_ident(tokens[j + 2]) \
            and tokens[j + 2] not in KEYWORDS:
        chain.append(j + 2)
        j += 2
    return chain


def scan_code(index: Index, tokens, scope: Scope, loc, params: Dict[str, str],
              locals_: Dict[str, str]) -> List[Ref]:
    """Bind identifier uses in one code token sequence."""
    out: List[Ref] = []
    path, cls = scope.path, scope.cls
    consumed = set()

    def add(kind, start, end, target, qual, arity=0):
        out.append(Ref(kind, path, loc, start, end, target, scope, qual, arity))

    def var_type(text):
        return index.resolve_class(text.split("."), path, cls)

    n = len(tokens)
    for i, t in enumerate(tokens):
        if i in consumed or not is_ident(t):
            continue
        prev = tokens[i - 1] if i else None
        nxt = tokens[i + 1] if i + 1 < n else None
        if prev == ".":
            if nxt == "(" and t not in KEYWORDS:
                m = index.unique_method(t, _count_args(tokens, i + 1))
                if m is not None:
                    add("method", i, i, m, "other", _count_args(tokens, i + 1))
            continue
        if t in KEYWORDS and t not in ("this", "super"):
            continue
        chain = _chain(tokens, i)
        consumed.update(chain)
        receiver: Optional[str] = None
        p = 1
        qual = "var"
        if t == "this":
            receiver, qual = cls, "this"
        elif t == "super":
            receiver, qual = (index.superclass(cls) if cls else None), "this"
        elif t in locals_ or t in params:
            if t in params and t not in locals_ and nxt != "(" and scope.member is not None:
                pid = ElementId("Parameter", f"{scope.member.qualified_name}.{t}", scope.member.params)
                add("param", i, i, pid, "bare")
            receiver = var_type(locals_.get(t) or params[t])
        elif len(chain) == 1 and nxt == "(" and prev != "new" and \
                index.bare_method(cls, t, _count_args(tokens, i + 1)) is not None:
            arity = _count_args(tokens, i + 1)
            add("method", i, i, index.bare_method(cls, t, arity), "bare", arity)
            continue
        elif nxt != "(" and index.bare_field(cls, t) is not None:
            fid = index.bare_field(cls, t)
            add("field", i, i, fid, "bare")
            receiver = index.member_type(fid)
        else:
            idents = [tokens[k] for k in chain]
            for k in range(len(chain), 0, -1):
                qn = index.resolve_class(idents[:k], path, cls)
                if qn is not None:
                    add("class", i, chain[k - 1], ElementId("Class", qn), "class")
                    receiver, p, qual = qn, k, "class"
                    break
            else:
                continue
        for pos in range(p, len(chain)):
            k = chain[pos]
            name = tokens[k]
            is_call = k + 1 < n and tokens[k + 1] == "("
            first = pos == p
            q = qual if first else "other"
            start = i if (first and q == "class") else k
            if receiver is None:
                if is_call:
                    arity = _count_args(tokens, k + 1)
                    m = index.unique_method(name, arity)
                    if m is not None:
                        add("method", k, k, m, "other", arity)
                break
            if is_call:
                arity = _count_args(tokens, k + 1)
                m = index.find_method(receiver, name, arity)
                if m is None:
                    break
                add("method", start, k, m, q, arity)
                receiver = index.member_type(m)
            else:
                f = index.find_field(receiver, name)
                if f is None:
                    break
                add("field", start, k, f, q)
                receiver = index.member_type(f)
    return out


def _bind_file(index: Index, sf: SourceFile) -> List[Ref]:
    out: List[Ref] = []
    unit = sf.unit
    pkg = unit.package
    cpath_to_qn = {}
    for cpath, names, _ in iter_classes(unit):
        cpath_to_qn[cpath] = ".".join(([pkg] if pkg else []) + list(names))
    method_ctx: Dict[Tuple, Tuple] = {}
    for loc, tokens in token_sites(unit):
        if loc[0] == "import":
            qn = ".".join(tokens[::2])
            if qn in index.classes:
                out.append(Ref("class", sf.path, loc, 0, len(tokens) - 1, ElementId("Class", qn),
                               Scope(sf.path, None), "class", where="import"))
            continue
        anchor, what = loc[0], loc[1]
        if what == "super":
            cls = cpath_to_qn[anchor]
            outer = index.classes[cls].outer if cls in index.classes else None
            qn = index.resolve_class(tokens[::2], sf.path, outer)
            if qn is not None:
                out.append(Ref("class", sf.path, loc, 0, len(tokens) - 1, ElementId("Class", qn),
                               Scope(sf.path, cls), "class", where="decl"))
            continue
        cls = cpath_to_qn[anchor[:-1]]
        info = index.classes.get(cls)
        if info is None:
            continue
        decl = info.decl.members[anchor[-1]]
        if isinstance(decl, FieldDecl):
            member = ElementId("Field", f"{cls}.{decl.name}")
            params, locals_ = {}, {}
        else:
            key = anchor
            if key not in method_ctx:
                sig = index.canonical_types(decl.param_types, sf.path, cls)
                method_ctx[key] = (method_id(cls, decl.name, sig),
                                   {p.name: p.type for p in decl.params},
                                   local_decls(decl.body))
            member, params, locals_ = method_ctx[key]
        scope = Scope(sf.path, cls, member)
        if what in ("ftype", "ret", "ptype"):
            qn = index.resolve_class(tokens[::2], sf.path, cls)
            if qn is not None:
                out.append(Ref("class", sf.path, loc, 0, len(tokens) - 1, ElementId("Class", qn),
                               scope, "class", where="decl"))
            continue
        out.extend(scan_code(index, tokens, scope, loc, params, locals_))
    return out


@dataclass(frozen=True)
class Program:
    """A parsed project. Immutable; derived tables are computed lazily."""

    files: Tuple[SourceFile, ...]

    def __post_init__(self):
        object.__setattr__(self, "files", tuple(sorted(self.files, key=lambda f: f.path)))

    @cached_property
    def index(self) -> Index:
        return Index(self.files)

    @property
    def paths(self) -> List[str]:
        return [f.path for f in self.files]

    def file(self, path: str) -> Optional[SourceFile]:
        return self.index.files.get(path)


@dataclass(frozen=True)
class DeclSite:
    path: str
    location: Tuple[int, ...]


@dataclass
class SymbolTable:
    entries: Dict[ElementId, DeclSite] = field(default_factory=dict)
    scopes: Dict[str, Tuple[str, Tuple[str, ...]]] = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, eid):
        return eid in self.entries


def symbol_table(program: Program) -> SymbolTable:
    idx = program.index
    table = SymbolTable()
    for pkg, paths in idx.packages.items():
        table.entries[ElementId("Package", pkg)] = DeclSite(sorted(paths)[0], ())
    for qn, info in idx.classes.items():
        table.entries[ElementId("Class", qn)] = DeclSite(info.path, info.cpath)
    for tbl in (idx.methods, idx.fields, idx.params):
        for eid, info in tbl.items():
            table.entries[eid] = DeclSite(info.path, info.mpath)
    for f in program.files:
        table.scopes[f.path] = (f.unit.package, f.unit.imports)
    return table


def build_program(files: Sequence[SourceFile], check_paths: bool = True) -> Tuple[Program, SymbolTable]:
    """Assemble files into a Program; raises PathMismatch / DuplicateDeclaration."""
    paths = [f.path for f in files]
    if len(set(paths)) != len(paths):
        raise ValueError("duplicate file paths")
    if check_paths:
        for f in files:
            want = expected_path(f.unit)
            if f.path != want:
                raise PathMismatch(f.path, want)
    program = Program(tuple(files))
    if program.index.duplicates:
        raise DuplicateDeclaration(program.index.duplicates[0])
    return program, symbol_table(program)


def resolve(program: Program, from_file: str, name: str, scope_class: Optional[str] = None) -> Optional[ElementId]:
    """Resolve a simple or dotted class name as seen from ``from_file``."""
    idx = program.index
    if name in idx.packages and name not in idx.classes:
        return ElementId("Package", name)
    qn = idx.resolve_class(name.split("."), from_file, scope_class)
    return ElementId("Class", qn) if qn is not None else None


def find_references(program: Program, eid: ElementId) -> List[RefSite]:
    """Every reference site bound to ``eid`` (declarations excluded)."""
    idx = program.index
    if not idx.exists(eid):
        raise UnknownElement(eid)
    if eid.kind == "Package":
        sites = [RefSite(r.path, r.loc, r.start) for r in idx.refs
                 if r.kind == "class" and r.target.qualified_name.startswith(eid.qualified_name + ".")
                 and r.end - r.start >= 2 and "".join(_span(program, r)).startswith(eid.qualified_name + ".")]
        return sites
    kind = {"Class": "class", "Method": "method", "Field": "field", "Parameter": "param"}[eid.kind]
    out = []
    for r in idx.refs:
        if r.kind == kind and r.target == eid:
            index = r.start
            if kind in ("method", "field") and r.qual == "class":
                index = r.end
            out.append(RefSite(r.path, r.loc, index))
    return out


def _span(program: Program, ref: Ref) -> Tuple[str, ...]:
    toks = dict(token_sites(program.index.files[ref.path].unit))[ref.loc]
    return toks[ref.start:ref.end + 1]
