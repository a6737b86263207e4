"""Addressable token sequences inside a compilation unit.

Every place a reference can appear (imports, extends clauses, declared
types, field initializers, statement tokens) is exposed as a token tuple
keyed by a stable location tuple, and can be rewritten by key.
"""
from __future__ import annotations

from dataclasses import replace
from typing import Dict, Iterator, Optional, Tuple

from .ast import Block, ClassDecl, CompilationUnit, FieldDecl, Line, MethodDecl, Param

Loc = Tuple
Tokens = Tuple[str, ...]


def split_dotted(name: str) -> Tokens:
    out = []
    for i, part in enumerate(name.split(".")):
        if i:
            out.append(".")
        out.append(part)
    return tuple(out)


def join_dotted(tokens: Tokens) -> str:
    return "".join(tokens)


def iter_stmts(stmts, prefix=()) -> Iterator[Tuple[Tuple[int, ...], object]]:
    for i, s in enumerate(stmts):
        path = prefix + (i,)
        yield path, s
        inner = s.stmts if isinstance(s, Block) else (s.block.stmts if s.block else ())
        yield from iter_stmts(inner, path)


def iter_classes(unit: CompilationUnit) -> Iterator[Tuple[Tuple[int, ...], Tuple[str, ...], ClassDecl]]:
    """Yield (class index path, class name path, decl) for every class, outer first."""
    def walk(cls, cpath, names):
        yield cpath, names, cls
        for mi, m in enumerate(cls.members):
            if isinstance(m, ClassDecl):
                yield from walk(m, cpath + (mi,), names + (m.name,))
    for ci, cls in enumerate(unit.classes):
        yield from walk(cls, (ci,), (cls.name,))


def token_sites(unit: CompilationUnit) -> Iterator[Tuple[Loc, Tokens]]:
    """Yield (location, tokens) for every token-bearing position of the unit."""
    for i, imp in enumerate(unit.imports):
        yield ("import", i), split_dotted(imp)
    for cpath, _, cls in iter_classes(unit):
        if cls.superclass:
            yield (cpath, "super"), split_dotted(cls.superclass)
        for mi, m in enumerate(cls.members):
            mpath = cpath + (mi,)
            if isinstance(m, FieldDecl):
                yield (mpath, "ftype"), split_dotted(m.type)
                if m.init is not None:
                    yield (mpath, "init"), m.init
            elif isinstance(m, MethodDecl):
                yield (mpath, "ret"), split_dotted(m.return_type)
                for k, p in enumerate(m.params):
                    yield (mpath, "ptype", k), split_dotted(p.type)
                for spath, s in iter_stmts(m.body):
                    if isinstance(s, Line):
                        yield (mpath, "body", spath), s.tokens


def class_at(unit: CompilationUnit, cpath: Tuple[int, ...]) -> ClassDecl:
    cls = unit.classes[cpath[0]]
    for mi in cpath[1:]:
        cls = cls.members[mi]
    return cls


def member_at(unit: CompilationUnit, mpath: Tuple[int, ...]):
    return class_at(unit, mpath[:-1]).members[mpath[-1]]


def _rewrite_stmts(stmts, prefix, edits):
    out = []
    for i, s in enumerate(stmts):
        path = prefix + (i,)
        if isinstance(s, Block):
            s = replace(s, stmts=_rewrite_stmts(s.stmts, path, edits))
        else:
            toks = edits.get(path, s.tokens)
            block = s.block
            if block is not None:
                block = replace(block, stmts=_rewrite_stmts(block.stmts, path, edits))
            s = replace(s, tokens=toks, block=block)
        out.append(s)
    return tuple(out)


def apply_edits(unit: CompilationUnit, edits: Dict[Loc, Tokens]) -> CompilationUnit:
    """Return ``unit`` with the token sequences at the given locations replaced."""
    if not edits:
        return unit
    imports = tuple(join_dotted(edits.get(("import", i), split_dotted(imp)))
                    for i, imp in enumerate(unit.imports))

    def dotted(key, current):
        return join_dotted(edits[key]) if key in edits else current

    def walk(cls: ClassDecl, cpath) -> ClassDecl:
        members = []
        for mi, m in enumerate(cls.members):
            mpath = cpath + (mi,)
            if isinstance(m, ClassDecl):
                m = walk(m, mpath)
            elif isinstance(m, FieldDecl):
                m = replace(m, type=dotted((mpath, "ftype"), m.type),
                            init=edits.get((mpath, "init"), m.init))
            else:
                body_edits = {k[2]: v for k, v in edits.items()
                              if len(k) == 3 and k[0] == mpath and k[1] == "body"}
                params = tuple(Param(dotted((mpath, "ptype", k), p.type), p.name)
                               for k, p in enumerate(m.params))
                m = replace(m, return_type=dotted((mpath, "ret"), m.return_type),
                            params=params,
                            body=_rewrite_stmts(m.body, (), body_edits) if body_edits else m.body)
            members.append(m)
        return replace(cls, superclass=dotted((cpath, "super"), cls.superclass),
                       members=tuple(members))

    classes = tuple(walk(c, (ci,)) for ci, c in enumerate(unit.classes))
    # dedupe imports that became identical after rewriting
    seen, uniq = set(), []
    for imp in imports:
        if imp not in seen:
            seen.add(imp)
            uniq.append(imp)
    return replace(unit, imports=tuple(uniq), classes=classes)


def body_tokens_at(method: MethodDecl, spath) -> Optional[Tokens]:
    stmts = method.body
    node = None
    for i in spath:
        node = stmts[i]
        stmts = node.stmts if isinstance(node, Block) else (node.block.stmts if node.block else ())
    return node.tokens if isinstance(node, Line) else None
