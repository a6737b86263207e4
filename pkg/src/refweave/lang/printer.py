"""Canonical MJ printer.

One declaration header per line, one statement per line, four spaces per
nesting level, a blank line between members and between top-level classes.
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from .ast import Block, ClassDecl, CompilationUnit, FieldDecl, MethodDecl

INDENT = "    "
_NO_SPACE_BEFORE = {";", ",", "(", ")", ".", "[", "]"}
_NO_SPACE_AFTER = {"(", ".", "["}

# (class name path, member index) -> [(first line, last line)] per body statement
LineMap = Dict[Tuple[Tuple[str, ...], int], List[Tuple[int, int]]]


def join_tokens(tokens: Sequence[str]) -> str:
    out = []
    prev = None
    for tok in tokens:
        if prev is not None and tok not in _NO_SPACE_BEFORE and prev not in _NO_SPACE_AFTER:
            out.append(" ")
        out.append(tok)
        prev = tok
    return "".join(out)


class _Printer:
    def __init__(self):
        self.lines: List[str] = []
        self.line_map: LineMap = {}

    def emit(self, depth: int, text: str):
        self.lines.append(INDENT * depth + text if text else "")

    def comments(self, depth: int, comments):
        for c in comments:
            self.emit(depth, "//" + c)

    def unit(self, unit: CompilationUnit):
        self.comments(0, unit.doc)
        self.emit(0, f"package {unit.package};")
        if unit.imports:
            self.emit(0, "")
            for imp in unit.imports:
                self.emit(0, f"import {imp};")
        for cls in unit.classes:
            self.emit(0, "")
            self.cls(cls, 0, ())
        if unit.trailing:
            self.emit(0, "")
            self.comments(0, unit.trailing)

    def cls(self, cls: ClassDecl, depth: int, outer: Tuple[str, ...]):
        path = outer + (cls.name,)
        self.comments(depth, cls.doc)
        ext = f" extends {cls.superclass}" if cls.superclass else ""
        self.emit(depth, f"class {cls.name}{ext} {{")
        for i, member in enumerate(cls.members):
            if i:
                self.emit(0, "")
            if isinstance(member, ClassDecl):
                self.cls(member, depth + 1, path)
            elif isinstance(member, FieldDecl):
                self.field(member, depth + 1)
            else:
                self.method(member, depth + 1, (path, i))
        self.comments(depth + 1, cls.trailing)
        self.emit(depth, "}")

    def field(self, f: FieldDecl, depth: int):
        self.comments(depth, f.doc)
        static = "static " if f.static else ""
        init = f" = {join_tokens(f.init)}" if f.init is not None else ""
        self.emit(depth, f"{static}{f.type} {f.name}{init};")

    def method(self, m: MethodDecl, depth: int, key):
        self.comments(depth, m.doc)
        static = "static " if m.static else ""
        params = ", ".join(f"{p.type} {p.name}" for p in m.params)
        self.emit(depth, f"{static}{m.return_type} {m.name}({params}) {{")
        spans = []
        for stmt in m.body:
            start = len(self.lines) + 1
            self.stmt(stmt, depth + 1)
            spans.append((start, len(self.lines)))
        self.line_map[key] = spans
        self.comments(depth + 1, m.trailing)
        self.emit(depth, "}")

    def stmt(self, stmt, depth: int):
        self.comments(depth, stmt.comments)
        if isinstance(stmt, Block):
            self.emit(depth, "{")
            self.block_body(stmt, depth)
        elif stmt.block is not None:
            self.emit(depth, join_tokens(stmt.tokens) + " {")
            self.block_body(stmt.block, depth)
        else:
            self.emit(depth, join_tokens(stmt.tokens) + ";")

    def block_body(self, block: Block, depth: int):
        for s in block.stmts:
            self.stmt(s, depth + 1)
        self.comments(depth + 1, block.trailing)
        self.emit(depth, "}")


def print_unit(unit: CompilationUnit) -> str:
    p = _Printer()
    p.unit(unit)
    return "\n".join(p.lines) + "\n"


def print_unit_with_lines(unit: CompilationUnit) -> Tuple[str, LineMap]:
    """Print and also report 1-based line spans of every method-body statement."""
    p = _Printer()
    p.unit(unit)
    return "\n".join(p.lines) + "\n", p.line_map
