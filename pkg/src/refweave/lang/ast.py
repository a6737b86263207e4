"""AST node types for MJ source files.

Nodes are frozen dataclasses so whole programs compare structurally.
Source positions are carried for diagnostics and line anchoring but are
excluded from equality.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union


@dataclass(frozen=True)
class Block:
    stmts: Tuple["Stmt", ...] = ()
    trailing: Tuple[str, ...] = ()
    comments: Tuple[str, ...] = ()
    line: int = field(default=0, compare=False)
    end_line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Line:
    """A token statement; ``block`` is set for headers like ``if (x) { ... }``."""

    tokens: Tuple[str, ...]
    block: Optional[Block] = None
    comments: Tuple[str, ...] = ()
    line: int = field(default=0, compare=False)
    end_line: int = field(default=0, compare=False)


Stmt = Union[Line, Block]


@dataclass(frozen=True)
class Param:
    type: str
    name: str


@dataclass(frozen=True)
class FieldDecl:
    type: str
    name: str
    init: Optional[Tuple[str, ...]] = None
    static: bool = False
    doc: Tuple[str, ...] = ()


@dataclass(frozen=True)
class MethodDecl:
    return_type: str
    name: str
    params: Tuple[Param, ...] = ()
    body: Tuple[Stmt, ...] = ()
    static: bool = False
    doc: Tuple[str, ...] = ()
    trailing: Tuple[str, ...] = ()
    line: int = field(default=0, compare=False)

    @property
    def param_types(self) -> Tuple[str, ...]:
        return tuple(p.type for p in self.params)


@dataclass(frozen=True)
class ClassDecl:
    name: str
    superclass: Optional[str] = None
    members: Tuple["Member", ...] = ()
    doc: Tuple[str, ...] = ()
    trailing: Tuple[str, ...] = ()


Member = Union[FieldDecl, MethodDecl, ClassDecl]


@dataclass(frozen=True)
class CompilationUnit:
    package: str
    imports: Tuple[str, ...] = ()
    classes: Tuple[ClassDecl, ...] = ()
    doc: Tuple[str, ...] = ()
    trailing: Tuple[str, ...] = ()


@dataclass(frozen=True)
class SourceFile:
    path: str
    unit: CompilationUnit


def expected_path(unit: CompilationUnit) -> str:
    """Path a unit must live at: package directories plus first class name."""
    parts = unit.package.split(".") if unit.package else []
    return "/".join(parts + [unit.classes[0].name + ".mj"])
