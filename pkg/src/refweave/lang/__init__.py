"""The MJ mini-language: parsing, printing, symbols and references."""
from .ast import (Block, ClassDecl, CompilationUnit, FieldDecl, Line, MethodDecl,
                  Param, SourceFile, expected_path)
from .parser import MJSyntaxError, parse_file, parse_unit, tokenize
from .printer import print_unit, print_unit_with_lines
from .program import (DuplicateDeclaration, ElementId, PathMismatch, Program,
                      SymbolTable, UnknownElement, build_program, find_references,
                      resolve, symbol_table)

__all__ = [
    "Block", "ClassDecl", "CompilationUnit", "FieldDecl", "Line", "MethodDecl",
    "Param", "SourceFile", "expected_path", "MJSyntaxError", "parse_file",
    "parse_unit", "tokenize", "print_unit", "print_unit_with_lines",
    "DuplicateDeclaration", "ElementId", "PathMismatch", "Program", "SymbolTable",
    "UnknownElement", "build_program", "find_references", "resolve", "symbol_table",
]
