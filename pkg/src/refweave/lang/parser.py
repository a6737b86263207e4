"""Tokenizer and recursive-descent parser for MJ."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .ast import (Block, ClassDecl, CompilationUnit, FieldDecl, Line,
                  MethodDecl, Param, SourceFile)

OPERATORS = ("==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
             "*=", "/=", "%=", "->", "::", "<<", ">>")
PUNCT = set("{}()[];,.=<>+-*/%!&|^~?:@")

_IDENT = re.compile(r"[A-Za-z_$][A-Za-z0-9_$]*")
_NUMBER = re.compile(r"[0-9][0-9A-Za-z_]*")
_STRING = re.compile(r'"(?:[^"\\\n]|\\.)*"')
_CHAR = re.compile(r"'(?:[^'\\\n]|\\.)*'")


class MJSyntaxError(Exception):
    def __init__(self, line: int, col: int, message: str, path: str = ""):
        self.line = line
        self.col = col
        self.message = message
        self.path = path
        where = f"{path}:" if path else ""
        super().__init__(f"{where}{line}:{col}: {message}")


@dataclass(frozen=True)
class Tok:
    kind: str  # ident, number, string, punct, comment, eof
    text: str
    line: int
    col: int


def is_ident(text: str) -> bool:
    return bool(_IDENT.fullmatch(text))


def tokenize(text: str, path: str = "") -> List[Tok]:
    toks: List[Tok] = []
    line, col, i, n = 1, 1, 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            end = text.find("\n", i)
            end = n if end < 0 else end
            toks.append(Tok("comment", text[i + 2:end].rstrip(), line, col))
            col += end - i
            i = end
            continue
        for kind, rx in (("ident", _IDENT), ("number", _NUMBER),
                         ("string", _STRING), ("string", _CHAR)):
            m = rx.match(text, i)
            if m:
                toks.append(Tok(kind, m.group(), line, col))
                break
        else:
            op = next((o for o in OPERATORS if text.startswith(o, i)), None)
            if op is None and c in PUNCT:
                op = c
            if op is None:
                raise MJSyntaxError(line, col, f"unexpected character {c!r}", path)
            toks.append(Tok("punct", op, line, col))
            i += len(op)
            col += len(op)
            continue
        i += len(toks[-1].text)
        col += len(toks[-1].text)
    toks.append(Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, path: str):
        self.path = path
        self.toks = tokenize(text, path)
        self.pos = 0
        self.stray: List[str] = []

    # token helpers -----------------------------------------------------
    def error(self, message: str, tok: Optional[Tok] = None):
        tok = tok or self.peek()
        raise MJSyntaxError(tok.line, tok.col, message, self.path)

    def comments(self) -> Tuple[str, ...]:
        out = []
        while self.toks[self.pos].kind == "comment":
            out.append(self.toks[self.pos].text)
            self.pos += 1
        return tuple(out)

    def peek(self) -> Tok:
        p = self.pos
        while self.toks[p].kind == "comment":
            p += 1
        return self.toks[p]

    def next(self) -> Tok:
        self.stray.extend(self.comments())
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("punct", "ident") and tok.text == text

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.peek().text or 'end of file'!r}")
        return self.next()

    def ident(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            self.error(f"expected identifier, found {tok.text or 'end of file'!r}")
        return self.next().text

    def dotted(self) -> str:
        parts = [self.ident()]
        while self.at("."):
            self.next()
            parts.append(self.ident())
        return ".".join(parts)

    # grammar -----------------------------------------------------------
    def unit(self) -> CompilationUnit:
        doc = self.comments()
        self.expect("package")
        package = self.dotted()
        self.expect(";")
        imports = []
        while True:
            pending = self.comments()
            if self.at("import"):
                doc += pending
                self.next()
                name = self.dotted()
                self.expect(";")
                if name in imports:
                    self.error(f"duplicate import {name}")
                imports.append(name)
                continue
            break
        classes = []
        while not self.peek().kind == "eof":
            classes.append(self.class_decl(pending))
            pending = self.comments()
        if not classes:
            self.error("expected at least one class")
        return CompilationUnit(package, tuple(imports), tuple(classes), doc, pending)

    def class_decl(self, doc: Tuple[str, ...]) -> ClassDecl:
        self.expect("class")
        name = self.ident()
        superclass = None
        if self.at("extends"):
            self.next()
            superclass = self.dotted()
        self.expect("{")
        members = []
        while True:
            pending = self.comments()
            if self.at("}"):
                self.next()
                return ClassDecl(name, superclass, tuple(members), doc, pending)
            if self.peek().kind == "eof":
                self.error("unterminated class body")
            members.append(self.member(pending))

    def member(self, doc: Tuple[str, ...]):
        if self.at("class"):
            return self.class_decl(doc)
        self.stray = []
        static = False
        if self.at("static"):
            self.next()
            static = True
            doc += self.comments()
        start = self.peek()
        type_ = self.dotted()
        name = self.ident()
        if self.at("("):
            return self.method_rest(type_, name, static, doc, start.line)
        init = None
        if self.at("="):
            self.next()
            init = self.token_seq(stop=(";",))
        self.expect(";")
        return FieldDecl(type_, name, init, static, doc + tuple(self.stray))

    def method_rest(self, ret, name, static, doc, line) -> MethodDecl:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ptype = self.dotted()
                pname = self.ident()
                if any(p.name == pname for p in params):
                    self.error(f"duplicate parameter {pname}")
                params.append(Param(ptype, pname))
                if self.at(","):
                    self.next()
                    continue
                break
        self.expect(")")
        block = self.block(())
        return MethodDecl(ret, name, tuple(params), block.stmts, static, doc,
                          block.trailing, line)

    def block(self, comments: Tuple[str, ...]) -> Block:
        open_tok = self.expect("{")
        stmts = []
        while True:
            pending = self.comments()
            if self.at("}"):
                close = self.next()
                return Block(tuple(stmts), pending, comments, open_tok.line, close.line)
            if self.peek().kind == "eof":
                self.error("unterminated block")
            stmts.append(self.stmt(pending))

    def stmt(self, comments: Tuple[str, ...]):
        if self.at("{"):
            return self.block(comments)
        first = self.peek()
        self.stray = []
        tokens = self.token_seq(stop=(";", "{"))
        comments += tuple(self.stray)
        if self.at("{"):
            if not tokens:
                self.error("empty statement header")
            block = self.block(())
            return Line(tokens, block, comments, first.line, block.end_line)
        end = self.expect(";")
        return Line(tokens, None, comments, first.line, end.line)

    def token_seq(self, stop) -> Tuple[str, ...]:
        out = []
        depth = 0
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                self.error("unexpected end of file in statement")
            if tok.kind == "punct":
                if depth == 0 and tok.text in stop:
                    return tuple(out)
                if tok.text == "}" or (tok.text == "{" and depth > 0):
                    self.error(f"unbalanced {tok.text!r} in statement")
                if tok.text in ("(", "["):
                    depth += 1
                elif tok.text in (")", "]"):
                    depth -= 1
                    if depth < 0:
                        self.error(f"unbalanced {tok.text!r}")
            out.append(self.next().text)


def parse_unit(text: str, path: str = "") -> CompilationUnit:
    return _Parser(text, path).unit()


def parse_file(path: str, text: str) -> SourceFile:
    """Parse MJ source into a SourceFile; raises MJSyntaxError on any violation."""
    return SourceFile(path, parse_unit(text, path))
