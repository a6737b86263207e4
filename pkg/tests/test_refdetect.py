from collections import Counter

import pytest

from mjgen import case, random_program
from refweave.lang import ElementId, build_program, parse_file
from refweave.lang.program import method_id
from refweave.pipeline import parse_tree
from refweave.refdetect import detect_along, detect_between, jaccard
from refweave.refmodel import Refactoring, RefactoringKind as K
from refweave.refops import apply


def program(src, path="a/A.mj"):
    return build_program([parse_file(path, src)])[0]


def test_motivating_left(motivating):
    base, left = parse_tree(motivating.base), parse_tree(motivating.left)
    got = detect_between(base, left)
    assert [r.kind for r in got] == [K.RenameClass, K.ExtractMethod]
    assert (got[0].before, got[0].after) == (ElementId("Class", "reader.Listen"), ElementId("Class", "reader.Read"))
    ex = got[1]
    assert ex.before == method_id("scanner.Scanner", "addListener", ("Object",))
    assert ex.after == method_id("scanner.Scanner", "validateObject", ("Object",))
    assert ex.stmt_range == (0, 1)


def test_motivating_right(motivating):
    base, right = parse_tree(motivating.base), parse_tree(motivating.right)
    got = detect_between(base, right)
    assert got == [
        Refactoring(K.MoveClass, ElementId("Class", "reader.Listen"), ElementId("Class", "reader.Reader.Listen")),
        Refactoring(K.RenameMethod, method_id("reader.Reader", "validateReader", ("Object",)),
                    method_id("reader.Reader", "validateObject", ("Object",))),
        Refactoring(K.RenameMethod, method_id("scanner.Scanner", "addReader", ("Object",)),
                    method_id("scanner.Scanner", "scanReader", ("Object",))),
    ]


@pytest.mark.parametrize("seed", [0, 7, 42])
def test_identical_versions(seed):
    v = random_program(seed)
    assert detect_between(v, v) == []


def test_reordered_body_is_not_a_refactoring():
    v1 = program("package a; class A { void m() { x(); y(); } void x() { } void y() { } }")
    v2 = program("package a; class A { void m() { y(); x(); } void x() { } void y() { } }")
    assert detect_between(v1, v2) == []


def test_jaccard():
    assert jaccard(Counter("aab"), Counter("aab")) == 1.0
    assert jaccard(Counter("ab"), Counter("cd")) == 0.0


def test_along_pair_equals_between():
    v0, r = case(K.RenameClass, 3)
    v1 = apply(v0, r)
    assert detect_along([v0, v1]) == detect_between(v0, v1)


def test_along_repeated_version():
    v = random_program(5)
    assert detect_along([v, v, v]) == []


def test_along_rename_chain():
    v0 = program("package a; class A { void foo() { } void use() { foo(); } }")
    foo, bar, foobar = (method_id("a.A", n, ()) for n in ("foo", "bar", "foobar"))
    v1 = apply(v0, Refactoring(K.RenameMethod, foo, bar))
    v2 = apply(v1, Refactoring(K.RenameMethod, bar, foobar))
    got = detect_along([v0, v1, v2])
    assert got == [Refactoring(K.RenameMethod, foo, bar), Refactoring(K.RenameMethod, bar, foobar)]
    assert [r.seq for r in got] == sorted(r.seq for r in got)


def test_along_needs_two_versions():
    with pytest.raises(ValueError):
        detect_along([random_program(1)])
