import itertools
import random
from pathlib import Path


from mjgen import candidates, random_program, same_source_pairs, same_target_pairs
from refweave.interaction import (COMMUTATIVE, CONFLICT, INDEPENDENT, OVERLOAD, OVERRIDE, SAME_SOURCE,
                                  SAME_TARGET, applicable_rules, classify, combine, has_conflict,
                                  is_commutative, overloads, overrides, render_rule_table)
from refweave.lang import ElementId, build_program, parse_file
from refweave.lang.program import method_id
from refweave.pipeline import parse_tree
from refweave.refdetect import detect_between
from refweave.refmodel import Refactoring, RefactoringKind as K, rebase
from refweave.refops import Collision, ElementMissing, apply
from refweave.simplify import BOTTOM_UP, simplify

# hand-declared world for the RenameMethod truth table
WORLD = """package a;
class P { void f(int x) { } void g(int x) { } void o(int x) { } void o(String s) { } }
class S extends P { void f(int x) { } void k(int x) { } void q(String s) { } }
class U { void f(int x) { } void u(int x) { } }
"""
SUPER = {"a.S": "a.P"}
METHODS = [("a.P", "f", ("int",)), ("a.P", "g", ("int",)), ("a.P", "o", ("int",)), ("a.P", "o", ("String",)),
           ("a.S", "f", ("int",)), ("a.S", "k", ("int",)), ("a.S", "q", ("String",)),
           ("a.U", "f", ("int",)), ("a.U", "u", ("int",))]
NAMES = ["z", "y", "f", "o", "k", "g", "q"]


def _related(c1, c2):
    def up(c):
        while c in SUPER:
            c = SUPER[c]
            yield c
    return c1 in up(c2) or c2 in up(c1)


def oracle_overrides(m1, m2):
    (c1, n1, p1), (c2, n2, p2) = m1, m2
    return _related(c1, c2) and n1 == n2 and p1 == p2


def oracle_overloads(m1, m2):
    (c1, n1, p1), (c2, n2, p2) = m1, m2
    return c1 == c2 and n1 == n2 and p1 != p2


def rename_pair_conflict(m1, m2, m3, m4):
    """The RenameMethod x RenameMethod conflict predicate, evaluated directly."""
    return ((m1 == m3 and m2 != m4) or (m1 != m3 and m2 == m4)
            or (not oracle_overrides(m1, m3) and oracle_overrides(m2, m4))
            or (not oracle_overloads(m1, m3) and oracle_overloads(m2, m4)))


def _renames():
    existing = set(METHODS)
    for c, n, p in METHODS:
        for name in NAMES:
            target = (c, name, p)
            if name != n and target not in existing:
                yield (c, n, p), target


def _rm(src, dst, branch):
    return Refactoring(K.RenameMethod, method_id(*src), method_id(*dst), branch=branch)


def test_rename_method_truth_table():
    base = build_program([parse_file("a/P.mj", WORLD)])[0]
    renames = list(_renames())
    seen = set()
    for (m1, m2), (m3, m4) in itertools.product(renames, renames):
        got = has_conflict(base, _rm(m1, m2, "L"), _rm(m3, m4, "R"))
        assert (got is not None) == rename_pair_conflict(m1, m2, m3, m4), (m1, m2, m3, m4, got)
        seen.add((m1 == m3, m2 == m4, oracle_overrides(m2, m4), oracle_overloads(m2, m4)))
    # identical renames, plus every combination a rename pair can reach
    assert seen >= {(True, True, False, False), (True, False, False, False), (False, True, False, False),
                    (False, False, True, False), (False, False, False, True), (False, False, False, False)}


def test_override_pair_renamed_together_is_fine():
    base = build_program([parse_file("a/P.mj", WORLD)])[0]
    r1 = _rm(("a.P", "f", ("int",)), ("a.P", "z", ("int",)), "L")
    r2 = _rm(("a.S", "f", ("int",)), ("a.S", "z", ("int",)), "R")
    assert has_conflict(base, r1, r2) is None


ONE = "package a; class A { void foo(int x) { } void goo(String y) { } }"


def test_same_source_different_target():
    base = build_program([parse_file("a/A.mj", ONE)])[0]
    foo = method_id("a.A", "foo", ("int",))
    r1 = Refactoring(K.RenameMethod, foo, foo.with_name("bar"))
    r2 = Refactoring(K.RenameMethod, foo, foo.with_name("baz"), branch="R")
    assert has_conflict(base, r1, r2) == SAME_SOURCE


def test_accidental_overload():
    base = build_program([parse_file("a/A.mj", ONE)])[0]
    foo, goo = method_id("a.A", "foo", ("int",)), method_id("a.A", "goo", ("String",))
    r1 = Refactoring(K.RenameMethod, foo, foo.with_name("same"))
    r2 = Refactoring(K.RenameMethod, goo, goo.with_name("same"), branch="R")
    assert has_conflict(base, r1, r2) == OVERLOAD


def test_identical_refactoring_is_not_a_conflict():
    base = build_program([parse_file("a/A.mj", ONE)])[0]
    foo = method_id("a.A", "foo", ("int",))
    r = Refactoring(K.RenameMethod, foo, foo.with_name("bar"))
    assert has_conflict(base, r, Refactoring(K.RenameMethod, foo, foo.with_name("bar"), branch="R")) is None
    replay, pairs = combine(base, [r], [Refactoring(K.RenameMethod, foo, foo.with_name("bar"), branch="R")])
    assert list(replay) == [r] and pairs == []
    # the brute-force check: replaying the combined list equals one branch applied once
    assert apply(base, replay[0]) == apply(base, r)


def test_predicates():
    src = "package a; class A { void f(int x) { } void f(String s) { } } class B extends A { void f(int x) { } }"
    p = build_program([parse_file("a/A.mj", src)])[0]
    af, afs, bf = method_id("a.A", "f", ("int",)), method_id("a.A", "f", ("String",)), method_id("a.B", "f", ("int",))
    assert overrides(p, af, bf) and not overloads(p, af, bf)
    assert overloads(p, af, afs) and not overrides(p, af, afs)
    q = build_program([parse_file("a/A.mj", "package a; class A { void f(int x) { } } class C { void f(int x) { } }")])[0]
    cf = method_id("a.C", "f", ("int",))
    assert not overrides(q, method_id("a.A", "f", ("int",)), cf)
    assert not overloads(q, method_id("a.A", "f", ("int",)), cf)


def test_commutative_examples():
    m = method_id("a.A", "m", ())
    move = Refactoring(K.MoveMethod, m, method_id("a.B", "m", ()))
    ren = Refactoring(K.RenameMethod, m, m.with_name("n"), branch="R")
    assert is_commutative(move, ren)
    other = Refactoring(K.RenameMethod, method_id("a.A", "k", ()), method_id("a.A", "j", ()), branch="R")
    assert not is_commutative(ren, other)


def _motivating_lists(motivating):
    base = parse_tree(motivating.base)
    left = [r for r in detect_between(base, parse_tree(motivating.left))]
    right = [Refactoring(r.kind, r.before, r.after, r.stmt_range, r.binding, r.classes, "R", r.seq)
             for r in detect_between(base, parse_tree(motivating.right))]
    return base, simplify(left).refs, simplify(right).refs


def test_motivating_move_and_rename_commute(motivating):
    base, left, right = _motivating_lists(motivating)
    rename = next(r for r in left if r.kind == K.RenameClass)
    move = next(r for r in right if r.kind == K.MoveClass)
    assert classify(base, rename, move).verdict == COMMUTATIVE


def test_motivating_combine(motivating):
    base, left, right = _motivating_lists(motivating)
    combined = combine(base, left, right)
    replay, pairs = combined
    assert replay.order == BOTTOM_UP
    assert [(str(r.kind), str(r.before), str(r.after)) for r in replay] == [
        ("RenameMethod", "Method:scanner.Scanner.addReader(Object)", "Method:scanner.Scanner.scanReader(Object)"),
        ("MoveAndRenameClass", "Class:reader.Listen", "Class:reader.Reader.Read"),
    ]
    (pair,) = pairs
    assert pair.verdict == CONFLICT and pair.reason == OVERRIDE
    assert pair.left.kind == K.ExtractMethod and pair.right.kind == K.RenameMethod
    assert str(pair).startswith("REF_CONFLICT AccidentalOverride L: ExtractMethod")


def test_combine_with_empty_right():
    p = random_program(4)
    left = candidates(p, 4, tries=1)[:3]
    replay, pairs = combine(p, left, [])
    assert sorted(map(str, replay)) == sorted(map(str, left)) and pairs == []
    assert [r.level for r in replay] == sorted((r.level for r in replay), reverse=True)


def _pair_verdicts(seeds):
    for seed in seeds:
        p = random_program(seed)
        refs = candidates(p, seed)
        pairs = list(same_source_pairs(refs)) + same_target_pairs(p, random.Random(seed))
        for a, b in pairs:
            yield p, a, b, classify(p, a, b)


def commutativity_oracle(seeds):
    """Counts of checked commutative and conflicting pairs; raises on any violation."""
    commutative = conflicting = 0
    for p, a, b, v in _pair_verdicts(seeds):
        # one verdict per pair, and a reason exactly for conflicts
        assert v.verdict in (CONFLICT, COMMUTATIVE, INDEPENDENT)
        assert (v.reason is not None) == (v.verdict == CONFLICT)
        if v.verdict == COMMUTATIVE:
            assert apply(apply(p, a), rebase(b, a)) == apply(apply(p, b), rebase(a, b)), (str(a), str(b))
            commutative += 1
        elif v.verdict == CONFLICT and v.reason in (SAME_SOURCE, SAME_TARGET):
            failures = 0
            for r1, r2 in ((a, b), (b, a)):
                try:
                    apply(apply(p, r1), r2)
                except (ElementMissing, Collision):
                    failures += 1
            assert failures > 0, (str(a), str(b))
            conflicting += 1
    return commutative, conflicting


def test_commutativity_oracle():
    commutative, conflicting = commutativity_oracle(range(12))
    assert commutative > 50 and conflicting > 50


def test_rule_table_covers_observed_conflicts():
    for p, a, b, v in _pair_verdicts(range(8)):
        if v.verdict == CONFLICT:
            assert v.reason in applicable_rules(a.kind, b.kind), (str(a), str(b), v.reason)


def test_rule_table_shape():
    assert applicable_rules(K.RenameMethod, K.RenameMethod) == (SAME_SOURCE, SAME_TARGET, OVERRIDE, OVERLOAD)
    assert applicable_rules(K.RenameClass, K.RenameMethod) == ()
    assert applicable_rules(K.InlineMethod, K.RenameMethod) == (SAME_SOURCE,)


def test_rule_table_doc_is_current():
    doc = Path(__file__).resolve().parent.parent / "docs" / "interaction_rules.md"
    assert doc.read_text() == render_rule_table()


def test_independent_verdict():
    p = build_program([parse_file("a/A.mj", ONE)])[0]
    foo, goo = method_id("a.A", "foo", ("int",)), method_id("a.A", "goo", ("String",))
    v = classify(p, Refactoring(K.RenameMethod, foo, foo.with_name("x")),
                 Refactoring(K.RenameMethod, goo, goo.with_name("w"), branch="R"))
    assert v.verdict == INDEPENDENT
    assert ElementId("Class", "a.A") == ElementId.parse("Class:a.A")
