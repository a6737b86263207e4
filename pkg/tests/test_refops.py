import pytest

from mjgen import case, member_sorted, program_text, random_history, random_program, reuses_package_name
from refweave.interaction import combine
from refweave.lang import ElementId, build_program, find_references, parse_file, print_unit
from refweave.lang.program import method_id
from refweave.pipeline import parse_tree
from refweave.refdetect import detect_between
from refweave.refmodel import MOVE_RENAMES, MOVES, RENAMES, Refactoring, RefactoringKind as K, inverse
from refweave.refops import Collision, ElementMissing, apply, invert_all, replay_all
from refweave.refdetect import detect_along
from refweave.simplify import simplify

LISTEN = "package a;\nclass Listen { int id; }\n"
USER = """package b;
import a.Listen;
class User { Listen l = new Listen(); void go(Listen x) { x.id = 1; } }
"""


def listen_program():
    return build_program([parse_file("a/Listen.mj", LISTEN), parse_file("b/User.mj", USER)])[0]


def test_rename_class_rewrites_references_and_path():
    q = apply(listen_program(), Refactoring(K.RenameClass, ElementId("Class", "a.Listen"), ElementId("Class", "a.Read")))
    assert q.paths == ["a/Read.mj", "b/User.mj"]
    user = print_unit(q.file("b/User.mj").unit)
    assert "Listen" not in user
    assert "import a.Read;" in user and "Read l = new Read();" in user and "void go(Read x)" in user


def test_apply_leaves_input_untouched():
    p = listen_program()
    before = program_text(p)
    apply(p, Refactoring(K.RenameClass, ElementId("Class", "a.Listen"), ElementId("Class", "a.Read")))
    assert program_text(p) == before


def test_motivating_rename_listen(motivating):
    base = parse_tree(motivating.base)
    q = apply(base, Refactoring(K.RenameClass, ElementId("Class", "reader.Listen"), ElementId("Class", "reader.Read")))
    assert q.index.exists(ElementId("Class", "reader.Read"))
    assert not q.index.exists(ElementId("Class", "reader.Listen"))


def test_motivating_inline_restores_host(motivating):
    base, left = parse_tree(motivating.base), parse_tree(motivating.left)
    extract = detect_between(base, left)[1]
    assert extract.kind == K.ExtractMethod
    q = apply(left, inverse(extract))
    host = q.index.methods[method_id("scanner.Scanner", "addListener", ("Object",))].decl
    assert [s.tokens for s in host.body] == [("notNull", "(", "listener", ")"), ("validate", "(", "listener", ")"),
                                             ("register", "(", "listener", ")")]
    assert not q.index.exists(method_id("scanner.Scanner", "validateObject", ("Object",)))


def test_missing_element():
    p = listen_program()
    with pytest.raises(ElementMissing):
        apply(p, Refactoring(K.RenameClass, ElementId("Class", "a.Nope"), ElementId("Class", "a.Read")))


def test_collision():
    src = "package a; class A { void f() { } void g() { } }"
    p = build_program([parse_file("a/A.mj", src)])[0]
    with pytest.raises(Collision):
        apply(p, Refactoring(K.RenameMethod, method_id("a.A", "f", ()), method_id("a.A", "g", ())))


SEEDS = [0, 50, 100, 150, 200, 250]


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize("kind", list(K))
def test_round_trip_and_detection(kind, seed):
    p, r = case(kind, seed)
    q = apply(p, r)
    assert apply(q, inverse(r)) == p
    assert detect_between(p, q) == [r]


@pytest.mark.parametrize("kind", sorted(RENAMES | MOVES | MOVE_RENAMES, key=str))
def test_no_dangling_references(kind):
    p, r = case(kind, 11)
    q = apply(p, r)
    assert not q.index.exists(r.before)
    assert all(ref.target != r.before for ref in q.index.refs)


def test_find_references_follow_rename():
    p, r = case(K.RenameMethod, 3)
    n = len(find_references(p, r.before))
    assert len(find_references(apply(p, r), r.after)) == n


def test_invert_all_empty():
    p = random_program(2)
    q, logbook = invert_all(p, [])
    assert q is p and logbook.entries == []


def test_replay_all_empty():
    p = random_program(2)
    q, logbook = replay_all(p, [])
    assert q is p and logbook.entries == []


def test_invert_skips_element_deleted_later():
    p = listen_program()
    ghost = Refactoring(K.RenameClass, ElementId("Class", "a.Gone"), ElementId("Class", "a.Ghost"))
    q, logbook = invert_all(p, [ghost])
    assert q == p
    (entry,) = logbook.entries
    assert not entry.applied and "missing" in entry.reason


@pytest.mark.parametrize("seed", range(60))
def test_batch_coherence(seed):
    chain, _ = random_history(seed)
    if reuses_package_name(chain):
        pytest.skip("package name reused after it vanished")
    final = chain[-1]
    refs = simplify(detect_along(chain)).refs
    inverted, inv_log = invert_all(final, refs)
    if inv_log.failures:
        pytest.skip("history touches an element the branch created")
    replayed, rep_log = replay_all(inverted, combine(inverted, refs, []).replay.refs)
    # a package emptied by an earlier replayed move has nothing left to rename
    assert all(e.refactoring.kind == K.RenamePackage for e in rep_log.failures)
    assert member_sorted(replayed) == member_sorted(final)
