import time
from pathlib import Path

import pytest

from refweave.harness import load_scenario, scenario_dirs
from refweave.interaction import OVERRIDE
from refweave.pipeline import MergeScenario, ScenarioError, parse_tree, plain_merge, refmerge
from refweave.refmodel import RefactoringKind as K
from refweave.textmerge import metrics, parse_conflicts


def test_motivating_reaches_the_ideal_merge(motivating):
    start = time.monotonic()
    out = refmerge(motivating)
    assert time.monotonic() - start < 5
    assert metrics(out.tree).as_tuple() == (0, 0, 0)
    (conflict,) = out.ref_conflicts
    assert conflict.reason == OVERRIDE
    assert {conflict.left.kind, conflict.right.kind} == {K.ExtractMethod, K.RenameMethod}
    assert parse_tree(out.tree.files) == parse_tree(motivating.expected)
    assert not out.clean


def test_motivating_plain(motivating):
    assert metrics(plain_merge(motivating)).as_tuple() == (2, 2, 6)


def test_without_detection_it_is_the_plain_merge(motivating):
    assert refmerge(motivating, detect=False).tree.files == plain_merge(motivating).files


def test_deterministic(motivating):
    a, b = refmerge(motivating), refmerge(motivating)
    assert a.tree.files == b.tree.files and a.report_lines() == b.report_lines()


def test_timeout(motivating):
    out = refmerge(motivating, timeout_secs=0)
    assert out.timed_out and "TIMEOUT" in out.report_lines()


def test_unparseable_input():
    sc = MergeScenario("bad", {"a/A.mj": "package a; class A {"}, {}, {})
    with pytest.raises(ScenarioError):
        refmerge(sc)


def test_non_source_files_merge_as_text():
    base = {"a/A.mj": "package a;\n\nclass A {\n}\n", "notes.txt": "x\n"}
    left = dict(base, **{"notes.txt": "x\ny\n"})
    out = refmerge(MergeScenario("txt", base, left, base))
    assert out.tree.files["notes.txt"] == "x\ny\n" and out.clean


def test_rename_with_delete_modify_is_resolved(corpus):
    sc = load_scenario(corpus / "transmute-rename")
    assert plain_merge(sc).delete_modify
    out = refmerge(sc)
    assert out.clean
    assert "tablet/TransmutationContainer.mj" in out.tree.files
    assert "tablet/TransmuteTabletContainer.mj" not in out.tree.files


FALLBACK = sorted(p.name for p in scenario_dirs(Path(__file__).resolve().parent.parent / "corpus" / "fallback"))


@pytest.mark.parametrize("name", FALLBACK)
def test_fallback_is_byte_identical(corpus, name):
    sc = load_scenario(corpus / "fallback" / name)
    out = refmerge(sc)
    assert out.detected == {"L": [], "R": []}
    assert out.tree.files == plain_merge(sc).files


def test_fallback_corpus_size():
    assert len(FALLBACK) >= 20


# known weaknesses: these assert the documented behavior, not its absence

def test_weakness_moved_member_ordering_conflict(corpus):
    sc = load_scenario(corpus / "ordering-move-field")
    out = refmerge(sc)
    text = out.tree.files["index/IndexResponse.mj"]
    blocks = parse_conflicts(text)
    assert any(any("ID" in ln for ln in b.left_lines) and any("TYPE" in ln for ln in b.right_lines)
               for b in blocks)
    assert metrics(out.tree).conflicting_loc > metrics(plain_merge(sc)).conflicting_loc


def test_weakness_inlined_conflict_twice_as_large(corpus):
    sc = load_scenario(corpus / "extract-twice-large")
    out = refmerge(sc)
    (block,) = out.tree.conflicts
    assert len(block.left_lines) == 3 and len(block.right_lines) == 3
    skipped = [e for e in out.replay.entries if not e.applied]
    assert [e.refactoring.kind for e in skipped] == [K.ExtractMethod]
    assert "conflict markers" in skipped[0].reason
    assert block.loc > metrics(plain_merge(sc)).conflicting_loc
