import json
import shutil

import pytest

from refweave import cli
from refweave.harness import (BASELINE, CHANGED, RESOLVED, TIMEOUT, UNCHANGED, LayoutError, ScenarioReport, bench,
                              compare, diff_count, load_scenario, read_manifest, render_table, run_scenario,
                              summarize, write_jsonl)
from refweave.textmerge import ConflictMetrics


def rep(files, blocks, loc, ref_conflicts=0, tool="refweave", status=BASELINE):
    return ScenarioReport("s", tool, ConflictMetrics(files, blocks, loc), ref_conflicts, status)


def test_worked_reduction_example():
    c = compare(rep(4, 4, 10, tool="plain"), rep(2, 2, 5))
    assert c.pct["files"] == pytest.approx(50.0)
    assert c.direction["files"] == "reduced"
    assert c.status == CHANGED


def test_increase_is_negative():
    c = compare(rep(2, 2, 2, tool="plain"), rep(5, 5, 5))
    assert c.pct["files"] == pytest.approx(-150.0) and c.direction["loc"] == "increased"


def test_statuses():
    base = rep(1, 2, 3, tool="plain")
    assert compare(base, rep(1, 2, 3)).status == UNCHANGED
    assert compare(base, rep(0, 0, 0)).status == RESOLVED
    assert compare(base, rep(0, 0, 0, ref_conflicts=1)).status == CHANGED
    assert compare(base, rep(1, 1, 3)).status == CHANGED
    assert compare(base, rep(0, 0, 0, status=TIMEOUT)).status == TIMEOUT
    zero = rep(0, 0, 0, tool="plain")
    assert compare(zero, rep(0, 0, 0)).status == UNCHANGED
    assert compare(zero, rep(1, 1, 2)).pct["files"] is None


def test_diff_count():
    assert diff_count({"a": "x\ny\n"}, {"a": "x\ny\n"}) == 0
    assert diff_count({"a": "x\ny\n"}, {"a": "x\nz\n"}) == 2
    assert diff_count({}, {"b": "1\n2\n"}) == 2


def test_load_errors(tmp_path):
    with pytest.raises(LayoutError):
        load_scenario(tmp_path / "nope")
    (tmp_path / "base").mkdir()
    with pytest.raises(LayoutError):
        load_scenario(tmp_path)
    (tmp_path / "manifest.txt").write_text("no equals sign\n")
    with pytest.raises(LayoutError):
        read_manifest(tmp_path / "manifest.txt")


def test_load_commits(corpus):
    sc = load_scenario(corpus / "extract-twice-large")
    assert sc.id == "extract-twice-large" and len(sc.left_commits) == 1 and sc.right_commits is None


def test_run_scenario(corpus):
    plain = run_scenario(corpus / "motivating", "plain")
    ours = run_scenario(corpus / "motivating", "refweave")
    assert plain.status == BASELINE and plain.metrics.as_tuple() == (2, 2, 6)
    assert ours.metrics.as_tuple() == (0, 0, 0) and ours.ref_conflicts == 1
    assert ours.status == CHANGED
    assert ours.deltas["files"] == {"direction": "reduced", "pct": 100.0}
    with pytest.raises(ValueError):
        run_scenario(corpus / "motivating", "git")


def test_bench_and_report(tmp_path, corpus):
    for name in ("motivating", "transmute-rename"):
        shutil.copytree(corpus / name, tmp_path / "c" / name)
    reports = bench(tmp_path / "c", ["plain", "refweave"])
    assert [(r.id, r.tool) for r in reports] == [("motivating", "plain"), ("motivating", "refweave"),
                                                ("transmute-rename", "plain"), ("transmute-rename", "refweave")]
    assert reports[3].status == RESOLVED
    out = tmp_path / "out.jsonl"
    write_jsonl(reports, out)
    rows = [json.loads(x) for x in out.read_text().splitlines()]
    assert rows[0]["metrics"] == {"files": 2, "blocks": 2, "loc": 6}
    totals = summarize(reports)
    assert totals["refweave"][RESOLVED] == 1 and totals["plain"]["scenarios"] == 2
    assert "motivating" in render_table(reports)


def test_bench_parallel_matches_serial(corpus):
    serial = bench(corpus / "fallback", ["plain", "refweave"])
    parallel = bench(corpus / "fallback", ["plain", "refweave"], jobs=2)
    strip = [(r.id, r.tool, r.metrics, r.status) for r in serial]
    assert strip == [(r.id, r.tool, r.metrics, r.status) for r in parallel]


# command line

def test_cli_detect(corpus, capsys):
    assert cli.main(["detect", str(corpus / "motivating" / "base"), str(corpus / "motivating" / "left")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert [ln.split()[0] for ln in lines] == ["RenameClass", "ExtractMethod"]


def test_cli_merge_exit_codes(corpus, tmp_path, capsys):
    assert cli.main(["merge", str(corpus / "motivating"), "--plain"]) == 1
    assert cli.main(["merge", str(corpus / "fallback" / "body-edits-disjoint")]) == 0
    assert cli.main(["merge", str(corpus / "fallback" / "body-edits-overlap")]) == 1
    assert cli.main(["merge", str(corpus / "transmute-rename"), "--out", str(tmp_path / "m")]) == 0
    assert (tmp_path / "m" / "tablet" / "Inventory.mj").is_file()
    assert "METRICS files=0" in (tmp_path / "m.report.txt").read_text()
    assert cli.main(["merge", str(tmp_path / "missing")]) == 2
    assert cli.main(["merge", str(corpus / "motivating"), "--timeout-secs", "0"]) == 2
    capsys.readouterr()


def test_cli_bench_writes_report_and_figures(corpus, tmp_path, capsys):
    shutil.copytree(corpus / "motivating", tmp_path / "c" / "motivating")
    report = tmp_path / "out.jsonl"
    assert cli.main(["bench", str(tmp_path / "c"), "--tools", "plain,refweave", "--report", str(report)]) == 0
    assert len(report.read_text().splitlines()) == 2
    assert (tmp_path / "out_totals.png").stat().st_size > 0
    assert (tmp_path / "out_status.png").stat().st_size > 0
    assert cli.main(["bench", str(tmp_path / "c"), "--tools", "nope"]) == 2
    capsys.readouterr()
