import csv
import io
import json
from collections import Counter

import pytest

from scholarlite.cli import EXIT_DATA, EXIT_OK, EXIT_UNDEFINED, EXIT_USAGE, main
from test_synth import tree_digest


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    (root / "gen.cfg").write_text("seed = 21\nn_documents = 1200\n")
    assert main(["generate", str(root / "gen.cfg"), "--out", str(root / "syn")]) == EXIT_OK
    corpus = root / "corpus.jsonl"
    assert main(["--corpus", str(corpus), "ingest", str(root / "syn" / "snapshots")]) == EXIT_OK
    return root, corpus


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_generate_bad_config(tmp_path, capsys):
    (tmp_path / "bad.cfg").write_text("duplicate_rate = 2\n")
    code, out, err = run(capsys, "generate", tmp_path / "bad.cfg", "--out", tmp_path / "x")
    assert code != 0 and "duplicate_rate" in err and out == ""


def test_generate_same_seed_reproduces_files(tmp_path, capsys):
    (tmp_path / "g.cfg").write_text("n_documents = 200\n")
    for d in ("a", "b"):
        assert run(capsys, "generate", tmp_path / "g.cfg", "--seed", 5, "--out", tmp_path / d)[0] == EXIT_OK
    assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")


def test_ingest_empty_dir(tmp_path, capsys):
    (tmp_path / "empty").mkdir()
    code, out, _ = run(capsys, "--corpus", tmp_path / "c.jsonl", "ingest", tmp_path / "empty")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["added"] == 0 and report["full_records"] == 0


def test_ingest_unreadable(tmp_path, capsys):
    code, out, err = run(capsys, "--corpus", tmp_path / "c.jsonl", "ingest", tmp_path / "missing")
    assert code == EXIT_DATA and out == "" and err


def test_ingest_rerun_is_idempotent(workspace, capsys):
    root, corpus = workspace
    before = corpus.read_text()
    code, out, _ = run(capsys, "--corpus", corpus, "ingest", root / "syn" / "snapshots")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["added"] == 0 and report["removed"] == 0 and report["updated"] == 0
    assert corpus.read_text() == before


def test_ingest_counts_match_truth(workspace, capsys):
    root, corpus = workspace
    code, out, _ = run(capsys, "--corpus", corpus, "--output-dir", root / "rep", "report", root / "syn" / "truth")
    assert code == EXIT_OK
    for row in csv.DictReader(io.StringIO(out)):
        assert row["truth"] == row["observed"], row


def test_query_page_sizes(workspace, capsys):
    _, corpus = workspace
    code, out, _ = run(capsys, "--corpus", corpus, "query", "")
    lines = out.splitlines()
    assert code == EXIT_OK and len(lines) == 10
    assert set(json.loads(lines[0])) == {"record_id", "title", "year", "citations", "primary_url"}
    _, out, _ = run(capsys, "--corpus", corpus, "query", "", "--pagesize", 20)
    assert len(out.splitlines()) == 20
    assert run(capsys, "--corpus", corpus, "query", "", "--pagesize", 15)[0] == EXIT_USAGE


def test_query_past_cap(workspace, capsys):
    _, corpus = workspace
    code, out, _ = run(capsys, "--corpus", corpus, "query", "", "--page", 100)
    assert code == EXIT_OK and out == ""


def test_query_parse_error(workspace, capsys):
    _, corpus = workspace
    code, out, err = run(capsys, "--corpus", corpus, "query", "web year:abc")
    assert code == EXIT_USAGE and out == "" and "position 9" in err


def test_estimate_no_overlap(workspace, tmp_path, capsys):
    _, corpus = workspace
    (tmp_path / "a.txt").write_text("r0000001\nr0000002\n")
    (tmp_path / "b.txt").write_text("r0000003\n")
    code, out, err = run(capsys, "--corpus", corpus, "--output-dir", tmp_path, "estimate", "capture_recapture",
                         "--sample-a", tmp_path / "a.txt", "--sample-b", tmp_path / "b.txt")
    assert code == EXIT_UNDEFINED and "no-overlap" in err and out == ""


def test_estimate_writes_reports(workspace, tmp_path, capsys):
    _, corpus = workspace
    code, out, _ = run(capsys, "--corpus", corpus, "--output-dir", tmp_path, "estimate", "absurd", "--no-citations")
    assert code == EXIT_OK
    est = json.loads(out)
    assert est["value"] == 1200
    assert json.loads((tmp_path / "estimate_absurd_query.json").read_text()) == est
    assert (tmp_path / "estimate_absurd_query.csv").read_text().splitlines()[-1] == "TOTAL,1200"


def test_estimate_components_reports_mismatch(tmp_path, capsys):
    code, out, err = run(capsys, "--corpus", tmp_path / "none.jsonl", "--output-dir", tmp_path, "estimate", "components",
                         "--component", "sources=184,001,450", "--component", "citations=134,160,570",
                         "--component", "patents=13,742,920", "--printed-total", "330,804,940")
    assert code == EXIT_OK and json.loads(out)["value"] == 331_904_940
    assert "330,804,940" in err


def test_unknown_method(capsys):
    code, _, err = run(capsys, "estimate", "tea_leaves")
    assert code == EXIT_USAGE and "invalid choice" in err


def test_gsm_rows_per_language(workspace, tmp_path, capsys):
    root, corpus = workspace
    code, out, _ = run(capsys, "--corpus", corpus, "--output-dir", tmp_path, "gsm", 2017,
                       "--categories", root / "syn" / "truth" / "truth.json")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    per_lang = Counter(r["language"] for r in rows if not r["category"])
    assert all(n <= 100 for n in per_lang.values())
    assert all(n <= 20 for n in Counter(r["category"] for r in rows if r["category"]).values())
    assert (tmp_path / "gsm_2017.csv").read_text() == out


def test_profile_unknown_author(workspace, capsys):
    _, corpus = workspace
    code, out, _ = run(capsys, "--corpus", corpus, "profile", "Nobody", "Q")
    prof = json.loads(out)
    assert code == EXIT_OK and prof["publications"] == 0 and prof["h_all"] == 0 and prof["citations_all"] == 0


def test_compare(workspace, tmp_path, capsys):
    _, corpus = workspace
    code, out, _ = run(capsys, "--corpus", corpus, "--output-dir", tmp_path, "compare", "--coverage", 1)
    summary = json.loads(out)
    assert code == EXIT_OK and summary["ratio"] == 1.0 and summary["spearman"] == pytest.approx(1.0)


def test_config_file_from_environment(workspace, tmp_path, capsys, monkeypatch):
    _, corpus = workspace
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"corpus_path = {corpus}\noutput_dir = {tmp_path / 'out'}\nnoise_model = rounded(1)\n")
    monkeypatch.setenv("SCHOLARLITE_CONFIG", str(cfg))
    code, out, _ = run(capsys, "estimate", "domain_sum")
    assert code == EXIT_OK
    assert (tmp_path / "out" / "estimate_domain_sum.json").exists()
    assert all(str(v).rstrip("0") in "123456789" for v in json.loads(out)["per_bucket"].values() if v)


def test_bad_run_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("relevance_weights = -1,0.5\n")
    assert run(capsys, "--config", cfg, "profile", "X")[0] == EXIT_USAGE
    cfg.write_text("colour = red\n")
    assert run(capsys, "--config", cfg, "profile", "X")[0] == EXIT_USAGE
