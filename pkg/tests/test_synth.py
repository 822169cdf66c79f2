import hashlib
from pathlib import Path

import pytest
from scipy import stats

from scholarlite.estimation import citation_ratio, spearman
from scholarlite.model import CorpusStore, DocType, Kind
from scholarlite.pipeline import ingest_all
from scholarlite.synth import (
    ConfigError, CorpusConfig, GroundTruth, Selectivity, generate_corpus, generate_reference_db,
    ground_truth_report, write_corpus,
)


def tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(str(p.relative_to(root)).encode())
            h.update(p.read_bytes())
    return h.hexdigest()


def test_same_seed_same_bytes(tmp_path):
    for run in ("a", "b"):
        snaps, truth = generate_corpus(CorpusConfig(seed=42, n_documents=300))
        write_corpus(snaps, truth, tmp_path / run)
    assert tree_digest(tmp_path / "a") == tree_digest(tmp_path / "b")
    snaps, truth = generate_corpus(CorpusConfig(seed=43, n_documents=300))
    write_corpus(snaps, truth, tmp_path / "c")
    assert tree_digest(tmp_path / "a") != tree_digest(tmp_path / "c")


def test_duplicate_groups_accounted():
    _, truth = generate_corpus(CorpusConfig(seed=1, n_documents=1000, duplicate_rate=0.1))
    assert len(truth.version_groups) == 100
    assert all(len(g) >= 2 for g in truth.version_groups)


def test_language_shares_within_multinomial_tolerance():
    shares = {"en": 0.5, "zh_hans": 0.34, "de": 0.1, "ja": 0.06}
    _, truth = generate_corpus(CorpusConfig(seed=2, n_documents=3000, language_shares=shares))
    observed = [truth.per_language.get(k, 0) for k in shares]
    expected = [shares[k] * truth.true_size for k in shares]
    assert sum(observed) == truth.true_size
    assert stats.chisquare(observed, expected).pvalue > 0.001


def test_truth_tables():
    _, truth = generate_corpus(CorpusConfig(seed=3, n_documents=400))
    assert sum(truth.per_year.values()) == truth.true_size == 400
    report = ground_truth_report(truth)
    assert report["per_year.csv"].splitlines()[-1] == "TOTAL,400"
    empty = ground_truth_report(GroundTruth())
    assert all(t.splitlines()[-1] == "TOTAL,0" for t in empty.values())
    assert GroundTruth.from_json(truth.to_json()) == truth


def test_missing_years_go_to_unknown_bucket():
    _, truth = generate_corpus(CorpusConfig(seed=4, n_documents=500, missing_year_rate=0.1))
    assert truth.per_year.get("unknown", 0) > 0
    assert sum(truth.per_year.values()) == 500


@pytest.mark.parametrize("text", [
    "language_shares = en:0.6,fr:0.6",
    "duplicate_rate = 1.5",
    "n_documents = many",
    "colour = blue",
    "language_shares = xx:1.0",
    "year_range = 2010,2000",
])
def test_bad_configs(text):
    with pytest.raises(ConfigError):
        CorpusConfig.from_text(text)


def test_config_text():
    cfg = CorpusConfig.from_text("# demo\nseed = 9\nn_documents=10\nyear_range = 2001..2003\nlanguage_shares = en:0.5,fr:0.5\n")
    assert (cfg.seed, cfg.n_documents, cfg.year_range) == (9, 10, (2001, 2003))
    assert cfg.language_shares == {"en": 0.5, "fr": 0.5}


def test_ingestion_reproduces_true_size(synthetic_2k):
    store, truth, report = synthetic_2k
    assert report.full_records == truth.true_size
    assert report.ingest.rejected == 0


def test_churn_removes_vanished_documents():
    snaps, truth = generate_corpus(CorpusConfig(seed=8, n_documents=600, churn_rate=0.1))
    dates = sorted({s.snapshot_date for s in snaps})
    assert len(dates) == 2
    store = CorpusStore()
    report = ingest_all(snaps, store)
    assert report.ingest.removed > 0
    assert store.count() - report.stubs == truth.true_size
    by_title = {r.title: r for r in store if r.kind is Kind.FULL}
    for work, n in truth.citation_counts().items():
        assert len(by_title[truth.titles[work]].cited_by) == n


# -- reference database -------------------------------------------------------

def test_full_coverage_reference_is_identity(synthetic_2k):
    store, _, _ = synthetic_2k
    ref = generate_reference_db(store, Selectivity(coverage=1.0))
    rows = ref.comparison_rows(store)
    assert len(rows) == store.count() - sum(1 for r in store if r.is_stub)
    assert all(r.citations_a == r.citations_b for r in rows)
    assert citation_ratio(rows) == 1.00


def test_journal_only_reference(synthetic_2k):
    store, _, _ = synthetic_2k
    ref = generate_reference_db(store, Selectivity(journal_only=True))
    assert ref.selected and all(store.get(i).doc_type is DocType.ARTICLE for i in ref.selected)


def test_half_coverage_keeps_rank_order_loosely(synthetic_2k):
    store, _, _ = synthetic_2k
    ref = generate_reference_db(store, Selectivity(coverage=0.5), seed=4)
    rows = ref.comparison_rows(store)
    rs = spearman(rows)
    assert 0.6 < rs < 1.0
    assert citation_ratio(rows) > 1
    with pytest.raises(ValueError):
        Selectivity(coverage=1.5)
