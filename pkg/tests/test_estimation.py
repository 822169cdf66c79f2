import json
import random
from datetime import date
from decimal import Decimal

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from conftest import full, store_of, stub, version
from oracles import spearman_hand
from scholarlite.estimation import (
    ComparisonRow, NegativeSpeed, NoOverlap, SizeEstimate, citation_ratio, combine_components, doc_type_distribution,
    estimate_absurd, estimate_capture_recapture, estimate_domain_sum, estimate_language_proportion,
    estimate_year_query, indexing_speed, indexing_speed_report, language_distribution, method_correlation, pearson,
    percent_table, size_report, speed_from_ages, spearman,
)
from scholarlite.model import CorpusStore, DocType, Kind, Language, SourceType
from scholarlite.pipeline import ingest_all
from scholarlite.query import NoiseModel, SearchEngine
from scholarlite.synth import CorpusConfig, generate_corpus


def rows(pairs):
    return [ComparisonRow(f"r{i}", a, b) for i, (a, b) in enumerate(pairs)]


# -- size estimators ------------------------------------------------------------

def test_absurd_counts_year_stamped_records(synthetic_2k):
    store, truth, _ = synthetic_2k
    est = estimate_absurd(SearchEngine(store), include_citations=False)
    assert est.value == truth.true_size == sum(truth.per_year.values())
    assert {str(k): v for k, v in est.per_bucket.items() if v} == {k: v for k, v in truth.per_year.items() if v}


def test_absurd_reports_yearless_shortfall():
    s = store_of(full("a", year=2010), full("b", year=None))
    est = estimate_absurd(SearchEngine(s))
    assert est.value == 1 and est.per_bucket == {2010: 1}
    assert any("no publication year" in d for d in est.diagnostics)


def test_year_query_equals_absurd_without_excluded_domain():
    s = store_of(full("a", year=2010), full("b", year=2012), stub("s", year=2011))
    eng = SearchEngine(s)
    assert estimate_year_query(eng).per_bucket == estimate_absurd(eng).per_bucket == {2010: 1, 2011: 1, 2012: 1}


def test_component_sum_and_printed_total():
    est = combine_components({"sources": 184_001_450, "citations": 134_160_570, "patents": 13_742_920}, 330_804_940)
    assert est.value == 331_904_940
    report = size_report(est)
    assert "331,904,940" in report and "330,804,940" in report
    assert combine_components({"a": 1, "b": 2}, 3).diagnostics == []


def test_domain_sum_primary_only():
    r = full("a", urls=("https://x.org/a",)).replace(
        versions=(version("https://x.org/a"), version("https://y.edu/a", stype=SourceType.REPOSITORY)))
    eng = SearchEngine(store_of(r))
    assert estimate_domain_sum(eng, [".edu"]).value == 0
    est = estimate_domain_sum(eng, ["org", "edu"])
    assert est.value == 1 and est.per_bucket == {".org": 1, ".edu": 0}
    assert any("primary" in d for d in est.diagnostics)
    assert estimate_domain_sum(SearchEngine(CorpusStore()), ["com"]).value == 0
    with pytest.raises(ValueError):
        estimate_domain_sum(eng, ["edu", ".EDU"])


def test_domain_sum_exhaustive_equals_full_records(synthetic_2k):
    store, truth, _ = synthetic_2k
    est = estimate_domain_sum(SearchEngine(store), truth.tlds)
    assert est.value == truth.true_size == sum(truth.per_primary_tld.values())


def test_capture_recapture_closed_form():
    a = {f"x{i}" for i in range(50)}
    b = {f"x{i}" for i in range(30, 70)}
    assert estimate_capture_recapture(a, b).value == 100
    same = {f"x{i}" for i in range(10)}
    assert estimate_capture_recapture(same, same).value == 10
    with pytest.raises(NoOverlap, match="no-overlap"):
        estimate_capture_recapture({"a"}, {"b"})
    assert estimate_capture_recapture({"a"}, {"b"}, chapman=True).value == 3


def test_language_proportion():
    recs = [full(f"e{i}") for i in range(65)] + [full(f"f{i}", language=Language.FR) for i in range(35)]
    eng = SearchEngine(store_of(*recs))
    assert estimate_language_proportion(eng, Language.EN, 0.65).value == 100
    assert estimate_language_proportion(eng, Language.EN, 1.0).value == 65
    with pytest.raises(ValueError):
        estimate_language_proportion(eng, Language.JA, 0.1)


def test_language_proportion_recovers_truth(synthetic_2k):
    store, truth, _ = synthetic_2k
    eng = SearchEngine(store)
    en_full = sum(1 for r in store if r.kind is Kind.FULL and r.language is Language.EN)
    en_all = sum(1 for r in store if r.language is Language.EN)
    # stubs carry no language, so the English count is the full-record count
    assert en_full == en_all == truth.per_language["en"]
    total = truth.true_size + sum(1 for r in store if r.is_stub)
    share = truth.per_language["en"] / total
    assert estimate_language_proportion(eng, Language.EN, share).value == total


def test_size_estimate_serialisation():
    est = SizeEstimate("year_query", 3, {2010: 1, 2011: 2})
    assert json.loads(est.to_json()) == {"method": "year_query", "value": 3, "per_bucket": {"2010": 1, "2011": 2},
                                         "diagnostics": []}
    assert est.to_csv().splitlines() == ["bucket,count", "2010,1", "2011,2", "TOTAL,3"]
    with pytest.raises(ValueError):
        SizeEstimate("guess", 1)


# -- correlation ---------------------------------------------------------------

def test_correlation_basics():
    a = SizeEstimate("year_query", 6, {1: 1, 2: 2, 3: 3})
    b = SizeEstimate("year_query", 12, {1: 2, 2: 4, 3: 6})
    flat = SizeEstimate("year_query", 6, {1: 2, 2: 2, 3: 2})
    m = method_correlation([a, a, b, flat])
    assert m[0][1] == pytest.approx(1.0) and m[0][2] == pytest.approx(1.0)
    assert m[0][3] is None and m[3][3] is None
    assert all(m[i][j] == m[j][i] for i in range(4) for j in range(4))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=3, max_size=30))
def test_pearson_and_spearman_agree_with_scipy(pairs):
    xs, ys = [p[0] for p in pairs], [p[1] for p in pairs]
    mine = pearson(xs, ys)
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        assert mine is None
        assert spearman(rows(pairs)) is None
        return
    assert mine == pytest.approx(stats.pearsonr(xs, ys)[0], abs=1e-9)
    assert spearman(rows(pairs)) == pytest.approx(stats.spearmanr(xs, ys)[0], abs=1e-9)


def test_spearman_examples():
    assert spearman(rows([(1, 10), (2, 20), (3, 30)])) == pytest.approx(1.0)
    assert spearman(rows([(1, 3), (2, 2), (3, 1)])) == pytest.approx(-1.0)
    assert spearman(rows([(1, 2), (2, 1), (3, 3)])) == pytest.approx(0.5) == spearman_hand([1, 2, 3], [2, 1, 3])
    with pytest.raises(ValueError):
        spearman(rows([(1, 1)]))


def test_citation_ratio():
    assert citation_ratio(rows([(42_600_000, 27_600_000)])) == 1.54
    assert citation_ratio(rows([(80_800_000, 44_900_000)])) == 1.80
    assert citation_ratio(rows([(5, 5), (1, 1)])) == 1.00
    assert citation_ratio(rows([(1, 8)])) == 0.13  # 0.125 rounds half up
    with pytest.raises(ZeroDivisionError):
        citation_ratio(rows([(3, 0)]))


# -- indexing speed --------------------------------------------------------

def test_indexing_speed():
    assert speed_from_ages(58, 56) == 2
    assert speed_from_ages(6, 3) == 3
    assert indexing_speed(date(2017, 3, 20), date(2017, 3, 20)) == 0
    assert indexing_speed(date(2017, 2, 27), date(2017, 2, 28)) == 1
    with pytest.raises(NegativeSpeed, match="negative-speed"):
        indexing_speed(date(2017, 3, 2), date(2017, 3, 1))
    with pytest.raises(ValueError, match="negative-speed"):
        speed_from_ages(3, 6)


def test_indexing_speed_report():
    text = indexing_speed_report([("3", 58, 56), ("6", 27, None)])
    assert text.splitlines() == [
        "item,online_age,days_since_index,index_speed,margin_days", "3,58,56,2,+-2", "6,27,,,"]


# -- coverage tables -------------------------------------------------------

def test_percent_table_rounding():
    assert percent_table({"en": 1}) == [("en", 1, Decimal("100.00"))]
    assert percent_table({"a": 1, "b": 7}) == [("a", 1, Decimal("12.50")), ("b", 7, Decimal("87.50"))]
    assert percent_table({"a": 0}) == [("a", 0, Decimal(0))]


def test_language_distribution_matches_planted():
    # patents are excluded from the distribution, so plant none
    snaps, truth = generate_corpus(CorpusConfig(seed=5, n_documents=800, type_shares={"article": 0.7, "thesis": 0.3}))
    store = CorpusStore()
    ingest_all(snaps, store)
    table = language_distribution(SearchEngine(store))
    got = {lang: n for lang, n, _ in table if n}
    assert got == {k: v for k, v in truth.per_language.items() if v}
    assert sum(n for _, n, _ in table) == truth.true_size


def test_doc_type_distribution(synthetic_2k):
    two_and_one = [full("a"), full("b"), full("c", doc_type=DocType.UNKNOWN)]
    counts = doc_type_distribution(two_and_one)
    assert {k: v for k, v in counts.items() if v} == {"article": 2, "unknown": 1}
    assert set(doc_type_distribution([]).values()) == {0}
    store, truth, _ = synthetic_2k
    planted = doc_type_distribution(r for r in store if r.kind is Kind.FULL)
    assert {k: v for k, v in planted.items() if v} == {k: v for k, v in truth.per_type.items() if v}


def test_rounded_noise_correlates_with_exact(synthetic_2k):
    store, _, _ = synthetic_2k
    exact = estimate_absurd(SearchEngine(store))
    noisy = estimate_absurd(SearchEngine(store, noise=NoiseModel(1)))
    r = method_correlation([exact, noisy])[0][1]
    assert r == pytest.approx(np.corrcoef(list(exact.per_bucket.values()), list(noisy.per_bucket.values()))[0, 1])
    assert any("noise" in d for d in noisy.diagnostics)
