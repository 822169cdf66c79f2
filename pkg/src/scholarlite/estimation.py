"""Size estimators, correlation and comparison statistics, coverage reports.

Each estimator drives a :class:`~scholarlite.query.SearchEngine` the way an
outside observer would drive a real search engine, so its output can be
scored against the store's exact counts.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, field
from datetime import date
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Sequence

from .model import DocType, DocumentRecord, Kind, Language
from .query import Query, SearchEngine

NONEXISTENT_DOMAIN = "fsdfsdsdh.info"
INDEX_DATE_MARGIN_DAYS = 2

METHODS = ("absurd_query", "year_query", "domain_sum", "capture_recapture", "language_proportion")


class NoOverlap(ValueError):
    def __init__(self):
        super().__init__("no-overlap: the two samples share no record, estimator undefined")


class NegativeSpeed(ValueError):
    def __init__(self, online: date, indexed: date):
        super().__init__(f"negative-speed: indexed {indexed} before online {online}")


@dataclass
class SizeEstimate:
    method: str
    value: int
    per_bucket: dict | None = None
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown estimator {self.method!r}")
        if self.value < 0:
            raise ValueError("estimate must be >= 0")

    def to_json(self) -> str:
        buckets = None if self.per_bucket is None else {str(k): v for k, v in self.per_bucket.items()}
        return json.dumps(
            {"method": self.method, "value": self.value, "per_bucket": buckets, "diagnostics": self.diagnostics},
            ensure_ascii=False,
        )

    def to_csv(self, bucket_label: str = "bucket") -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([bucket_label, "count"])
        for k, v in (self.per_bucket or {}).items():
            w.writerow([k, v])
        w.writerow(["TOTAL", self.value])
        return buf.getvalue()


@dataclass
class ComparisonRow:
    record_id: str
    citations_a: int
    citations_b: int

    def __post_init__(self):
        if self.citations_a < 0 or self.citations_b < 0:
            raise ValueError("citation counts must be >= 0")


def _round_half_up(x: Decimal, places: int = 0) -> Decimal:
    return x.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_UP)


def _fmt_int(n: int) -> str:
    return f"{n:,}"


# -- direct methods ---------------------------------------------------------

def _year_span(engine: SearchEngine) -> tuple[int, int] | None:
    years = [r.pub_year for r in engine.store.snapshot().values() if r.pub_year is not None]
    return (min(years), max(years)) if years else None


def _yearless_in_scope(engine: SearchEngine, include_citations: bool, include_patents: bool) -> int:
    n = 0
    for r in engine.store.snapshot().values():
        if r.pub_year is not None:
            continue
        if not include_citations and r.kind is Kind.CITATION_STUB:
            continue
        if not include_patents and r.doc_type is DocType.PATENT:
            continue
        n += 1
    return n


def _per_year(
    engine: SearchEngine,
    method: str,
    years: tuple[int, int] | None,
    include_citations: bool,
    include_patents: bool,
    site_exclude: list[str],
) -> SizeEstimate:
    span = years or _year_span(engine)
    buckets: dict[int, int] = {}
    if span is not None:
        lo, hi = span
        if lo > hi:
            raise ValueError(f"year range {span} has lo > hi")
        for y in range(lo, hi + 1):
            q = Query(year_range=(y, y), site_exclude=list(site_exclude),
                      include_citations=include_citations, include_patents=include_patents)
            buckets[y] = engine.hit_count_estimate(q)
    est = SizeEstimate(method, sum(buckets.values()), buckets)
    missed = _yearless_in_scope(engine, include_citations, include_patents)
    if missed:
        est.diagnostics.append(f"{missed} records carry no publication year and are invisible to year queries")
    if str(engine.noise) != "exact":
        est.diagnostics.append(f"hit counts reported under noise model {engine.noise}")
    return est


def estimate_absurd(
    engine: SearchEngine,
    years: tuple[int, int] | None = None,
    include_citations: bool = True,
    include_patents: bool = True,
) -> SizeEstimate:
    """Sum of per-year hit counts for a query that only excludes a domain that does not exist."""
    return _per_year(engine, "absurd_query", years, include_citations, include_patents, [NONEXISTENT_DOMAIN])


def estimate_year_query(
    engine: SearchEngine,
    years: tuple[int, int] | None = None,
    include_citations: bool = True,
    include_patents: bool = True,
) -> SizeEstimate:
    """Keyword-free per-year queries."""
    return _per_year(engine, "year_query", years, include_citations, include_patents, [])


def combine_components(components: dict[str, int], printed_total: int | None = None) -> SizeEstimate:
    """Add up separately measured parts (sources, stubs, patents...).

    When a previously published total is supplied and disagrees with the
    sum, the mismatch is reported in the diagnostics instead of being hidden.
    """
    total = sum(components.values())
    est = SizeEstimate("absurd_query", total, dict(components))
    if printed_total is not None and printed_total != total:
        est.diagnostics.append(
            f"printed total {_fmt_int(printed_total)} differs from the component sum "
            f"{_fmt_int(total)} by {_fmt_int(total - printed_total)}"
        )
    return est


def size_report(est: SizeEstimate) -> str:
    lines = [f"{k}\t{_fmt_int(v)}" for k, v in (est.per_bucket or {}).items()]
    lines.append(f"total\t{_fmt_int(est.value)}")
    lines += [f"note\t{d}" for d in est.diagnostics]
    return "\n".join(lines) + "\n"


def _norm_tld(t: str) -> str:
    return t.strip().lower().lstrip(".")


def estimate_domain_sum(engine: SearchEngine, tlds: Sequence[str], include_patents: bool = True) -> SizeEstimate:
    """Sum of ``site:tld`` hit counts, citation stubs excluded."""
    if not tlds:
        raise ValueError("tld list must be non-empty")
    norm = [_norm_tld(t) for t in tlds]
    dupes = sorted({t for t in norm if norm.count(t) > 1})
    if dupes:
        raise ValueError(f"duplicate tld(s): {', '.join(dupes)}")
    buckets = {}
    for t in norm:
        q = Query(site_include=t, include_citations=False, include_patents=include_patents)
        buckets[f".{t}"] = engine.hit_count_estimate(q)
    est = SizeEstimate("domain_sum", sum(buckets.values()), buckets)
    est.diagnostics.append(
        "site: only counts primary versions; documents whose primary copy lives under an unlisted domain are missed"
    )
    return est


def estimate_capture_recapture(sample_a: Iterable[str], sample_b: Iterable[str], chapman: bool = False) -> SizeEstimate:
    """Lincoln-Petersen ``|A||B|/m`` (or Chapman's ``(|A|+1)(|B|+1)/(m+1) - 1``)."""
    a, b = set(sample_a), set(sample_b)
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    m = len(a & b)
    if chapman:
        raw = Decimal((len(a) + 1) * (len(b) + 1)) / Decimal(m + 1) - 1
    else:
        if m == 0:
            raise NoOverlap()
        raw = Decimal(len(a) * len(b)) / Decimal(m)
    est = SizeEstimate("capture_recapture", int(_round_half_up(raw)))
    est.diagnostics.append(f"overlap m={m}; |A|={len(a)}; |B|={len(b)}; {'chapman' if chapman else 'lincoln-petersen'}")
    return est


def draw_sample(population: Sequence[str], size: int, rng: random.Random) -> set[str]:
    if size > len(population):
        raise ValueError(f"sample of {size} from a population of {len(population)}")
    return set(rng.sample(list(population), size))


def estimate_language_proportion(engine: SearchEngine, reference_language: Language, known_share: float) -> SizeEstimate:
    if not 0 < known_share <= 1:
        raise ValueError("known share must be in (0, 1]")
    count = engine.hit_count_estimate(Query(languages=frozenset({reference_language})))
    if count == 0:
        raise ValueError(f"no records in language {reference_language.value}; estimator undefined")
    value = int(_round_half_up(Decimal(count) / Decimal(str(known_share))))
    est = SizeEstimate("language_proportion", value, {reference_language.value: count})
    est.diagnostics.append(f"{reference_language.value} count {count} scaled by assumed share {known_share}")
    return est


# -- correlation ----------------------------------------------------------

def pearson(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Pearson's r; None when either series is constant."""
    n = len(xs)
    if n != len(ys):
        raise ValueError("series lengths differ")
    if n < 2:
        return None
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))


def method_correlation(estimates: Sequence[SizeEstimate]) -> list[list[float | None]]:
    """Pairwise Pearson matrix over per-year series; None marks undefined entries."""
    if len(estimates) < 2:
        raise ValueError("need at least two estimates")
    keys = list((estimates[0].per_bucket or {}).keys())
    for e in estimates[1:]:
        if list((e.per_bucket or {}).keys()) != keys:
            raise ValueError("estimates do not share the same buckets")
    series = [[e.per_bucket[k] for k in keys] for e in estimates]
    n = len(series)
    out: list[list[float | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            r = pearson(series[i], series[j])
            if i == j and r is not None:
                r = 1.0
            out[i][j] = out[j][i] = r
    return out


def average_ranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(rows: Sequence[ComparisonRow]) -> float | None:
    """Rank correlation with average ranks for ties; None if a column is constant."""
    if len(rows) < 2:
        raise ValueError("need at least two rows")
    ra = average_ranks([r.citations_a for r in rows])
    rb = average_ranks([r.citations_b for r in rows])
    return pearson(ra, rb)


def citation_ratio(rows: Sequence[ComparisonRow]) -> float:
    """Total citations in A over total in B, to two decimals."""
    num = sum(r.citations_a for r in rows)
    den = sum(r.citations_b for r in rows)
    if den == 0:
        raise ZeroDivisionError("citation ratio undefined: second column sums to zero")
    return float(_round_half_up(Decimal(num) / Decimal(den), 2))


# -- indexing speed -------------------------------------------------------

def indexing_speed(online_date: date, indexed_date: date) -> int:
    if indexed_date < online_date:
        raise NegativeSpeed(online_date, indexed_date)
    return (indexed_date - online_date).days


def speed_from_ages(online_age: int, days_since_index: int) -> int:
    """Days to index when only the ages at observation time are known."""
    speed = online_age - days_since_index
    if speed < 0:
        raise ValueError(f"negative-speed: online age {online_age} < days since index {days_since_index}")
    return speed


def indexing_speed_report(rows: Sequence[tuple[str, int, int | None]]) -> str:
    """CSV of (item, online_age, days_since_index) -> speed with its margin."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["item", "online_age", "days_since_index", "index_speed", "margin_days"])
    for item, age, since in rows:
        if since is None:
            w.writerow([item, age, "", "", ""])
        else:
            w.writerow([item, age, since, speed_from_ages(age, since), f"+-{INDEX_DATE_MARGIN_DAYS}"])
    return buf.getvalue()


def record_indexing_speeds(records: Iterable[DocumentRecord]) -> list[tuple[str, int]]:
    out = []
    for r in records:
        if r.online_at is not None and r.indexed_at >= r.online_at:
            out.append((r.record_id, indexing_speed(r.online_at, r.indexed_at)))
    return out


# -- coverage reports -----------------------------------------------------

def percent_table(counts: dict[str, int]) -> list[tuple[str, int, Decimal]]:
    """(label, count, percent of total rounded half-up to 2 decimals)."""
    total = sum(counts.values())
    rows = []
    for label, n in counts.items():
        pct = Decimal(0) if total == 0 else _round_half_up(Decimal(n) * 100 / Decimal(total), 2)
        rows.append((label, n, pct))
    return rows


def table_csv(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([f"{v:.2f}" if isinstance(v, Decimal) else v for v in row])
    return buf.getvalue()


def language_distribution(engine: SearchEngine, years: tuple[int, int] | None = None) -> list[tuple[str, int, Decimal]]:
    """Per-language sums of keyword-free year queries, stubs and patents excluded."""
    span = years or _year_span(engine)
    counts: dict[str, int] = {}
    for lang in Language:
        n = 0
        if span is not None:
            for y in range(span[0], span[1] + 1):
                q = Query(year_range=(y, y), languages=frozenset({lang}), include_citations=False, include_patents=False)
                n += engine.hit_count_estimate(q)
        counts[lang.value] = n
    return percent_table(counts)


def doc_type_distribution(sample: Iterable[DocumentRecord]) -> dict[str, int]:
    counts = {t.value: 0 for t in DocType}
    for r in sample:
        counts[r.doc_type.value] += 1
    return counts
