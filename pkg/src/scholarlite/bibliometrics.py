"""Author-profile indicators and journal h5 metrics/rankings."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from statistics import median
from typing import Iterable

from .model import CorpusStore, DocumentRecord, Language
from .text import normalize_name

GSM_MIN_ARTICLES = 100
GSM_MIN_CITATIONS = 1
LANGUAGE_TOP = 100
CATEGORY_TOP = 20
SEARCH_TOP = 20
UNCATEGORIZED = ("Uncategorized",)


def _check_counts(counts: Iterable[int]) -> list[int]:
    out = list(counts)
    for c in out:
        if c < 0:
            raise ValueError(f"citation counts must be >= 0, got {c}")
    return out


def h_index(counts: Iterable[int]) -> int:
    ordered = sorted(_check_counts(counts), reverse=True)
    h = 0
    for rank, c in enumerate(ordered, 1):
        if c < rank:
            break
        h = rank
    return h


def i10_index(counts: Iterable[int]) -> int:
    return sum(1 for c in _check_counts(counts) if c >= 10)


def _citers(r: DocumentRecord, store: CorpusStore, count_stubs: bool) -> list[DocumentRecord]:
    out = []
    for cid in r.cited_by:
        c = store.get(cid)
        if c is None or (c.is_stub and not count_stubs):
            continue
        out.append(c)
    return out


def windowed_citation_counts(
    pubs: list[str],
    store: CorpusStore,
    window: tuple[int, int],
    count_stubs: bool = True,
) -> list[int]:
    """Per publication, citations from records published inside ``window``."""
    lo, hi = window
    counts = []
    for rid in pubs:
        r = store.get(rid)
        if r is None:
            counts.append(0)
            continue
        counts.append(sum(1 for c in _citers(r, store, count_stubs) if c.pub_year is not None and lo <= c.pub_year <= hi))
    return counts


def last_five_years(current_year: int) -> tuple[int, int]:
    """The five most recent complete calendar years."""
    return current_year - 5, current_year - 1


def edition_period(edition_year: int) -> tuple[int, int]:
    return edition_year - 5, edition_year - 1


@dataclass
class AuthorProfile:
    author_key: tuple[str, str]
    publications: list[str] = field(default_factory=list)
    citations_all: int = 0
    citations_5y: int = 0
    h_all: int = 0
    h_5y: int = 0
    i10_all: int = 0
    i10_5y: int = 0

    def as_dict(self) -> dict:
        return {
            "surname": self.author_key[0],
            "initials": self.author_key[1],
            "publications": len(self.publications),
            "citations_all": self.citations_all,
            "citations_5y": self.citations_5y,
            "h_all": self.h_all,
            "h_5y": self.h_5y,
            "i10_all": self.i10_all,
            "i10_5y": self.i10_5y,
        }


def _same_author(key: tuple[str, str], record: DocumentRecord) -> bool:
    surname, initials = normalize_name(key[0]), key[1].upper()
    return any(normalize_name(a.surname) == surname and a.given_initials.upper() == initials for a in record.authors)


def build_author_profile(
    author_key: tuple[str, str],
    store: CorpusStore,
    current_year: int,
    count_stubs: bool = True,
) -> AuthorProfile:
    """All-time and last-five-years indicators for one (surname, initials)."""
    snap = store.snapshot()
    pubs = sorted(rid for rid, r in snap.items() if not r.is_stub and _same_author(author_key, r))
    all_counts = [len(_citers(snap[p], store, count_stubs)) for p in pubs]
    recent = windowed_citation_counts(pubs, store, last_five_years(current_year), count_stubs)
    return AuthorProfile(
        author_key=author_key,
        publications=pubs,
        citations_all=sum(all_counts),
        citations_5y=sum(recent),
        h_all=h_index(all_counts),
        h_5y=h_index(recent),
        i10_all=i10_index(all_counts),
        i10_5y=i10_index(recent),
    )


# -- journals ---------------------------------------------------------------

@dataclass
class JournalMetrics:
    source_name: str
    period: tuple[int, int]
    n_articles: int = 0
    h5: int = 0
    h5_core: list[tuple[str, int]] = field(default_factory=list)
    h5_median: float = 0
    total_citations: int = 0
    language: Language = Language.UNKNOWN
    categories: list[tuple[str, ...]] = field(default_factory=list)


def h5_core_of(counts: dict[str, int]) -> tuple[int, list[tuple[str, int]], float]:
    """(h5, core, median) for per-article window counts.

    The core is the top ``h5`` articles by count; when several articles sit
    on the threshold the smaller record ids are taken.
    """
    h = h_index(counts.values())
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    core = ranked[:h]
    med = median(c for _, c in core) if core else 0
    return h, core, med


def h5_metrics(
    source_name: str,
    period: tuple[int, int],
    store: CorpusStore,
    categories: list[tuple[str, ...]] | None = None,
    count_stubs: bool = True,
) -> JournalMetrics:
    lo, hi = period
    if hi - lo != 4:
        raise ValueError(f"period must span five consecutive years, got {period}")
    arts = sorted(
        (r for r in store.snapshot().values()
         if not r.is_stub and r.source_name == source_name and r.pub_year is not None and lo <= r.pub_year <= hi),
        key=lambda r: r.record_id,
    )
    ids = [r.record_id for r in arts]
    counts = dict(zip(ids, windowed_citation_counts(ids, store, period, count_stubs)))
    h, core, med = h5_core_of(counts)
    langs = Counter(r.language for r in arts)
    order = list(Language)
    language = min(langs, key=lambda lang: (-langs[lang], order.index(lang))) if langs else Language.UNKNOWN
    return JournalMetrics(
        source_name=source_name,
        period=period,
        n_articles=len(arts),
        h5=h,
        h5_core=core,
        h5_median=med,
        total_citations=sum(counts.values()),
        language=language,
        categories=list(categories or []),
    )


def gsm_inclusion(metrics: JournalMetrics) -> bool:
    return metrics.n_articles >= GSM_MIN_ARTICLES and metrics.total_citations >= GSM_MIN_CITATIONS


def _rank_key(m: JournalMetrics) -> tuple:
    return (-m.h5, -m.h5_median, m.source_name)


@dataclass
class RankingSet:
    period: tuple[int, int]
    by_language: dict[Language, list[JournalMetrics]] = field(default_factory=dict)
    by_category: dict[tuple[str, ...], list[JournalMetrics]] = field(default_factory=dict)

    def journals(self) -> list[JournalMetrics]:
        seen: dict[str, JournalMetrics] = {}
        for rows in [*self.by_language.values(), *self.by_category.values()]:
            for m in rows:
                seen.setdefault(m.source_name, m)
        return list(seen.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rank", "source_name", "h5", "h5_median", "language", "category"])
        for lang in sorted(self.by_language, key=lambda lang: lang.value):
            for i, m in enumerate(self.by_language[lang], 1):
                w.writerow([i, m.source_name, m.h5, _fmt_median(m.h5_median), m.language.value, ""])
        for path in sorted(self.by_category):
            for i, m in enumerate(self.by_category[path], 1):
                w.writerow([i, m.source_name, m.h5, _fmt_median(m.h5_median), m.language.value, " > ".join(path)])
        return buf.getvalue()


def _fmt_median(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.1f}"


def gsm_rankings(
    store: CorpusStore,
    edition_year: int,
    categories: dict[str, list[tuple[str, ...]]] | None = None,
    period: tuple[int, int] | None = None,
) -> RankingSet:
    """Journal rankings for one edition.

    Non-English journals are ranked per language (top 100).  English journals
    are ranked per category and per subcategory (top 20 each); a journal with
    several category paths shows up under each.
    """
    categories = categories or {}
    period = period or edition_period(edition_year)
    lo, hi = period
    names = sorted({r.source_name for r in store.snapshot().values()
                    if not r.is_stub and r.source_name and r.pub_year is not None and lo <= r.pub_year <= hi})
    included = []
    for name in names:
        m = h5_metrics(name, period, store, categories.get(name))
        if gsm_inclusion(m):
            included.append(m)

    ranking = RankingSet(period=period)
    langs: dict[Language, list[JournalMetrics]] = {}
    cats: dict[tuple[str, ...], list[JournalMetrics]] = {}
    for m in included:
        if m.language is Language.EN:
            paths = m.categories or [UNCATEGORIZED]
            keys = set()
            for p in paths:
                keys.add(tuple(p[:1]))
                if len(p) > 1:
                    keys.add(tuple(p[:2]))
            for k in keys:
                cats.setdefault(k, []).append(m)
        else:
            langs.setdefault(m.language, []).append(m)
    ranking.by_language = {k: sorted(v, key=_rank_key)[:LANGUAGE_TOP] for k, v in langs.items()}
    ranking.by_category = {k: sorted(v, key=_rank_key)[:CATEGORY_TOP] for k, v in cats.items()}
    return ranking


def gsm_search(keyword: str, rankings: RankingSet) -> list[JournalMetrics]:
    kw = keyword.casefold()
    hits = [m for m in rankings.journals() if kw in m.source_name.casefold()]
    return sorted(hits, key=_rank_key)[:SEARCH_TOP]
