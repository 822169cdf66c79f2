"""Query parsing, filtering, ranking and record export."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from datetime import date
from decimal import ROUND_HALF_UP, Decimal

from .model import CorpusStore, DocType, DocumentRecord, Language, parse_language
from .text import fold, tokens

RESULT_CAP = 1000
PAGE_SIZES = (10, 20)
EXPORT_BATCH_LIMIT = 20
EXPORT_AUTHOR_LIMIT = 10


class QueryParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class BatchLimitExceeded(ValueError):
    def __init__(self, n: int):
        super().__init__(f"batch-limit: {n} records requested, at most {EXPORT_BATCH_LIMIT} per export")


@dataclass
class Query:
    terms: list[str] = field(default_factory=list)
    intitle_terms: list[str] = field(default_factory=list)
    author_terms: list[str] = field(default_factory=list)
    source_term: str | None = None
    year_range: tuple[int, int] | None = None
    site_include: str | None = None
    site_exclude: list[str] = field(default_factory=list)
    languages: frozenset[Language] = frozenset()
    include_citations: bool = True
    include_patents: bool = True
    sort: str = "relevance"

    def __post_init__(self):
        if self.year_range is not None and self.year_range[0] > self.year_range[1]:
            raise ValueError(f"year range {self.year_range} has lo > hi")
        if self.sort not in ("relevance", "date"):
            raise ValueError(f"unknown sort {self.sort!r}")


@dataclass
class ResultPage:
    hits: list[str]
    hit_count_estimate: int
    page_size: int = 10
    page_index: int = 0


_TOKEN_RE = re.compile(r'(?P<neg>-?)(?P<op>[A-Za-z_]+):(?:"(?P<qval>[^"]*)"|(?P<val>\S+))|"(?P<phrase>[^"]*)"|(?P<word>\S+)')
_YEAR_RANGE = re.compile(r"^(\d{1,4})(?:\.\.(\d{1,4}))?$")


def parse_query(text: str) -> Query:
    """Parse the search box grammar.

    Recognised operators: ``site:D``, ``-site:D``, ``intitle:w``,
    ``author:"..."``, ``source:"..."``, ``year:lo..hi`` and ``lang:xx``.
    Anything else is a plain term; double quotes make a phrase.
    """
    q = Query()
    for m in _TOKEN_RE.finditer(text):
        if m.group("op") is not None:
            op = m.group("op").lower()
            neg = m.group("neg") == "-"
            value = m.group("qval") if m.group("qval") is not None else m.group("val")
            pos = m.start("qval") if m.group("qval") is not None else m.start("val")
            if op == "site":
                domain = value.lower().lstrip(".")
                if not domain:
                    raise QueryParseError("empty site operand", pos)
                if neg:
                    q.site_exclude.append(domain)
                else:
                    q.site_include = domain
                continue
            if neg:
                raise QueryParseError(f"operator {op}: cannot be negated", m.start())
            if op == "intitle":
                q.intitle_terms.append(value)
            elif op == "author":
                q.author_terms.append(value)
            elif op == "source":
                q.source_term = value
            elif op == "year":
                ym = _YEAR_RANGE.match(value)
                if not ym:
                    raise QueryParseError(f"malformed year range {value!r}", pos)
                lo = int(ym.group(1))
                hi = int(ym.group(2)) if ym.group(2) else lo
                if lo > hi:
                    raise QueryParseError(f"year range {lo}..{hi} is reversed", pos)
                q.year_range = (lo, hi)
            elif op in ("lang", "language"):
                lang = parse_language(value)
                if lang is Language.UNKNOWN and value.lower() != "unknown":
                    raise QueryParseError(f"unknown language {value!r}", pos)
                q.languages = q.languages | {lang}
            else:
                q.terms.append(m.group(0))
        elif m.group("phrase") is not None:
            if m.group("phrase").strip():
                q.terms.append(m.group("phrase"))
        else:
            q.terms.append(m.group("word"))
    return q


# -- noise ------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """How a true match count is turned into the reported hit count."""

    digits: int | None = None  # None means exact

    @classmethod
    def parse(cls, spec: str | None) -> "NoiseModel":
        if not spec or spec.strip().lower() == "exact":
            return cls()
        m = re.fullmatch(r"\s*rounded\s*[(:]\s*(\d+)\s*\)?\s*", spec.lower())
        if not m or int(m.group(1)) < 1:
            raise ValueError(f"unknown noise model {spec!r}")
        return cls(int(m.group(1)))

    def apply(self, count: int) -> int:
        if self.digits is None or count == 0:
            return count
        scale = 10 ** max(len(str(abs(count))) - self.digits, 0)
        return int((Decimal(count) / scale).quantize(Decimal(1), rounding=ROUND_HALF_UP)) * scale

    def __str__(self) -> str:
        return "exact" if self.digits is None else f"rounded({self.digits})"


EXACT = NoiseModel()


# -- matching ---------------------------------------------------------------

def _domain_matches(host: str, pattern: str) -> bool:
    host = host.lower().rstrip(".")
    pattern = pattern.lower().lstrip(".")
    return host == pattern or host.endswith("." + pattern)


def _contains_phrase(haystack: list[str], needle: list[str]) -> bool:
    if not needle:
        return True
    n = len(needle)
    first = needle[0]
    for i, tok in enumerate(haystack):
        if tok == first and haystack[i:i + n] == needle:
            return True
    return False


def _author_matches(term: str, r: DocumentRecord) -> bool:
    words = tokens(term)
    if not words:
        return True
    surname = words[-1]
    initials = "".join(w[0] for w in words[:-1]).upper()
    for a in r.authors:
        if "".join(tokens(a.surname)) != surname and surname not in tokens(a.surname):
            continue
        if initials and not a.given_initials.upper().startswith(initials):
            continue
        return True
    return False


@dataclass
class _Indexed:
    record: DocumentRecord
    title: list[str]
    body: list[str]
    title_set: frozenset[str]
    body_set: frozenset[str]
    all_set: frozenset[str]


class SearchEngine:
    """Read-only search over a :class:`CorpusStore`.

    Every call works on a point-in-time copy of the store, so queries can run
    while ingestion keeps writing.
    """

    def __init__(
        self,
        store: CorpusStore,
        current_year: int | None = None,
        alpha: float = 1.0,
        beta: float = 0.5,
        noise: NoiseModel = EXACT,
    ):
        if alpha < 0 or beta < 0:
            raise ValueError("relevance weights must be non-negative")
        self.store = store
        self.current_year = current_year if current_year is not None else date.today().year
        self.alpha = alpha
        self.beta = beta
        self.noise = noise
        self._cache: dict[str, _Indexed] = {}

    def _indexed(self, r: DocumentRecord) -> _Indexed:
        hit = self._cache.get(r.record_id)
        if hit is not None and hit.record is r:
            return hit
        title = tokens(r.title)
        body = tokens(" ".join([r.abstract or "", *r.raw_references]))
        ix = _Indexed(r, title, body, frozenset(title), frozenset(body), frozenset(title) | frozenset(body))
        self._cache[r.record_id] = ix
        return ix

    def matches(self, q: Query, r: DocumentRecord) -> bool:
        if not q.include_citations and r.is_stub:
            return False
        if not q.include_patents and r.doc_type is DocType.PATENT:
            return False
        if q.year_range is not None:
            if r.pub_year is None or not (q.year_range[0] <= r.pub_year <= q.year_range[1]):
                return False
        if q.languages and r.language not in q.languages:
            return False
        if q.site_include is not None:
            p = r.primary
            if p is None or not _domain_matches(p.source_domain, q.site_include):
                return False
        for ex in q.site_exclude:
            if any(_domain_matches(v.source_domain, ex) for v in r.versions):
                return False
        if q.source_term is not None:
            if r.source_name is None or fold(q.source_term) not in fold(r.source_name):
                return False
        for a in q.author_terms:
            if not _author_matches(a, r):
                return False
        if not (q.terms or q.intitle_terms):
            return True
        ix = self._indexed(r)
        for t in q.intitle_terms:
            words = tokens(t)
            if not _contains_phrase(ix.title, words):
                return False
        for t in q.terms:
            words = tokens(t)
            if len(words) == 1:
                if words[0] not in ix.all_set:
                    return False
            elif not (_contains_phrase(ix.title, words) or _contains_phrase(ix.body, words)):
                return False
        return True

    def match_ids(self, q: Query, snapshot: dict[str, DocumentRecord] | None = None) -> list[str]:
        snap = self.store.snapshot() if snapshot is None else snapshot
        return sorted(rid for rid, r in snap.items() if self.matches(q, r))

    def term_score(self, q: Query, r: DocumentRecord) -> float:
        ix = self._indexed(r)
        score = 0.0
        for t in [*q.terms, *q.intitle_terms]:
            words = tokens(t)
            if words and all(w in ix.title_set for w in words):
                score += 2.0
            if words and any(w in ix.body_set for w in words):
                score += 1.0
        return score

    def score(self, q: Query, r: DocumentRecord) -> float:
        lang_ok = not q.languages or r.language in q.languages
        return self.term_score(q, r) + self.alpha * math.log1p(len(r.cited_by)) + self.beta * lang_ok

    def rank_relevance(self, ids: list[str], q: Query, snapshot: dict[str, DocumentRecord] | None = None) -> list[str]:
        snap = self.store.snapshot() if snapshot is None else snapshot
        keyed = []
        for rid in ids:
            r = snap[rid]
            keyed.append((-self.score(q, r), -len(r.cited_by), rid))
        keyed.sort()
        return [k[2] for k in keyed]

    def _ordered(self, q: Query, snap: dict[str, DocumentRecord]) -> tuple[list[str], int]:
        ids = self.match_ids(q, snap)
        total = len(ids)
        if q.sort == "date":
            ids = [i for i in ids if snap[i].pub_year == self.current_year]
            ids.sort(key=lambda i: (-snap[i].indexed_at.toordinal(), i))
        else:
            ids = self.rank_relevance(ids, q, snap)
        return ids, total

    def execute(self, q: Query, page_index: int = 0, page_size: int = 10) -> ResultPage:
        if page_size not in PAGE_SIZES:
            raise ValueError(f"page size must be one of {PAGE_SIZES}")
        if page_index < 0:
            raise ValueError("page index must be >= 0")
        snap = self.store.snapshot()
        ordered, total = self._ordered(q, snap)
        capped = ordered[:RESULT_CAP]
        start = page_index * page_size
        hits = capped[start:start + page_size] if start < RESULT_CAP else []
        return ResultPage(hits=hits, hit_count_estimate=self.noise.apply(total), page_size=page_size, page_index=page_index)

    def hit_count_estimate(self, q: Query, noise: NoiseModel | None = None) -> int:
        noise = self.noise if noise is None else noise
        return noise.apply(len(self.match_ids(q)))

    def search(self, text: str, page_index: int = 0, page_size: int = 10, **flags) -> ResultPage:
        q = parse_query(text)
        for k, v in flags.items():
            setattr(q, k, v)
        return self.execute(q, page_index, page_size)

    def result_lines(self, page: ResultPage) -> list[str]:
        out = []
        for rid in page.hits:
            r = self.store.get(rid)
            if r is None:
                continue
            out.append(json.dumps({
                "record_id": rid,
                "title": r.title,
                "year": r.pub_year,
                "citations": len(r.cited_by),
                "primary_url": r.primary.url if r.primary else None,
            }, ensure_ascii=False))
        return out


def execute(query: Query, store: CorpusStore, page_index: int = 0, page_size: int = 10, **engine_kw) -> ResultPage:
    return SearchEngine(store, **engine_kw).execute(query, page_index, page_size)


def hit_count_estimate(query: Query, store: CorpusStore, noise: NoiseModel = EXACT) -> int:
    return SearchEngine(store, noise=noise).hit_count_estimate(query)


def rank_relevance(match_ids: list[str], query: Query, store: CorpusStore, alpha: float = 1.0, beta: float = 0.5) -> list[str]:
    return SearchEngine(store, alpha=alpha, beta=beta).rank_relevance(match_ids, query)


# -- export -----------------------------------------------------------------

EXPORT_FORMATS = ("bibtex", "endnote", "refman", "refworks")

_BIBTEX_TYPES = {
    DocType.ARTICLE: "article",
    DocType.BOOK_CHAPTER: "incollection",
    DocType.THESIS: "phdthesis",
    DocType.CONFERENCE: "inproceedings",
    DocType.REPORT: "techreport",
    DocType.PATENT: "misc",
}
_RIS_TYPES = {
    DocType.ARTICLE: "JOUR",
    DocType.BOOK_CHAPTER: "CHAP",
    DocType.THESIS: "THES",
    DocType.CONFERENCE: "CONF",
    DocType.REPORT: "RPRT",
    DocType.PATENT: "PAT",
}
_ENDNOTE_TYPES = {
    DocType.ARTICLE: "Journal Article",
    DocType.BOOK_CHAPTER: "Book Section",
    DocType.THESIS: "Thesis",
    DocType.CONFERENCE: "Conference Proceedings",
    DocType.REPORT: "Report",
    DocType.PATENT: "Patent",
}


def _bibtex(r: DocumentRecord) -> str:
    authors = r.authors[:EXPORT_AUTHOR_LIMIT]
    first = tokens(authors[0].surname)[0] if authors and tokens(authors[0].surname) else "anon"
    word = next(iter(tokens(r.title)), "untitled")
    key = f"{first}{r.pub_year or ''}{word}"
    fields = [("title", r.title), ("author", " and ".join(a.display() for a in authors))]
    if r.source_name:
        fields.append(("journal" if r.doc_type is DocType.ARTICLE else "booktitle", r.source_name))
    if r.pub_year:
        fields.append(("year", str(r.pub_year)))
    body = ",\n".join(f"  {k}={{{v}}}" for k, v in fields if v)
    return f"@{_BIBTEX_TYPES.get(r.doc_type, 'misc')}{{{key},\n{body}\n}}\n"


def _endnote(r: DocumentRecord) -> str:
    lines = [f"%0 {_ENDNOTE_TYPES.get(r.doc_type, 'Generic')}", f"%T {r.title}"]
    lines += [f"%A {a.display()}" for a in r.authors[:EXPORT_AUTHOR_LIMIT]]
    if r.source_name:
        lines.append(f"%J {r.source_name}")
    if r.pub_year:
        lines.append(f"%D {r.pub_year}")
    return "\n".join(lines) + "\n\n"


def _refman(r: DocumentRecord) -> str:
    lines = [f"TY  - {_RIS_TYPES.get(r.doc_type, 'GEN')}", f"TI  - {r.title}"]
    lines += [f"AU  - {a.display()}" for a in r.authors[:EXPORT_AUTHOR_LIMIT]]
    if r.source_name:
        lines.append(f"JO  - {r.source_name}")
    if r.pub_year:
        lines.append(f"PY  - {r.pub_year}")
    lines.append("ER  - ")
    return "\n".join(lines) + "\n"


def _refworks(r: DocumentRecord) -> str:
    lines = [f"RT {_ENDNOTE_TYPES.get(r.doc_type, 'Generic')}"]
    lines += [f"A1 {a.display()}" for a in r.authors[:EXPORT_AUTHOR_LIMIT]]
    lines.append(f"T1 {r.title}")
    if r.source_name:
        lines.append(f"JF {r.source_name}")
    if r.pub_year:
        lines.append(f"YR {r.pub_year}")
    return "\n".join(lines) + "\n\n"


_WRITERS = {"bibtex": _bibtex, "endnote": _endnote, "refman": _refman, "refworks": _refworks}


def export_records(ids: list[str], store: CorpusStore, fmt: str = "bibtex") -> bytes:
    """Serialise up to 20 records. Abstracts are never written."""
    if len(ids) > EXPORT_BATCH_LIMIT:
        raise BatchLimitExceeded(len(ids))
    try:
        writer = _WRITERS[fmt]
    except KeyError:
        raise ValueError(f"unknown export format {fmt!r}; expected one of {EXPORT_FORMATS}") from None
    parts = []
    for rid in ids:
        r = store.get(rid)
        if r is None:
            raise KeyError(rid)
        parts.append(writer(r))
    return "".join(parts).encode("utf-8")
