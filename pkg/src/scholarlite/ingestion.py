"""Turning crawled source snapshots into records.

Covers meta-tag parsing, first-page layout parsing, reference-section
extraction, the file compliance rules, academic classification and the
snapshot diff that drops documents which vanished from their source.
"""

from __future__ import annotations

import enum
import json
import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

from .model import (
    AuthorName,
    CorpusStore,
    DocType,
    DocumentRecord,
    DomainState,
    FileKind,
    Kind,
    Language,
    SourceType,
    VersionRef,
    parse_language,
)

log = logging.getLogger(__name__)

MAX_FULLTEXT_BYTES = 5 * 2**20


class MetaScheme(str, enum.Enum):
    HIGHWIRE = "highwire"
    EPRINTS = "eprints"
    BEPRESS = "bepress"
    PRISM = "prism"
    DUBLIN_CORE = "dublin_core"


SCHEME_PRECEDENCE = [
    MetaScheme.HIGHWIRE,
    MetaScheme.EPRINTS,
    MetaScheme.BEPRESS,
    MetaScheme.PRISM,
    MetaScheme.DUBLIN_CORE,
]


class Violation(str, enum.Enum):
    OVERSIZE = "oversize"
    UNSEARCHABLE_PDF = "unsearchable_pdf"
    BAD_PDF_EXTENSION = "bad_pdf_extension"
    ABSTRACT_HIDDEN = "abstract_hidden"
    MISSING_REQUIRED_META = "missing_required_meta"


class ImageOnlyText(ValueError):
    """Layout parsing was asked to read text that has no searchable layer."""

    def __init__(self):
        super().__init__("image-only")


class StaleSnapshot(ValueError):
    pass


@dataclass(frozen=True)
class TextBlock:
    text: str
    font_size: float
    page: int = 1


@dataclass
class StructuredText:
    blocks: list[TextBlock] = field(default_factory=list)
    searchable: bool = True

    def __post_init__(self):
        pages = [b.page for b in self.blocks]
        if any(p < 1 for p in pages) or pages != sorted(pages):
            raise ValueError("block pages must be positive and non-decreasing")
        if any(b.font_size <= 0 for b in self.blocks):
            raise ValueError("font sizes must be positive")


@dataclass
class RawDocument:
    url: str
    meta_tags: list[tuple[str, str, str]] = field(default_factory=list)
    body: StructuredText = field(default_factory=StructuredText)
    byte_size: int = 0
    file_kind: FileKind = FileKind.HTML
    abstract_visible: bool = True


def tld_of(domain: str) -> str:
    return domain.rstrip(".").rsplit(".", 1)[-1].lower()


def guess_source_type(domain: str, whitelisted: bool) -> SourceType:
    if whitelisted:
        return SourceType.REPOSITORY
    if domain.endswith(".edu") or ".ac." in domain or domain.startswith("univ"):
        return SourceType.UNIVERSITY
    return SourceType.OTHER


@dataclass
class SourceSnapshot:
    domain: str
    snapshot_date: date
    documents: list[RawDocument] = field(default_factory=list)
    location_whitelisted: bool = False
    source_type: SourceType | None = None

    def __post_init__(self):
        if self.source_type is None:
            self.source_type = guess_source_type(self.domain, self.location_whitelisted)
        urls = [d.url for d in self.documents]
        if len(urls) != len(set(urls)):
            raise ValueError(f"duplicate document url in snapshot of {self.domain}")

    @property
    def tld(self) -> str:
        return tld_of(self.domain)


@dataclass
class BibMetadata:
    title: str
    authors: list[AuthorName] = field(default_factory=list)
    pub_year: int | None = None
    source_name: str | None = None
    language: Language = Language.UNKNOWN
    doc_type: DocType = DocType.UNKNOWN
    abstract: str | None = None
    online_at: date | None = None
    scheme: str = "layout"
    incomplete_source_fields: bool = False
    diagnostics: list[str] = field(default_factory=list)


@dataclass
class ComplianceReport:
    indexable: bool
    fulltext_indexed: bool
    violations: list[Violation] = field(default_factory=list)


# -- author names -----------------------------------------------------------

_INITIALS = re.compile(r"^(?:[A-Z]\.?-?)+$")


def initials_of(given: str) -> str:
    parts = re.split(r"[\s.\-]+", given.strip())
    return "".join(p[0].upper() for p in parts if p)


def parse_author(text: str) -> AuthorName | None:
    """``"Garfield, Eugene"``, ``"E. Garfield"`` or ``"J.L. Ortega"`` -> AuthorName."""
    text = " ".join(text.split()).strip(" ,;")
    if not text:
        return None
    if "," in text:
        surname, given = (s.strip() for s in text.split(",", 1))
    else:
        words = text.split(" ")
        surname, given = words[-1], " ".join(words[:-1])
    if not surname:
        return None
    full_given = given if given and not _INITIALS.match(given.replace(" ", "")) else None
    return AuthorName(surname=surname, given_initials=initials_of(given), full_given=full_given)


def split_author_list(text: str) -> list[AuthorName]:
    parts = re.split(r"\s*(?:;|,|\band\b|&)\s*", text)
    return [a for a in (parse_author(p) for p in parts) if a is not None]


# -- meta tags -------------------------------------------------------------

# scheme -> role -> accepted keys (lowercase)
_META_KEYS: dict[MetaScheme, dict[str, tuple[str, ...]]] = {
    MetaScheme.HIGHWIRE: {
        "title": ("citation_title",),
        "author": ("citation_author",),
        "date": ("citation_publication_date", "citation_date", "citation_year", "citation_cover_date"),
        "online": ("citation_online_date",),
        "source": ("citation_journal_title", "citation_conference_title", "citation_inbook_title"),
        "language": ("citation_language",),
        "abstract": ("citation_abstract",),
    },
    MetaScheme.EPRINTS: {
        "title": ("eprints.title",),
        "author": ("eprints.creators_name",),
        "date": ("eprints.date",),
        "source": ("eprints.publication", "eprints.event_title", "eprints.book_title"),
        "language": ("eprints.language",),
        "type": ("eprints.type",),
        "abstract": ("eprints.abstract",),
    },
    MetaScheme.BEPRESS: {
        "title": ("bepress_citation_title",),
        "author": ("bepress_citation_author",),
        "date": ("bepress_citation_date", "bepress_citation_online_date"),
        "source": ("bepress_citation_journal_title", "bepress_citation_conference"),
        "language": ("bepress_citation_language",),
        "type": ("bepress_citation_type",),
    },
    MetaScheme.PRISM: {
        "title": ("prism.title",),
        "author": ("prism.creator", "prism.author"),
        "date": ("prism.publicationdate", "prism.coverdate"),
        "source": ("prism.publicationname",),
        "language": ("prism.language",),
        "type": ("prism.contenttype", "prism.aggregationtype"),
    },
    MetaScheme.DUBLIN_CORE: {
        "title": ("dc.title",),
        "author": ("dc.creator",),
        "date": ("dc.date", "dc.date.issued"),
        "language": ("dc.language",),
        "type": ("dc.type",),
        "abstract": ("dc.description",),
    },
}

# highwire has no type tag; the kind of source tag present says what it is
_HIGHWIRE_TYPE_KEYS = {
    "citation_journal_title": DocType.ARTICLE,
    "citation_conference_title": DocType.CONFERENCE,
    "citation_inbook_title": DocType.BOOK_CHAPTER,
    "citation_dissertation_institution": DocType.THESIS,
    "citation_technical_report_institution": DocType.REPORT,
    "citation_patent_number": DocType.PATENT,
}

_TYPE_WORDS = {
    "article": DocType.ARTICLE,
    "journal article": DocType.ARTICLE,
    "journalarticle": DocType.ARTICLE,
    "journal": DocType.ARTICLE,
    "book_section": DocType.BOOK_CHAPTER,
    "book chapter": DocType.BOOK_CHAPTER,
    "book_chapter": DocType.BOOK_CHAPTER,
    "bookchapter": DocType.BOOK_CHAPTER,
    "chapter": DocType.BOOK_CHAPTER,
    "thesis": DocType.THESIS,
    "dissertation": DocType.THESIS,
    "conference_item": DocType.CONFERENCE,
    "conference": DocType.CONFERENCE,
    "conference paper": DocType.CONFERENCE,
    "conferencepaper": DocType.CONFERENCE,
    "proceedings": DocType.CONFERENCE,
    "monograph": DocType.REPORT,
    "report": DocType.REPORT,
    "technical report": DocType.REPORT,
    "patent": DocType.PATENT,
    "other": DocType.OTHER,
}

_YEAR = re.compile(r"(?<!\d)(\d{4})(?!\d)")


def _year_of(value: str) -> int | None:
    m = _YEAR.search(value)
    return int(m.group(1)) if m else None


def _date_of(value: str) -> date | None:
    m = re.search(r"(\d{4})[-/](\d{1,2})[-/](\d{1,2})", value)
    if not m:
        return None
    try:
        return date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        return None


def parse_meta_tags(doc: RawDocument, diagnostics: list[str] | None = None) -> BibMetadata | None:
    """Bibliographic fields from the highest-precedence scheme that has a title.

    Tags without a value are skipped and noted in ``diagnostics``.
    """
    diagnostics = [] if diagnostics is None else diagnostics
    by_scheme: dict[MetaScheme, list[tuple[str, str]]] = {}
    for scheme, key, value in doc.meta_tags:
        try:
            s = MetaScheme(scheme)
        except ValueError:
            diagnostics.append(f"unknown scheme {scheme!r}")
            continue
        if value is None or not str(value).strip():
            diagnostics.append(f"{s.value}:{key} has no value")
            continue
        by_scheme.setdefault(s, []).append((key.strip().lower(), str(value).strip()))

    for scheme in SCHEME_PRECEDENCE:
        tags = by_scheme.get(scheme)
        if not tags:
            continue
        roles = _META_KEYS[scheme]

        def values(role: str) -> list[str]:
            keys = roles.get(role, ())
            return [v for k, v in tags if k in keys]

        titles = values("title")
        if not titles:
            diagnostics.append(f"{scheme.value}: no title tag")
            continue
        authors: list[AuthorName] = []
        for a in values("author"):
            parsed = parse_author(a)
            if parsed is None:
                diagnostics.append(f"{scheme.value}: unparseable author {a!r}")
            else:
                authors.append(parsed)
        year = next((y for y in map(_year_of, values("date")) if y is not None), None)
        online = next((d for d in map(_date_of, values("online")) if d is not None), None)
        sources = values("source")
        langs = values("language")
        abstracts = values("abstract")

        doc_type = DocType.UNKNOWN
        if scheme is MetaScheme.HIGHWIRE:
            present = {k for k, _ in tags}
            for key, dt in _HIGHWIRE_TYPE_KEYS.items():
                if key in present:
                    doc_type = dt
                    break
        else:
            for t in values("type"):
                doc_type = _TYPE_WORDS.get(t.strip().lower(), DocType.OTHER)
                break

        return BibMetadata(
            title=titles[0],
            authors=authors,
            pub_year=year,
            source_name=sources[0] if sources else None,
            language=parse_language(langs[0]) if langs else Language.UNKNOWN,
            doc_type=doc_type,
            abstract=abstracts[0] if abstracts else None,
            online_at=online,
            scheme=scheme.value,
            incomplete_source_fields=scheme is MetaScheme.DUBLIN_CORE,
            diagnostics=diagnostics,
        )
    return None


# -- full-text layout ------------------------------------------------------

def _body_font(blocks: list[TextBlock]) -> float:
    weight: Counter[float] = Counter()
    for b in blocks:
        weight[b.font_size] += len(b.text)
    top = max(weight.values())
    return min(size for size, w in weight.items() if w == top)


def parse_fulltext_layout(text: StructuredText) -> BibMetadata | None:
    """Title/authors/abstract from first-page typography.

    The title must be the very first block, sit on page 1 and use the largest
    font of the document.  Authors are the next block if its font lies strictly
    between the title font and the body font.
    """
    if not text.searchable:
        raise ImageOnlyText()
    blocks = [b for b in text.blocks if b.text.strip()]
    if not blocks:
        return None
    first = blocks[0]
    top = max(b.font_size for b in blocks)
    if first.page != 1 or first.font_size < top:
        return None
    body = _body_font(blocks)
    rest = blocks[1:]
    authors: list[AuthorName] = []
    idx = 0
    if rest and rest[0].page == 1 and body < rest[0].font_size < first.font_size:
        authors = split_author_list(rest[0].text)
        idx = 1
    abstract = None
    if idx < len(rest) and rest[idx].page == 1 and not _is_reference_heading(rest[idx].text):
        abstract = rest[idx].text.strip()
    return BibMetadata(title=first.text.strip(), authors=authors, abstract=abstract, scheme="layout")


def _is_reference_heading(text: str) -> bool:
    return text.strip().lower() in ("references", "bibliography")


_NUMBERED = re.compile(r"^\s*(?:\[\d+\]|\d+\.)\s")
_BRACKET_SPLIT = re.compile(r"\s(?=\[\d+\]\s)")


def extract_references(text: StructuredText) -> list[str]:
    """Entries following the last "References"/"Bibliography" heading."""
    if not text.searchable:
        raise ImageOnlyText()
    heading = None
    for i, b in enumerate(text.blocks):
        if _is_reference_heading(b.text):
            heading = i
    if heading is None:
        return []
    tail = [b.text.strip() for b in text.blocks[heading + 1:] if b.text.strip()]
    if not tail:
        return []
    if not _NUMBERED.match(tail[0]):
        return tail
    entries: list[str] = []
    for chunk in tail:
        for piece in _BRACKET_SPLIT.split(chunk):
            for part in _split_dotted(piece, len(entries) + 1):
                if _NUMBERED.match(part) or not entries:
                    entries.append(part.strip())
                else:
                    entries[-1] = f"{entries[-1]} {part.strip()}"
    return entries


def _split_dotted(chunk: str, first: int) -> list[str]:
    """Split "1. x 2. y" style runs, only at the next expected entry number."""
    m = re.match(r"\s*(\d+)\.\s", chunk)
    n = int(m.group(1)) + 1 if m else first
    parts = []
    rest = chunk
    while True:
        cut = re.search(rf"\s(?={n}\.\s)", rest)
        if cut is None:
            break
        parts.append(rest[:cut.start()])
        rest = rest[cut.end():]
        n += 1
    parts.append(rest)
    return parts


# -- compliance and classification ---------------------------------------

def check_compliance(doc: RawDocument) -> ComplianceReport:
    violations: list[Violation] = []
    indexable = True
    fulltext = True
    if doc.byte_size > MAX_FULLTEXT_BYTES:
        violations.append(Violation.OVERSIZE)
        fulltext = False
    if doc.file_kind is FileKind.PDF:
        if not doc.url.lower().endswith(".pdf"):
            violations.append(Violation.BAD_PDF_EXTENSION)
            indexable = False
        if not doc.body.searchable:
            violations.append(Violation.UNSEARCHABLE_PDF)
            fulltext = False
    if not doc.abstract_visible:
        violations.append(Violation.ABSTRACT_HIDDEN)
        indexable = False
    if doc.meta_tags:
        meta = parse_meta_tags(doc)
        if meta is None or not meta.authors or meta.pub_year is None:
            violations.append(Violation.MISSING_REQUIRED_META)
    return ComplianceReport(indexable=indexable, fulltext_indexed=fulltext and indexable, violations=violations)


class Decision(str, enum.Enum):
    ACADEMIC = "academic"
    NON_ACADEMIC = "non_academic"


class Route(str, enum.Enum):
    LOCATION = "location"
    PARSER = "parser"


def classify_academic(doc: RawDocument, source: SourceSnapshot) -> tuple[Decision, Route]:
    if source.location_whitelisted:
        return Decision.ACADEMIC, Route.LOCATION
    try:
        layout = parse_fulltext_layout(doc.body)
        refs = extract_references(doc.body)
    except ImageOnlyText:
        return Decision.NON_ACADEMIC, Route.PARSER
    if layout is not None and refs:
        return Decision.ACADEMIC, Route.PARSER
    return Decision.NON_ACADEMIC, Route.PARSER


# -- snapshot ingestion ----------------------------------------------------

@dataclass
class IngestReport:
    domain: str = ""
    added: int = 0
    updated: int = 0
    unchanged: int = 0
    removed: int = 0
    rejected: int = 0
    touched: list[str] = field(default_factory=list)
    rejections: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "domain": self.domain,
            "added": self.added,
            "updated": self.updated,
            "unchanged": self.unchanged,
            "removed": self.removed,
            "rejected": self.rejected,
        }

    def __iadd__(self, other: "IngestReport") -> "IngestReport":
        self.added += other.added
        self.updated += other.updated
        self.unchanged += other.unchanged
        self.removed += other.removed
        self.rejected += other.rejected
        self.touched.extend(other.touched)
        self.rejections.update(other.rejections)
        return self


@dataclass
class ParsedDocument:
    url: str
    meta: BibMetadata | None
    references: list[str]
    version: VersionRef
    reason: str | None = None


def prepare_document(doc: RawDocument, source: SourceSnapshot) -> ParsedDocument:
    """Everything ingestion needs from one document; no store access."""
    version = VersionRef(
        url=doc.url,
        source_domain=source.domain,
        source_type=source.source_type,
        byte_size=doc.byte_size,
        has_searchable_text=doc.body.searchable,
        file_kind=doc.file_kind,
    )
    report = check_compliance(doc)
    if not report.indexable:
        return ParsedDocument(doc.url, None, [], version, reason=",".join(v.value for v in report.violations))
    decision, _ = classify_academic(doc, source)
    meta = parse_meta_tags(doc)
    if decision is Decision.NON_ACADEMIC and meta is None:
        return ParsedDocument(doc.url, None, [], version, reason="non_academic")
    layout = None
    refs: list[str] = []
    if doc.body.searchable:
        layout = parse_fulltext_layout(doc.body)
        if report.fulltext_indexed:
            refs = extract_references(doc.body)
    if meta is None:
        meta = layout
    elif layout is not None:
        if meta.abstract is None:
            meta.abstract = layout.abstract
        if not meta.authors:
            meta.authors = layout.authors
    if meta is None or not meta.title.strip():
        return ParsedDocument(doc.url, None, [], version, reason="no_metadata")
    return ParsedDocument(doc.url, meta, refs, version)


def _record_from(parsed: ParsedDocument, rid: str, indexed_at: date, max_year: int) -> DocumentRecord:
    meta = parsed.meta
    year = meta.pub_year if meta.pub_year is not None and 1500 <= meta.pub_year <= max_year else None
    return DocumentRecord(
        record_id=rid,
        kind=Kind.FULL,
        title=meta.title,
        authors=tuple(meta.authors),
        pub_year=year,
        source_name=meta.source_name,
        language=meta.language,
        doc_type=meta.doc_type,
        versions=(parsed.version,),
        primary_version=0,
        abstract=meta.abstract,
        raw_references=tuple(parsed.references),
        indexed_at=indexed_at,
        online_at=meta.online_at,
    )


def ingest_snapshot(source: SourceSnapshot, store: CorpusStore, workers: int = 1) -> IngestReport:
    """Apply one snapshot of a domain to ``store``.

    Documents are parsed (optionally in parallel) and then applied as one
    ordered batch. Urls seen in the previous snapshot of the same domain but
    missing now are dropped, together with the citations they made.
    """
    from .citations import drop_version  # circular at import time

    prev = store.domains.get(source.domain)
    if prev is not None and source.snapshot_date < prev.snapshot_date:
        raise StaleSnapshot(
            f"snapshot of {source.domain} dated {source.snapshot_date} is older than {prev.snapshot_date}"
        )
    docs = sorted(source.documents, key=lambda d: d.url)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parsed = list(pool.map(lambda d: prepare_document(d, source), docs))
    else:
        parsed = [prepare_document(d, source) for d in docs]

    max_year = store.max_year if store.max_year is not None else date.today().year + 1
    report = IngestReport(domain=source.domain)
    kept: list[str] = []
    with store._lock:
        for p in parsed:
            if p.meta is None:
                report.rejected += 1
                report.rejections[p.url] = p.reason or "rejected"
                existing = store.record_for_url(p.url)
                if existing is not None and prev is not None and p.url in prev.urls:
                    # was indexed before and no longer qualifies
                    report.removed += drop_version(store, p.url)
                continue
            kept.append(p.url)
            existing = store.record_for_url(p.url)
            if existing is None:
                rid = store.new_id()
                store.upsert(_record_from(p, rid, source.snapshot_date, max_year))
                report.added += 1
                report.touched.append(rid)
                continue
            old = store.get(existing)
            if old.primary is not None and old.primary.url == p.url:
                fresh = _record_from(p, existing, old.indexed_at, max_year)
                new = old.replace(
                    title=fresh.title,
                    authors=fresh.authors,
                    pub_year=fresh.pub_year,
                    source_name=fresh.source_name,
                    language=fresh.language,
                    doc_type=fresh.doc_type,
                    abstract=fresh.abstract,
                    raw_references=fresh.raw_references,
                    online_at=fresh.online_at,
                    versions=tuple(p.version if v.url == p.url else v for v in old.versions),
                )
            else:
                new = old.replace(versions=tuple(p.version if v.url == p.url else v for v in old.versions))
            if new == old:
                report.unchanged += 1
                continue
            if new.raw_references != old.raw_references:
                store.retract_citations(existing)
            store.upsert(new)
            report.updated += 1
            report.touched.append(existing)

        if prev is not None:
            current = {d.url for d in docs}
            for url in sorted(set(prev.urls) - current):
                report.removed += drop_version(store, url)
        store.domains[source.domain] = DomainState(source.snapshot_date, sorted(kept))
    return report


# -- snapshot directories --------------------------------------------------

MANIFEST = "manifest.json"


def write_structured_text(text: StructuredText, path: Path) -> None:
    lines = []
    for b in text.blocks:
        clean = b.text.replace("\t", " ").replace("\n", " ")
        lines.append(f"{b.page}\t{b.font_size:g}\t{clean}")
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_structured_text(path: Path, searchable: bool = True) -> StructuredText:
    blocks = []
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            page, size, text = line.split("\t", 2)
            blocks.append(TextBlock(text=text, font_size=float(size), page=int(page)))
        except ValueError as exc:
            raise ValueError(f"{path}:{n}: expected page<TAB>font_size<TAB>text") from exc
    return StructuredText(blocks=blocks, searchable=searchable)


def write_snapshot(source: SourceSnapshot, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    docs = []
    for i, d in enumerate(sorted(source.documents, key=lambda d: d.url)):
        fname = f"doc{i:05d}.txt"
        write_structured_text(d.body, directory / fname)
        docs.append({
            "url": d.url,
            "file": fname,
            "byte_size": d.byte_size,
            "file_kind": d.file_kind.value,
            "abstract_visible": d.abstract_visible,
            "searchable": d.body.searchable,
            "meta_tags": [list(t) for t in d.meta_tags],
        })
    manifest = {
        "domain": source.domain,
        "snapshot_date": source.snapshot_date.isoformat(),
        "location_whitelisted": source.location_whitelisted,
        "source_type": source.source_type.value,
        "documents": docs,
    }
    (directory / MANIFEST).write_text(json.dumps(manifest, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")
    return directory


def read_snapshot(directory: str | Path) -> SourceSnapshot:
    directory = Path(directory)
    m = json.loads((directory / MANIFEST).read_text(encoding="utf-8"))
    docs = [
        RawDocument(
            url=d["url"],
            meta_tags=[tuple(t) for t in d.get("meta_tags", [])],
            body=read_structured_text(directory / d["file"], d.get("searchable", True)),
            byte_size=int(d.get("byte_size", 0)),
            file_kind=FileKind(d.get("file_kind", "html")),
            abstract_visible=bool(d.get("abstract_visible", True)),
        )
        for d in m.get("documents", [])
    ]
    st = m.get("source_type")
    return SourceSnapshot(
        domain=m["domain"],
        snapshot_date=date.fromisoformat(m["snapshot_date"]),
        documents=docs,
        location_whitelisted=bool(m.get("location_whitelisted", False)),
        source_type=SourceType(st) if st else None,
    )


def find_snapshots(root: str | Path) -> list[SourceSnapshot]:
    """All snapshots under ``root`` ordered by (date, domain)."""
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"not a snapshot directory: {root}")
    snaps = [read_snapshot(p.parent) for p in sorted(root.rglob(MANIFEST))]
    return sorted(snaps, key=lambda s: (s.snapshot_date, s.domain))
