"""Records, sources and the in-memory corpus store.

Every other module reads and writes documents through :class:`CorpusStore`.
Records are treated as immutable values: the store swaps whole records on
update, so a shallow copy of its table is a consistent point-in-time view.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import threading
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Iterable, Iterator

from .text import normalize_name

MIN_YEAR = 1500


def current_year() -> int:
    return date.today().year


class Kind(str, enum.Enum):
    FULL = "full"
    CITATION_STUB = "citation_stub"


class StubLinkage(str, enum.Enum):
    LINKED = "linked"
    UNLINKED = "unlinked"
    NOT_APPLICABLE = "not_applicable"


class Language(str, enum.Enum):
    """The 13 languages offered by the search filter, plus ``unknown``."""

    ZH_HANS = "zh_hans"
    ZH_HANT = "zh_hant"
    NL = "nl"
    EN = "en"
    FR = "fr"
    DE = "de"
    IT = "it"
    JA = "ja"
    KO = "ko"
    PL = "pl"
    PT = "pt"
    ES = "es"
    TR = "tr"
    UNKNOWN = "unknown"


LANGUAGE_ALIASES = {
    "zh": Language.ZH_HANS,
    "zh-cn": Language.ZH_HANS,
    "zh-hans": Language.ZH_HANS,
    "zh-tw": Language.ZH_HANT,
    "zh-hant": Language.ZH_HANT,
    "chinese": Language.ZH_HANS,
    "dutch": Language.NL,
    "english": Language.EN,
    "french": Language.FR,
    "german": Language.DE,
    "italian": Language.IT,
    "japanese": Language.JA,
    "korean": Language.KO,
    "polish": Language.PL,
    "portuguese": Language.PT,
    "spanish": Language.ES,
    "turkish": Language.TR,
}


def parse_language(value: str | None) -> Language:
    if not value:
        return Language.UNKNOWN
    v = value.strip().lower().replace("_", "-")
    try:
        return Language(v.replace("-", "_"))
    except ValueError:
        pass
    if v in LANGUAGE_ALIASES:
        return LANGUAGE_ALIASES[v]
    # "en-US" and friends
    head = v.split("-")[0]
    try:
        return Language(head)
    except ValueError:
        return LANGUAGE_ALIASES.get(head, Language.UNKNOWN)


class DocType(str, enum.Enum):
    ARTICLE = "article"
    BOOK_CHAPTER = "book_chapter"
    THESIS = "thesis"
    CONFERENCE = "conference"
    REPORT = "report"
    PATENT = "patent"
    OTHER = "other"
    UNKNOWN = "unknown"


class SourceType(str, enum.Enum):
    PUBLISHER = "publisher"
    REPOSITORY = "repository"
    DATABASE = "database"
    SOCIAL = "social"
    UNIVERSITY = "university"
    OTHER = "other"


class FileKind(str, enum.Enum):
    HTML = "html"
    PDF = "pdf"
    DOC = "doc"
    OTHER = "other"


class InvariantViolation(ValueError):
    """A record failed validation; ``name`` identifies the broken rule."""

    def __init__(self, name: str, detail: str = ""):
        super().__init__(f"{name}: {detail}" if detail else name)
        self.name = name


@dataclass(frozen=True)
class AuthorName:
    surname: str
    given_initials: str = ""
    full_given: str | None = None

    @property
    def key(self) -> tuple[str, str]:
        return (self.surname, self.given_initials)

    def display(self) -> str:
        given = self.full_given or " ".join(f"{c}." for c in self.given_initials)
        return f"{self.surname}, {given}".rstrip(", ")


@dataclass(frozen=True)
class VersionRef:
    url: str
    source_domain: str
    source_type: SourceType = SourceType.OTHER
    byte_size: int = 0
    has_searchable_text: bool = True
    file_kind: FileKind = FileKind.HTML


@dataclass(frozen=True)
class DocumentRecord:
    record_id: str
    kind: Kind
    title: str
    authors: tuple[AuthorName, ...] = ()
    pub_year: int | None = None
    source_name: str | None = None
    language: Language = Language.UNKNOWN
    doc_type: DocType = DocType.UNKNOWN
    versions: tuple[VersionRef, ...] = ()
    primary_version: int | None = None
    abstract: str | None = None
    raw_references: tuple[str, ...] = ()
    cited_by: frozenset[str] = frozenset()
    indexed_at: date = date(1970, 1, 1)
    online_at: date | None = None
    stub_linkage: StubLinkage = StubLinkage.NOT_APPLICABLE

    @property
    def is_stub(self) -> bool:
        return self.kind is Kind.CITATION_STUB

    @property
    def primary(self) -> VersionRef | None:
        if self.primary_version is None:
            return None
        return self.versions[self.primary_version]

    @property
    def first_surname(self) -> str | None:
        return self.authors[0].surname if self.authors else None

    def replace(self, **changes) -> "DocumentRecord":
        return dataclasses.replace(self, **changes)


def validate(record: DocumentRecord, max_year: int | None = None) -> None:
    """Raise :class:`InvariantViolation` if ``record`` breaks a type rule."""
    max_year = (current_year() + 1) if max_year is None else max_year
    if not record.record_id:
        raise InvariantViolation("missing-id")
    if record.kind is Kind.CITATION_STUB:
        if record.versions:
            raise InvariantViolation("stub-has-versions", record.record_id)
        if record.primary_version is not None:
            raise InvariantViolation("stub-has-primary", record.record_id)
        if record.stub_linkage is StubLinkage.NOT_APPLICABLE:
            raise InvariantViolation("stub-linkage-missing", record.record_id)
        if record.stub_linkage is StubLinkage.LINKED and not (record.title and record.authors):
            raise InvariantViolation("linked-stub-incomplete", record.record_id)
    else:
        if record.stub_linkage is not StubLinkage.NOT_APPLICABLE:
            raise InvariantViolation("full-has-stub-linkage", record.record_id)
        if record.primary_version is None or not (0 <= record.primary_version < len(record.versions)):
            raise InvariantViolation("full-needs-primary", record.record_id)
    if record.record_id in record.cited_by:
        raise InvariantViolation("self-citation", record.record_id)
    if record.pub_year is not None and not (MIN_YEAR <= record.pub_year <= max_year):
        raise InvariantViolation("year-out-of-range", str(record.pub_year))
    for author in record.authors:
        if not author.surname:
            raise InvariantViolation("author-without-surname", record.record_id)
    for v in record.versions:
        if not v.url:
            raise InvariantViolation("version-without-url", record.record_id)
        if v.byte_size < 0:
            raise InvariantViolation("negative-byte-size", v.url)


@dataclass
class RecordFilter:
    kinds: frozenset[Kind] | None = None
    year_range: tuple[int, int] | None = None
    languages: frozenset[Language] | None = None

    def __post_init__(self):
        if self.year_range is not None and self.year_range[0] > self.year_range[1]:
            raise ValueError(f"bad year range {self.year_range}")

    def matches(self, r: DocumentRecord) -> bool:
        if self.kinds is not None and r.kind not in self.kinds:
            return False
        if self.year_range is not None:
            if r.pub_year is None or not (self.year_range[0] <= r.pub_year <= self.year_range[1]):
                return False
        if self.languages is not None and r.language not in self.languages:
            return False
        return True


@dataclass
class DomainState:
    """What the store remembers about the last ingested snapshot of a domain."""

    snapshot_date: date
    urls: list[str] = field(default_factory=list)


class CorpusStore:
    """Thread-safe record table plus the indexes the pipeline needs.

    Besides records it keeps a url -> record_id index, the forwarding table
    for ids retired by version merges, the reverse citation index
    (citing id -> ids it cites) and per-domain snapshot state.
    """

    def __init__(self, max_year: int | None = None):
        self._records: dict[str, DocumentRecord] = {}
        self._cites: dict[str, set[str]] = {}
        self._by_url: dict[str, str] = {}
        self._forward: dict[str, str] = {}
        self._by_surname: dict[str, set[str]] = {}
        self.domains: dict[str, DomainState] = {}
        self._next_id = 1
        self._lock = threading.RLock()
        self.max_year = max_year

    # -- identity -------------------------------------------------------
    def new_id(self) -> str:
        with self._lock:
            rid = f"r{self._next_id:07d}"
            self._next_id += 1
            return rid

    def resolve(self, record_id: str) -> str:
        """Follow merge forwarding to the surviving id."""
        seen = set()
        while record_id in self._forward and record_id not in seen:
            seen.add(record_id)
            record_id = self._forward[record_id]
        return record_id

    # -- reads ----------------------------------------------------------
    def get(self, record_id: str) -> DocumentRecord | None:
        return self._records.get(record_id)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[DocumentRecord]:
        return iter(self.snapshot().values())

    def ids(self) -> list[str]:
        return sorted(self._records)

    def snapshot(self) -> dict[str, DocumentRecord]:
        with self._lock:
            return dict(self._records)

    def count(self, flt: RecordFilter | None = None) -> int:
        records = self.snapshot().values()
        if flt is None:
            return len(records)
        return sum(1 for r in records if flt.matches(r))

    def record_for_url(self, url: str) -> str | None:
        rid = self._by_url.get(url)
        return None if rid is None else self.resolve(rid)

    def ids_by_surname(self, surname: str) -> list[str]:
        """Ids whose first author has this surname (compared normalised)."""
        return sorted(self._by_surname.get(normalize_name(surname), ()))

    def _index_surname(self, r: DocumentRecord, add: bool) -> None:
        key = normalize_name(r.first_surname or "")
        bucket = self._by_surname.setdefault(key, set())
        if add:
            bucket.add(r.record_id)
        else:
            bucket.discard(r.record_id)

    def cites(self, record_id: str) -> frozenset[str]:
        return frozenset(self._cites.get(record_id, ()))

    # -- writes ---------------------------------------------------------
    def upsert(self, record: DocumentRecord) -> str:
        validate(record, self.max_year)
        with self._lock:
            for cid in record.cited_by:
                if cid not in self._records and cid != record.record_id:
                    raise InvariantViolation("dangling-citation", cid)
            old = self._records.get(record.record_id)
            if old is not None:
                for cid in old.cited_by - record.cited_by:
                    self._cites.get(cid, set()).discard(record.record_id)
                for v in old.versions:
                    if self._by_url.get(v.url) == record.record_id:
                        del self._by_url[v.url]
                self._index_surname(old, add=False)
            self._index_surname(record, add=True)
            for cid in record.cited_by:
                self._cites.setdefault(cid, set()).add(record.record_id)
            for v in record.versions:
                self._by_url[v.url] = record.record_id
            self._records[record.record_id] = record
            self._forward.pop(record.record_id, None)
            return record.record_id

    def add_citation(self, citing: str, cited: str) -> bool:
        """Link ``citing`` -> ``cited``; False when the link already existed."""
        with self._lock:
            target = self._records[cited]
            if citing in target.cited_by:
                return False
            if citing == cited:
                raise InvariantViolation("self-citation", cited)
            self._records[cited] = target.replace(cited_by=target.cited_by | {citing})
            self._cites.setdefault(citing, set()).add(cited)
            return True

    def retract_citations(self, citing: str) -> list[str]:
        """Drop every link made by ``citing``; returns ids that lost a citation."""
        with self._lock:
            touched = sorted(self._cites.pop(citing, set()))
            for cid in touched:
                r = self._records.get(cid)
                if r is not None:
                    self._records[cid] = r.replace(cited_by=r.cited_by - {citing})
            return touched

    def remove(self, record_id: str, forward_to: str | None = None) -> DocumentRecord | None:
        """Delete a record.

        Its outbound citations are retracted and its id is dropped from the
        reverse index.  With ``forward_to`` the id is retired instead: later
        lookups through :meth:`resolve` land on the survivor.
        """
        with self._lock:
            rec = self._records.pop(record_id, None)
            if rec is None:
                return None
            self.retract_citations(record_id)
            self._index_surname(rec, add=False)
            for cid in rec.cited_by:
                s = self._cites.get(cid)
                if s is not None:
                    s.discard(record_id)
                    if not s:
                        del self._cites[cid]
            for v in rec.versions:
                if self._by_url.get(v.url) == record_id:
                    del self._by_url[v.url]
            if forward_to is not None:
                self._forward[record_id] = forward_to
            return rec

    def rename_citer(self, old: str, new: str) -> None:
        """Rewrite every link made by ``old`` so it is made by ``new``."""
        with self._lock:
            targets = self._cites.pop(old, set())
            for cid in sorted(targets):
                r = self._records.get(cid)
                if r is None:
                    continue
                cited_by = r.cited_by - {old}
                if cid != new:
                    cited_by = cited_by | {new}
                    self._cites.setdefault(new, set()).add(cid)
                self._records[cid] = r.replace(cited_by=cited_by)

    # -- persistence ----------------------------------------------------
    def dumps(self) -> str:
        return "".join(json.dumps(record_to_dict(self._records[k]), ensure_ascii=False, sort_keys=False) + "\n"
                       for k in sorted(self._records))

    def state_dict(self) -> dict:
        return {
            "next_id": self._next_id,
            "forward": dict(sorted(self._forward.items())),
            "domains": {
                d: {"snapshot_date": s.snapshot_date.isoformat(), "urls": sorted(s.urls)}
                for d, s in sorted(self.domains.items())
            },
        }

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.dumps(), encoding="utf-8")
        state_path(path).write_text(json.dumps(self.state_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def loads(cls, text: str, state: dict | None = None, max_year: int | None = None) -> "CorpusStore":
        store = cls(max_year=max_year)
        records = [record_from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
        for r in records:
            store._records[r.record_id] = r
        for r in records:
            validate(r, store.max_year)
            for cid in r.cited_by:
                store._cites.setdefault(cid, set()).add(r.record_id)
            for v in r.versions:
                store._by_url[v.url] = r.record_id
            store._index_surname(r, add=True)
        if state:
            store._next_id = state.get("next_id", 1)
            store._forward = dict(state.get("forward", {}))
            store.domains = {
                d: DomainState(date.fromisoformat(s["snapshot_date"]), list(s["urls"]))
                for d, s in state.get("domains", {}).items()
            }
        numeric = [int(k[1:]) for k in store._records if k[:1] == "r" and k[1:].isdigit()]
        store._next_id = max([store._next_id, *(n + 1 for n in numeric)])
        return store

    @classmethod
    def load(cls, path: str | Path, max_year: int | None = None) -> "CorpusStore":
        path = Path(path)
        if not path.exists():
            return cls(max_year=max_year)
        sp = state_path(path)
        state = json.loads(sp.read_text(encoding="utf-8")) if sp.exists() else None
        return cls.loads(path.read_text(encoding="utf-8"), state, max_year=max_year)


def state_path(corpus_path: Path) -> Path:
    return corpus_path.with_name(corpus_path.name + ".state.json")


def upsert_record(store: CorpusStore, record: DocumentRecord) -> str:
    return store.upsert(record)


def get_record(store: CorpusStore, record_id: str) -> DocumentRecord | None:
    return store.get(record_id)


def count_records(store: CorpusStore, flt: RecordFilter | None = None) -> int:
    return store.count(flt)


# -- (de)serialisation ----------------------------------------------------

def record_to_dict(r: DocumentRecord) -> dict:
    return {
        "record_id": r.record_id,
        "kind": r.kind.value,
        "stub_linkage": r.stub_linkage.value,
        "title": r.title,
        "authors": [
            {"surname": a.surname, "given_initials": a.given_initials, "full_given": a.full_given}
            for a in r.authors
        ],
        "pub_year": r.pub_year,
        "source_name": r.source_name,
        "language": r.language.value,
        "doc_type": r.doc_type.value,
        "versions": [
            {
                "url": v.url,
                "source_domain": v.source_domain,
                "source_type": v.source_type.value,
                "byte_size": v.byte_size,
                "has_searchable_text": v.has_searchable_text,
                "file_kind": v.file_kind.value,
            }
            for v in r.versions
        ],
        "primary_version": r.primary_version,
        "abstract": r.abstract,
        "raw_references": list(r.raw_references),
        "cited_by": sorted(r.cited_by),
        "indexed_at": r.indexed_at.isoformat(),
        "online_at": r.online_at.isoformat() if r.online_at else None,
    }


def record_from_dict(d: dict) -> DocumentRecord:
    return DocumentRecord(
        record_id=d["record_id"],
        kind=Kind(d["kind"]),
        stub_linkage=StubLinkage(d.get("stub_linkage", "not_applicable")),
        title=d.get("title", ""),
        authors=tuple(AuthorName(a["surname"], a.get("given_initials", ""), a.get("full_given")) for a in d.get("authors", [])),
        pub_year=d.get("pub_year"),
        source_name=d.get("source_name"),
        language=Language(d.get("language", "unknown")),
        doc_type=DocType(d.get("doc_type", "unknown")),
        versions=tuple(
            VersionRef(
                url=v["url"],
                source_domain=v["source_domain"],
                source_type=SourceType(v.get("source_type", "other")),
                byte_size=v.get("byte_size", 0),
                has_searchable_text=v.get("has_searchable_text", True),
                file_kind=FileKind(v.get("file_kind", "html")),
            )
            for v in d.get("versions", [])
        ),
        primary_version=d.get("primary_version"),
        abstract=d.get("abstract"),
        raw_references=tuple(d.get("raw_references", [])),
        cited_by=frozenset(d.get("cited_by", [])),
        indexed_at=date.fromisoformat(d["indexed_at"]),
        online_at=date.fromisoformat(d["online_at"]) if d.get("online_at") else None,
    )


def iter_records(records: Iterable[DocumentRecord], flt: RecordFilter) -> Iterator[DocumentRecord]:
    return (r for r in records if flt.matches(r))
