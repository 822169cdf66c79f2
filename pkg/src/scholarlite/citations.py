"""Reference matching, [CITATION] stubs, version grouping and merging."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date

from .model import (
    AuthorName,
    CorpusStore,
    DocumentRecord,
    Kind,
    MIN_YEAR,
    SourceType,
    StubLinkage,
    VersionRef,
)
from .text import normalize_name, similarity

SIMILARITY_THRESHOLD = 0.90
YEAR_TOLERANCE = 1

SOURCE_PRIORITY = {
    SourceType.PUBLISHER: 0,
    SourceType.DATABASE: 1,
    SourceType.REPOSITORY: 2,
    SourceType.UNIVERSITY: 3,
    SourceType.OTHER: 3,
    SourceType.SOCIAL: 4,
}


class StubCannotCite(ValueError):
    def __init__(self, record_id: str):
        super().__init__(f"stub-cannot-cite: {record_id}")


class StaleGroup(ValueError):
    def __init__(self, record_id: str):
        super().__init__(f"stale-group: {record_id} is no longer in the store")


class RecordNotFound(KeyError):
    pass


@dataclass(frozen=True)
class ParsedReference:
    title: str | None = None
    first_author_surname: str | None = None
    year: int | None = None


@dataclass
class RawReference:
    text: str
    parsed: ParsedReference | None = None

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValueError("reference text must be non-empty")


@dataclass
class VersionGroup:
    member_ids: frozenset[str]
    chosen_primary: str

    def __post_init__(self):
        if len(self.member_ids) < 2:
            raise ValueError("a version group needs at least two members")
        if self.chosen_primary not in self.member_ids:
            raise ValueError("chosen primary must be a member")


# -- reference strings ----------------------------------------------------

_LEADING_NUMBER = re.compile(r"^\s*(?:\[\d+\]|\d+\.)\s*")
_YEAR_TOKEN = re.compile(r"(?<![\d])(\d{4})(?![\d])")
_QUOTED = re.compile(r"[\"“”]([^\"“”]{3,})[\"“”]")
_APA = re.compile(r"^(?P<authors>.*?)\(\s*(?P<year>\d{4})[a-z]?\s*\)\s*[.:,]?\s*(?P<rest>.*)$")
_INITIAL_TOKEN = re.compile(r"^(?:[A-Z]\.?-?)+\.?$|^(?:[A-Z]\.)+[A-Z]?$")


def _first_year(text: str, max_year: int) -> int | None:
    for m in _YEAR_TOKEN.finditer(text):
        y = int(m.group(1))
        if MIN_YEAR <= y <= max_year:
            return y
    return None


def _surname_from(author_part: str) -> str | None:
    words = [w.strip(" .;") for w in re.split(r"\s+", author_part.strip()) if w.strip(" .;")]
    words = [w for w in words if w.lower() not in ("and", "et", "al")]
    if not words:
        return None
    for w in words:
        if not _INITIAL_TOKEN.match(w + ".") and re.search(r"[^\W\d_]{2,}", w):
            return w
    return None


def _clean_title(text: str) -> str | None:
    text = re.sub(r"\(?\b\d{4}\b\)?", " ", text)
    text = re.sub(r"\s+", " ", text).strip(" .,;:-")
    return text if re.search(r"[^\W\d_]{2,}", text) else None


def parse_reference(ref: RawReference | str, max_year: int | None = None) -> ParsedReference | None:
    """Split a free-form reference into (title, first author surname, year)."""
    text = ref.text if isinstance(ref, RawReference) else ref
    max_year = date.today().year + 1 if max_year is None else max_year
    body = _LEADING_NUMBER.sub("", text).strip()
    year = _first_year(body, max_year)

    surname = None
    title = None
    quoted = _QUOTED.findall(body)
    apa = _APA.match(body)
    if apa:
        surname = _surname_from(apa.group("authors").split(",")[0])
        rest = apa.group("rest")
        title = _clean_title(re.split(r"\.\s+|\.$", rest, maxsplit=1)[0])
    else:
        head = re.split(r"[,:(]", body, maxsplit=1)
        surname = _surname_from(head[0])
        if len(head) > 1 and ":" in body[: len(head[0]) + 1]:
            rest = body[len(head[0]) + 1:]
            title = _clean_title(re.split(r"\.\s+", rest, maxsplit=1)[0])
        else:
            segments = [s for s in re.split(r"\.\s+", body) if s.strip()]
            candidates = [c for c in (_clean_title(s) for s in segments[1:]) if c]
            title = max(candidates, key=len) if candidates else None
    if quoted:
        title = max(quoted, key=len).strip(" .,")
    if surname is None and title is None and year is None:
        return None
    if year is None and title is None:
        return None
    return ParsedReference(title=title, first_author_surname=surname, year=year)


# -- matching ---------------------------------------------------------------

def _match_score(parsed: ParsedReference, r: DocumentRecord, threshold: float) -> float | None:
    if parsed.title is None or parsed.year is None or parsed.first_author_surname is None:
        return None
    if r.pub_year is None or abs(r.pub_year - parsed.year) > YEAR_TOLERANCE:
        return None
    if normalize_name(r.first_surname or "") != normalize_name(parsed.first_author_surname):
        return None
    s = similarity(parsed.title, r.title, threshold)
    return s if s >= threshold else None


def match_reference(
    parsed: ParsedReference,
    store: CorpusStore,
    threshold: float = SIMILARITY_THRESHOLD,
) -> str | None:
    """Best record for a parsed reference, or None if nothing clears the bar.

    Ties on similarity go to the most cited record, then the smallest id.
    """
    if parsed.first_author_surname is None:
        return None
    best: tuple | None = None
    for rid in store.ids_by_surname(parsed.first_author_surname):
        r = store.get(rid)
        if r is None:
            continue
        s = _match_score(parsed, r, threshold)
        if s is None:
            continue
        key = (-s, -len(r.cited_by), rid)
        if best is None or key < best:
            best = key
    return None if best is None else best[2]


def record_citation(
    citing: str,
    ref: RawReference | str,
    store: CorpusStore,
    threshold: float = SIMILARITY_THRESHOLD,
) -> tuple[str | None, bool]:
    """Link ``citing`` to whatever ``ref`` points at, creating a stub on a miss.

    Returns ``(cited_id, created_stub)``; ``cited_id`` is None when the
    reference carries too little to match or to seed a stub.
    """
    if isinstance(ref, str):
        ref = RawReference(ref)
    with store._lock:
        src = store.get(citing)
        if src is None:
            raise RecordNotFound(citing)
        if src.is_stub:
            raise StubCannotCite(citing)
        parsed = ref.parsed or parse_reference(ref, store.max_year)
        if parsed is None:
            return None, False
        cited = match_reference(parsed, store, threshold)
        if cited == citing:
            return None, False
        if cited is not None:
            store.add_citation(citing, cited)
            return cited, False
        if parsed.title is None:
            return None, False
        authors = (AuthorName(parsed.first_author_surname),) if parsed.first_author_surname else ()
        stub = DocumentRecord(
            record_id=store.new_id(),
            kind=Kind.CITATION_STUB,
            stub_linkage=StubLinkage.UNLINKED,
            title=parsed.title,
            authors=authors,
            pub_year=parsed.year,
            indexed_at=src.indexed_at,
        )
        store.upsert(stub)
        store.add_citation(citing, stub.record_id)
        return stub.record_id, True


@dataclass
class LinkReport:
    processed: int = 0
    matched: int = 0
    stubs_created: int = 0
    unparsed: int = 0

    def as_dict(self) -> dict:
        return {
            "references_processed": self.processed,
            "matched": self.matched,
            "stubs_created": self.stubs_created,
            "unparsed": self.unparsed,
        }


def link_citations(store: CorpusStore, record_ids: list[str] | None = None) -> LinkReport:
    """Run :func:`record_citation` over the references of full records."""
    report = LinkReport()
    ids = store.ids() if record_ids is None else sorted({store.resolve(r) for r in record_ids})
    for rid in ids:
        r = store.get(rid)
        if r is None or r.is_stub:
            continue
        for text in r.raw_references:
            if not text.strip():
                continue
            report.processed += 1
            cited, created = record_citation(rid, text, store)
            if cited is None:
                report.unparsed += 1
            elif created:
                report.stubs_created += 1
            else:
                report.matched += 1
    return report


# -- versions ---------------------------------------------------------------

def _version_key(v: VersionRef) -> tuple:
    return (SOURCE_PRIORITY.get(v.source_type, 3), v.url)


def best_version_index(versions: tuple[VersionRef, ...] | list[VersionRef]) -> int | None:
    if not versions:
        return None
    return min(range(len(versions)), key=lambda i: _version_key(versions[i]))


def select_primary(members: list[DocumentRecord]) -> str:
    """The member whose primary copy is most authoritative.

    Publisher copies beat databases, then repositories, university and other
    hosts, then social sites.  Stubs only win if every member is a stub.
    """
    if not members:
        raise ValueError("select_primary needs at least one member")

    def key(r: DocumentRecord) -> tuple:
        if r.primary is None:
            return (1, 99, "", r.record_id)
        return (0, *_version_key(r.primary), r.record_id)

    return min(members, key=key).record_id


class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb))
            self.parent[hi] = lo


def _same_version(a: DocumentRecord, b: DocumentRecord, threshold: float) -> bool:
    if a.pub_year is None or a.pub_year != b.pub_year:
        return False
    if normalize_name(a.first_surname or "") != normalize_name(b.first_surname or ""):
        return False
    return similarity(a.title, b.title, threshold) >= threshold


def detect_versions(store: CorpusStore, threshold: float = SIMILARITY_THRESHOLD) -> list[VersionGroup]:
    """Maximal groups of records that are copies of one work.

    Full records seed groups (same year, same first surname, similar title,
    closed transitively). Stubs join a group only through a full record.
    """
    snap = store.snapshot()
    blocks: dict[tuple[str, int], list[DocumentRecord]] = {}
    for r in snap.values():
        if r.pub_year is None:
            continue
        blocks.setdefault((normalize_name(r.first_surname or ""), r.pub_year), []).append(r)

    uf = _UnionFind()
    for members in blocks.values():
        fulls = sorted((r for r in members if not r.is_stub), key=lambda r: r.record_id)
        stubs = sorted((r for r in members if r.is_stub), key=lambda r: r.record_id)
        for i, a in enumerate(fulls):
            for b in fulls[i + 1:]:
                if _same_version(a, b, threshold):
                    uf.union(a.record_id, b.record_id)
        for s in stubs:
            for a in fulls:
                if _same_version(a, s, threshold):
                    uf.union(a.record_id, s.record_id)

    groups: dict[str, set[str]] = {}
    for rid in uf.parent:
        groups.setdefault(uf.find(rid), set()).add(rid)
    out = []
    for root in sorted(groups):
        ids = groups[root]
        if len(ids) < 2:
            continue
        chosen = select_primary([snap[i] for i in ids])
        out.append(VersionGroup(frozenset(ids), chosen))
    return out


def merge_versions(group: VersionGroup, store: CorpusStore) -> str:
    """Fold every member of ``group`` into ``group.chosen_primary``.

    The survivor collects all copies and the union of citing sets; the other
    ids are retired and forwarded to the survivor, and citations they made
    are re-attributed to it.
    """
    with store._lock:
        for mid in sorted(group.member_ids):
            if mid not in store:
                raise StaleGroup(mid)
        survivor_id = group.chosen_primary
        others = sorted(group.member_ids - {survivor_id})
        for mid in others:
            store.rename_citer(mid, survivor_id)
        members = [store.get(m) for m in sorted(group.member_ids)]
        survivor = store.get(survivor_id)

        cited_by: set[str] = set()
        for m in members:
            cited_by |= m.cited_by
        cited_by -= group.member_ids

        versions: list[VersionRef] = list(survivor.versions)
        seen = {v.url for v in versions}
        for m in members:
            for v in m.versions:
                if v.url not in seen:
                    versions.append(v)
                    seen.add(v.url)
        refs = survivor.raw_references
        if not refs:
            refs = next((m.raw_references for m in members if m.raw_references), ())

        for mid in others:
            store.remove(mid, forward_to=survivor_id)
        merged = survivor.replace(
            versions=tuple(versions),
            primary_version=best_version_index(versions) if not survivor.is_stub else None,
            cited_by=frozenset(cited_by),
            raw_references=refs,
            abstract=survivor.abstract or next((m.abstract for m in members if m.abstract), None),
        )
        store.upsert(merged)
        return survivor_id


def merge_all(store: CorpusStore, threshold: float = SIMILARITY_THRESHOLD) -> list[VersionGroup]:
    groups = detect_versions(store, threshold)
    for g in groups:
        merge_versions(g, store)
    return groups


def drop_version(store: CorpusStore, url: str) -> int:
    """Forget the copy at ``url``; drops the whole record if it was the last one.

    Returns 1 when something was removed, else 0.  Removing a record retracts
    every citation it made and deletes stubs left with no citations.
    """
    with store._lock:
        rid = store.record_for_url(url)
        if rid is None:
            return 0
        rec = store.get(rid)
        remaining = tuple(v for v in rec.versions if v.url != url)
        if remaining:
            store.upsert(rec.replace(versions=remaining, primary_version=best_version_index(remaining)))
            return 1
        touched = store.retract_citations(rid)
        store.remove(rid)
        for cid in touched:
            t = store.get(cid)
            if t is not None and t.is_stub and not t.cited_by:
                store.remove(cid)
        return 1


def citation_count(record_id: str, store: CorpusStore, window: tuple[int, int] | None = None) -> int:
    r = store.get(record_id)
    if r is None:
        raise RecordNotFound(record_id)
    if window is None:
        return len(r.cited_by)
    lo, hi = window
    n = 0
    for cid in r.cited_by:
        c = store.get(cid)
        if c is not None and c.pub_year is not None and lo <= c.pub_year <= hi:
            n += 1
    return n
