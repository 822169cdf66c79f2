from __future__ import annotations

import sys
from pathlib import Path

import pytest

from scholarlite.model import (
    AuthorName, CorpusStore, DocType, DocumentRecord, Kind, Language, SourceType, StubLinkage, VersionRef,
)
from scholarlite.pipeline import ingest_all
from scholarlite.synth import CorpusConfig, generate_corpus

sys.path.insert(0, str(Path(__file__).parent))


def version(url: str, domain: str | None = None, stype: SourceType = SourceType.PUBLISHER) -> VersionRef:
    domain = domain or url.split("/")[2]
    return VersionRef(url=url, source_domain=domain, source_type=stype)


def full(
    rid: str,
    title: str = "A study of things",
    surname: str = "Smith",
    year: int | None = 2010,
    urls: tuple[str, ...] | None = None,
    stype: SourceType = SourceType.PUBLISHER,
    language: Language = Language.EN,
    doc_type: DocType = DocType.ARTICLE,
    source_name: str | None = None,
    cited_by=(),
    initials: str = "J",
    **kw,
) -> DocumentRecord:
    urls = urls or (f"https://pub.example/{rid}.pdf",)
    versions = tuple(version(u, stype=stype) for u in urls)
    return DocumentRecord(
        record_id=rid, kind=Kind.FULL, title=title,
        authors=(AuthorName(surname, initials),), pub_year=year, source_name=source_name,
        language=language, doc_type=doc_type, versions=versions, primary_version=0,
        cited_by=frozenset(cited_by), **kw,
    )


def stub(rid: str, title: str = "Cited thing", surname: str = "Doe", year: int | None = 2005, cited_by=()) -> DocumentRecord:
    return DocumentRecord(
        record_id=rid, kind=Kind.CITATION_STUB, title=title, authors=(AuthorName(surname),),
        pub_year=year, stub_linkage=StubLinkage.UNLINKED, cited_by=frozenset(cited_by),
    )


def store_of(*records: DocumentRecord) -> CorpusStore:
    s = CorpusStore()
    # citers first so cited_by never dangles
    pending = list(records)
    while pending:
        progressed = False
        for r in list(pending):
            if all(c in s for c in r.cited_by):
                s.upsert(r)
                pending.remove(r)
                progressed = True
        if not progressed:
            raise ValueError("cyclic fixture")
    return s


@pytest.fixture(scope="session")
def synthetic_2k():
    cfg = CorpusConfig(seed=11, n_documents=2000)
    snaps, truth = generate_corpus(cfg)
    store = CorpusStore()
    report = ingest_all(snaps, store)
    return store, truth, report


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
