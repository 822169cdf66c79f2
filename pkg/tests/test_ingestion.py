from datetime import date

import pytest

from scholarlite.citations import link_citations
from scholarlite.ingestion import (
    MAX_FULLTEXT_BYTES, Decision, ImageOnlyText, RawDocument, Route, SourceSnapshot, StaleSnapshot,
    StructuredText, TextBlock, Violation, check_compliance, classify_academic, extract_references,
    find_snapshots, ingest_snapshot, parse_author, parse_fulltext_layout, parse_meta_tags,
    read_snapshot, split_author_list, write_snapshot,
)
from scholarlite.model import CorpusStore, DocType, FileKind, Kind, SourceType

MiB = 2**20


def paper_body(title: str, authors: str = "Ann Lee, Bo Chen", refs=("[1] Garfield, E. (1964). Science citation index. Science.",)):
    blocks = [
        TextBlock(title, 20),
        TextBlock(authors, 14),
        TextBlock("We look at something in depth.", 10),
        TextBlock("Body text goes on for a while and says a lot of things.", 10),
        TextBlock("More body text on the second page.", 10, 2),
    ]
    if refs:
        blocks.append(TextBlock("References", 12, 2))
        blocks += [TextBlock(r, 10, 2) for r in refs]
    return StructuredText(blocks)


def pdf(url: str, title: str, **kw) -> RawDocument:
    return RawDocument(url=url, body=paper_body(title, **kw), byte_size=MiB, file_kind=FileKind.PDF)


# -- meta tags --------------------------------------------------------------

def test_highwire_beats_dublin_core():
    doc = RawDocument("https://x.org/a", meta_tags=[
        ("dublin_core", "dc.title", "DC title"),
        ("highwire", "citation_title", "HW title"),
        ("highwire", "citation_author", "Lee, Ann"),
        ("highwire", "citation_publication_date", "2014/05/02"),
        ("highwire", "citation_journal_title", "J. Things"),
    ])
    meta = parse_meta_tags(doc)
    assert meta.title == "HW title"
    assert meta.scheme == "highwire"
    assert meta.pub_year == 2014
    assert meta.source_name == "J. Things"
    assert meta.doc_type is DocType.ARTICLE
    assert not meta.incomplete_source_fields


def test_no_meta_tags():
    assert parse_meta_tags(RawDocument("https://x.org/a")) is None


def test_dublin_core_only_is_flagged_incomplete():
    doc = RawDocument("https://x.org/a", meta_tags=[
        ("dublin_core", "dc.title", "Only DC"), ("dublin_core", "dc.creator", "Lee, A."), ("dublin_core", "dc.date", "2012"),
    ])
    meta = parse_meta_tags(doc)
    assert meta.title == "Only DC"
    assert meta.incomplete_source_fields


def test_empty_tag_value_skipped_with_diagnostic():
    diags: list[str] = []
    doc = RawDocument("https://x.org/a", meta_tags=[
        ("highwire", "citation_title", ""), ("eprints", "eprints.title", "From eprints"),
    ])
    meta = parse_meta_tags(doc, diags)
    assert meta.title == "From eprints"
    assert any("no value" in d for d in diags)


def test_author_parsing():
    assert parse_author("Lee, Ann B.").key == ("Lee", "AB")
    assert parse_author("J.L. Ortega").key == ("Ortega", "JL")
    names = split_author_list("Ann Lee, Bo Chen and Carl Diaz")
    assert [a.surname for a in names] == ["Lee", "Chen", "Diaz"]


# -- layout ---------------------------------------------------------------

def test_layout_title_and_authors():
    text = StructuredText([TextBlock("T", 20), TextBlock("A, B", 14), TextBlock("abs text", 10), TextBlock("body body", 10)])
    meta = parse_fulltext_layout(text)
    assert meta.title == "T"
    assert [a.surname for a in meta.authors] == ["A", "B"]
    assert meta.abstract == "abs text"


def test_layout_rejects_larger_later_font():
    text = StructuredText([TextBlock("T", 14), TextBlock("Bigger", 20), TextBlock("body", 10)])
    assert parse_fulltext_layout(text) is None


def test_layout_image_only():
    with pytest.raises(ImageOnlyText, match="image-only"):
        parse_fulltext_layout(StructuredText([TextBlock("T", 20)], searchable=False))


# -- references -------------------------------------------------------------

def test_numbered_references_split():
    body = paper_body("T", refs=("[1] One (2001). A.", "[2] Two (2002). B.", "[3] Three (2003). C."))
    assert len(extract_references(body)) == 3


def test_numbered_entries_inside_one_block():
    text = StructuredText([TextBlock("References", 12), TextBlock("1. Aa (2001) x. 2. Bb (2002) y. 3. Cc (2003) z.", 10)])
    assert extract_references(text) == ["1. Aa (2001) x.", "2. Bb (2002) y.", "3. Cc (2003) z."]


def test_no_reference_section():
    assert extract_references(paper_body("T", refs=())) == []


def test_bibliography_heading():
    text = StructuredText([TextBlock("Title", 20), TextBlock("Bibliography", 12), TextBlock("Lee (2001) Stuff.", 10)])
    assert extract_references(text) == ["Lee (2001) Stuff."]


# -- compliance -------------------------------------------------------------

def test_oversize_html():
    r = check_compliance(RawDocument("https://x.org/a", byte_size=6 * MiB))
    assert r.indexable and not r.fulltext_indexed
    assert r.violations == [Violation.OVERSIZE]


def test_oversize_boundary():
    assert check_compliance(RawDocument("https://x.org/a", byte_size=MAX_FULLTEXT_BYTES)).violations == []
    assert check_compliance(RawDocument("https://x.org/a", byte_size=MAX_FULLTEXT_BYTES + 1)).violations == [Violation.OVERSIZE]


def test_clean_pdf():
    r = check_compliance(pdf("https://x.org/a.pdf", "T"))
    assert r.indexable and r.fulltext_indexed and r.violations == []


def test_pdf_without_extension():
    r = check_compliance(pdf("https://x.org/view?id=7", "T"))
    assert not r.indexable
    assert Violation.BAD_PDF_EXTENSION in r.violations


def test_unsearchable_pdf_and_hidden_abstract():
    doc = RawDocument("https://x.org/a.pdf", body=StructuredText(searchable=False), file_kind=FileKind.PDF)
    r = check_compliance(doc)
    assert r.indexable and not r.fulltext_indexed and r.violations == [Violation.UNSEARCHABLE_PDF]
    hidden = RawDocument("https://x.org/a", abstract_visible=False)
    assert not check_compliance(hidden).indexable


# -- classification ----------------------------------------------------------

def test_classification_routes():
    repo = SourceSnapshot("repo.example.org", date(2017, 1, 1), location_whitelisted=True)
    anything = RawDocument("https://repo.example.org/review", body=StructuredText([TextBlock("A book review", 10)]))
    assert classify_academic(anything, repo) == (Decision.ACADEMIC, Route.LOCATION)
    uni = SourceSnapshot("cs.uni.edu", date(2017, 1, 1))
    assert classify_academic(pdf("https://cs.uni.edu/p.pdf", "Paper"), uni) == (Decision.ACADEMIC, Route.PARSER)
    plain = RawDocument("https://cs.uni.edu/news", body=paper_body("News", refs=()))
    assert classify_academic(plain, uni) == (Decision.NON_ACADEMIC, Route.PARSER)


# -- ingestion ----------------------------------------------------------------

def five_docs():
    return [
        pdf(f"https://cs.uni.edu/p{i}.pdf", f"Distinct paper number {word}",
            refs=(f"[1] Lee, A. (2001). Shared background work on {word}.",))
        for i, word in enumerate(["alpha", "bravo", "charlie", "delta", "echo"])
    ]


def test_first_snapshot_adds_five():
    store = CorpusStore()
    r = ingest_snapshot(SourceSnapshot("cs.uni.edu", date(2017, 1, 1), five_docs()), store)
    assert (r.added, r.updated, r.removed, r.rejected) == (5, 0, 0, 0)
    assert store.count() == 5


def test_second_snapshot_drops_and_retracts():
    store = CorpusStore()
    docs = five_docs()
    r1 = ingest_snapshot(SourceSnapshot("cs.uni.edu", date(2017, 1, 1), docs), store)
    link_citations(store, r1.touched)
    stubs = [r for r in store if r.kind is Kind.CITATION_STUB]
    assert len(stubs) == 5 and all(len(s.cited_by) == 1 for s in stubs)
    r2 = ingest_snapshot(SourceSnapshot("cs.uni.edu", date(2017, 2, 1), docs[2:]), store)
    assert r2.removed == 2 and r2.unchanged == 3
    assert store.count() == 3 + 3  # three papers and the three stubs they still cite
    for s in store:
        for citer in s.cited_by:
            assert citer in store


def test_stale_snapshot_rejected():
    store = CorpusStore()
    ingest_snapshot(SourceSnapshot("cs.uni.edu", date(2017, 2, 1), five_docs()), store)
    with pytest.raises(StaleSnapshot):
        ingest_snapshot(SourceSnapshot("cs.uni.edu", date(2017, 1, 1), five_docs()), store)


def test_reingest_is_idempotent():
    store = CorpusStore()
    snap = SourceSnapshot("cs.uni.edu", date(2017, 1, 1), five_docs())
    ingest_snapshot(snap, store)
    before = store.dumps()
    r = ingest_snapshot(snap, store)
    assert (r.added, r.updated, r.removed, r.unchanged) == (0, 0, 0, 5)
    assert store.dumps() == before


def test_whitelisted_repository_takes_book_review():
    store = CorpusStore()
    review = RawDocument("https://repo.example.org/rev1", body=StructuredText([
        TextBlock("Review of a book", 18), TextBlock("Some words about the book.", 10)]))
    r = ingest_snapshot(SourceSnapshot("repo.example.org", date(2017, 1, 1), [review], location_whitelisted=True), store)
    assert r.added == 1
    rec = next(iter(store))
    assert rec.primary.source_type is SourceType.REPOSITORY


def test_non_academic_page_rejected():
    store = CorpusStore()
    page = RawDocument("https://cs.uni.edu/news", body=paper_body("News", refs=()))
    r = ingest_snapshot(SourceSnapshot("cs.uni.edu", date(2017, 1, 1), [page]), store)
    assert r.rejected == 1 and r.rejections == {"https://cs.uni.edu/news": "non_academic"}


def test_snapshot_directory_round_trip(tmp_path):
    doc = five_docs()[0]
    doc.meta_tags = [("highwire", "citation_title", "Tagged")]
    snap = SourceSnapshot("cs.uni.edu", date(2017, 1, 1), [doc, RawDocument("https://cs.uni.edu/x.html")])
    write_snapshot(snap, tmp_path / "2017-01-01" / "cs.uni.edu")
    back = read_snapshot(tmp_path / "2017-01-01" / "cs.uni.edu")
    assert back.domain == snap.domain and back.snapshot_date == snap.snapshot_date
    assert [d.url for d in back.documents] == sorted(d.url for d in snap.documents)
    got = {d.url: d for d in back.documents}[doc.url]
    assert got.body == doc.body and got.meta_tags == doc.meta_tags and got.file_kind is FileKind.PDF
    assert [s.domain for s in find_snapshots(tmp_path)] == ["cs.uni.edu"]
