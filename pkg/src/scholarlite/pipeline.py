"""The fixed indexing order: classify and parse, link citations, merge versions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import groupby

from .citations import LinkReport, link_citations, merge_all
from .ingestion import IngestReport, SourceSnapshot, ingest_snapshot
from .model import CorpusStore, Kind, RecordFilter


@dataclass
class PipelineReport:
    ingest: IngestReport = field(default_factory=IngestReport)
    links: LinkReport = field(default_factory=LinkReport)
    merged_groups: int = 0
    retired: int = 0
    full_records: int = 0
    stubs: int = 0

    def as_dict(self) -> dict:
        d = self.ingest.as_dict()
        d.pop("domain")
        d.update(self.links.as_dict())
        d.update({
            "merged_groups": self.merged_groups,
            "retired_ids": self.retired,
            "full_records": self.full_records,
            "citation_stubs": self.stubs,
        })
        return d


def ingest_all(snapshots: list[SourceSnapshot], store: CorpusStore, workers: int = 1) -> PipelineReport:
    """Apply snapshots crawl by crawl (grouped by date).

    Within each crawl every snapshot is ingested first, then the references
    of touched records are linked, then versions are detected and merged.
    """
    report = PipelineReport()
    ordered = sorted(snapshots, key=lambda s: (s.snapshot_date, s.domain))
    for _, crawl in groupby(ordered, key=lambda s: s.snapshot_date):
        touched: list[str] = []
        for snap in crawl:
            r = ingest_snapshot(snap, store, workers=workers)
            report.ingest += r
            touched.extend(r.touched)
        lr = link_citations(store, touched)
        report.links.processed += lr.processed
        report.links.matched += lr.matched
        report.links.stubs_created += lr.stubs_created
        report.links.unparsed += lr.unparsed
        groups = merge_all(store)
        report.merged_groups += len(groups)
        report.retired += sum(len(g.member_ids) - 1 for g in groups)
    report.full_records = store.count(RecordFilter(kinds=frozenset({Kind.FULL})))
    report.stubs = store.count(RecordFilter(kinds=frozenset({Kind.CITATION_STUB})))
    return report
