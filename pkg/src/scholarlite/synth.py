"""Synthetic corpora with known ground truth, and a selective reference database.

A generated corpus is a set of source snapshots (publisher sites, whitelisted
repositories, university and social hosts) plus the truth tables that
ingestion, merging and the estimators are expected to reproduce.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import random
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path

from .ingestion import RawDocument, SourceSnapshot, StructuredText, TextBlock, write_snapshot
from .model import CorpusStore, DocType, FileKind, Language, SourceType

# Default language mix: document counts per language from a large
# keyword-free survey of an academic search engine ("unknown" = other).
_SURVEY_LANGUAGE_COUNTS = {
    "en": 90_932_140,
    "zh_hans": 61_545_203,
    "ja": 6_327_073,
    "de": 4_326_244,
    "es": 4_144_354,
    "fr": 3_657_705,
    "pt": 2_403_898,
    "ko": 2_131_744,
    "it": 999_134,
    "pl": 766_266,
    "nl": 475_703,
    "tr": 472_830,
    "unknown": 4_534_156,
}
_SURVEY_TOTAL = sum(_SURVEY_LANGUAGE_COUNTS.values())
DEFAULT_LANGUAGE_SHARES = {k: v / _SURVEY_TOTAL for k, v in _SURVEY_LANGUAGE_COUNTS.items()}

DEFAULT_TYPE_SHARES = {
    "article": 0.60,
    "book_chapter": 0.07,
    "thesis": 0.06,
    "conference": 0.08,
    "report": 0.05,
    "patent": 0.03,
    "other": 0.03,
    "unknown": 0.08,
}

CATEGORY_TREE = {
    "Engineering & Computer Science": ["Databases & Information Systems", "Artificial Intelligence", "Computer Networks"],
    "Social Sciences": ["Library & Information Science", "Education", "Sociology"],
    "Life Sciences & Earth Sciences": ["Ecology", "Genetics & Genomics"],
    "Health & Medical Sciences": ["Nursing", "Oncology"],
    "Humanities, Literature & Arts": ["History", "Philosophy"],
}


class ConfigError(ValueError):
    pass


@dataclass
class CorpusConfig:
    seed: int = 42
    n_documents: int = 1000
    year_range: tuple[int, int] = (2000, 2016)
    language_shares: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_LANGUAGE_SHARES))
    type_shares: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TYPE_SHARES))
    duplicate_rate: float = 0.1
    stub_reference_rate: float = 0.2
    citation_exponent: float = 2.2
    churn_rate: float = 0.0
    missing_year_rate: float = 0.0
    n_journals: int | None = None
    snapshot_date: date = date(2017, 3, 1)

    def validate(self) -> None:
        if self.n_documents < 0:
            raise ConfigError("n_documents must be >= 0")
        lo, hi = self.year_range
        if lo > hi or lo < 1500:
            raise ConfigError(f"bad year_range {self.year_range}")
        for name in ("duplicate_rate", "stub_reference_rate", "churn_rate", "missing_year_rate"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.stub_reference_rate >= 1:
            raise ConfigError("stub_reference_rate must be < 1")
        if self.citation_exponent <= 1:
            raise ConfigError("citation_exponent must be > 1")
        for name, shares, enum_ in (("language_shares", self.language_shares, Language),
                                    ("type_shares", self.type_shares, DocType)):
            for k, v in shares.items():
                try:
                    enum_(k)
                except ValueError:
                    raise ConfigError(f"{name}: unknown key {k!r}") from None
                if not 0 <= v <= 1:
                    raise ConfigError(f"{name}: share for {k} outside [0, 1]")
            if abs(sum(shares.values()) - 1) > 1e-9:
                raise ConfigError(f"{name} sum to {sum(shares.values())!r}, not 1")

    @classmethod
    def from_text(cls, text: str) -> "CorpusConfig":
        """Parse ``key = value`` lines; shares are ``lang:fraction,...``."""
        cfg = cls()
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            try:
                if key in ("seed", "n_documents", "n_journals"):
                    setattr(cfg, key, int(value))
                elif key in ("duplicate_rate", "stub_reference_rate", "citation_exponent", "churn_rate", "missing_year_rate"):
                    setattr(cfg, key, float(value))
                elif key == "year_range":
                    lo, hi = value.replace("..", ",").split(",")
                    cfg.year_range = (int(lo), int(hi))
                elif key in ("language_shares", "type_shares"):
                    shares = {}
                    for part in value.split(","):
                        k, v = part.split(":")
                        shares[k.strip()] = float(v)
                    setattr(cfg, key, shares)
                elif key == "snapshot_date":
                    cfg.snapshot_date = date.fromisoformat(value)
                else:
                    raise ConfigError(f"line {n}: unknown key {key!r}")
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"line {n}: bad value for {key}: {exc}") from None
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "CorpusConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


@dataclass
class GroundTruth:
    true_size: int = 0
    per_year: dict[str, int] = field(default_factory=dict)
    per_language: dict[str, int] = field(default_factory=dict)
    per_type: dict[str, int] = field(default_factory=dict)
    per_primary_tld: dict[str, int] = field(default_factory=dict)
    true_citation_graph: dict[str, list[str]] = field(default_factory=dict)
    version_groups: list[list[str]] = field(default_factory=list)
    titles: dict[str, str] = field(default_factory=dict)
    external_targets: int = 0
    journal_categories: dict[str, list[list[str]]] = field(default_factory=dict)
    tlds: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=1, sort_keys=True, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        return cls(**json.loads(text))

    def citation_counts(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.true_citation_graph.items()}


# -- vocabulary -------------------------------------------------------------

_ONSETS = ["b", "c", "d", "f", "g", "h", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "cl", "dr", "st", "tr", "gr"]
_VOWELS = ["a", "e", "i", "o", "u", "ai", "ou", "ea"]
_CODAS = ["", "n", "r", "s", "l", "m", "x", "nd", "rt"]


def _word(rng: random.Random, syllables: int) -> str:
    return "".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) + rng.choice(_CODAS) for _ in range(syllables))


def _distinct_words(rng: random.Random, n: int, syllables: tuple[int, int]) -> list[str]:
    seen: set[str] = set()
    out: list[str] = []
    while len(out) < n:
        w = _word(rng, rng.randint(*syllables))
        if w not in seen:
            seen.add(w)
            out.append(w)
    return out


def _categorical(rng: random.Random, shares: dict[str, float]) -> str:
    keys = sorted(shares)
    x = rng.random() * sum(shares.values())
    acc = 0.0
    for k in keys:
        acc += shares[k]
        if x < acc:
            return k
    return next(k for k in reversed(keys) if shares[k] > 0)


def _power_law_sampler(rng: random.Random, exponent: float, cmax: int):
    """Sampler for P(c) proportional to (c + 1) ** -exponent on 0..cmax."""
    weights = [(c + 1) ** -exponent for c in range(cmax + 1)]
    cdf = []
    acc = 0.0
    for w in weights:
        acc += w
        cdf.append(acc)
    total = cdf[-1]
    return lambda: bisect.bisect_left(cdf, rng.random() * total)


@dataclass
class _Domain:
    name: str
    kind: SourceType
    whitelisted: bool


@dataclass
class _Work:
    key: str
    title: str
    authors: list[tuple[str, str]]
    year: int | None
    language: str
    doc_type: str
    source: str | None
    abstract: str
    hosts: list[str]
    references: list[str] = field(default_factory=list)
    churned: bool = False
    online_offset: int | None = None


_GEO_TLDS = {
    "en": ["com", "org", "edu", "uk", "au"],
    "zh_hans": ["cn"],
    "zh_hant": ["tw"],
    "ja": ["jp"],
    "de": ["de"],
    "es": ["es", "mx"],
    "fr": ["fr"],
    "pt": ["br", "pt"],
    "ko": ["kr"],
    "it": ["it"],
    "pl": ["pl"],
    "nl": ["nl"],
    "tr": ["tr"],
    "unknown": ["info", "net"],
}


def _make_domains(rng: random.Random, languages: list[str]) -> tuple[dict[str, list[_Domain]], list[_Domain], list[_Domain]]:
    """Publisher/university hosts per language, shared repositories, social hosts."""
    per_lang: dict[str, list[_Domain]] = {}
    for lang in languages:
        hosts = []
        for i, tld in enumerate(_GEO_TLDS.get(lang, ["net"])):
            hosts.append(_Domain(f"press{i}-{lang.replace('_', '')}.{tld}", SourceType.PUBLISHER, False))
            uni_tld = "edu" if tld == "com" else tld
            hosts.append(_Domain(f"univ{i}-{lang.replace('_', '')}.{uni_tld}", SourceType.UNIVERSITY, False))
        per_lang[lang] = hosts
    repos = [_Domain("eprints.repo.org", SourceType.REPOSITORY, True), _Domain("archive.repo.de", SourceType.REPOSITORY, True)]
    social = [_Domain("papers.social.net", SourceType.SOCIAL, False)]
    return per_lang, repos, social


def _initials(rng: random.Random) -> str:
    return "".join(rng.choice("ABCDEFGHJKLMNPRSTW") for _ in range(rng.choice((1, 1, 2))))


def _ref_string(surname: str, initials: str, year: int | None, title: str, source: str | None) -> str:
    inits = " ".join(f"{c}." for c in initials)
    ystr = f" ({year})." if year is not None else "."
    tail = f" {source}." if source else ""
    return f"{surname}, {inits}{ystr} {title}.{tail}"


def generate_corpus(config: CorpusConfig) -> tuple[list[SourceSnapshot], GroundTruth]:
    """Snapshots plus ground truth; identical config gives identical output."""
    config.validate()
    rng = random.Random(config.seed)
    n = config.n_documents
    lo, hi = config.year_range
    n_churn = round(n * config.churn_rate)
    total_works = n + n_churn

    vocab = _distinct_words(rng, max(400, min(6000, total_works * 2)), (1, 3))
    surnames = [w.capitalize() for w in _distinct_words(rng, max(40, total_works // 4), (2, 3))]
    ext_vocab = [w + "q" for w in _distinct_words(rng, 600, (2, 3))]

    languages = sorted(k for k, v in config.language_shares.items() if v > 0)
    per_lang_hosts, repos, social = _make_domains(rng, languages)

    # journals: at least one per language, more for the big ones
    n_journals = config.n_journals or max(len(languages), n // 800)
    journals: dict[str, list[str]] = {lang: [] for lang in languages}
    categories: dict[str, list[list[str]]] = {}
    cat_paths = [[c, s] for c, subs in sorted(CATEGORY_TREE.items()) for s in subs]
    for j in range(n_journals):
        lang = languages[j] if j < len(languages) else _categorical(rng, {k: config.language_shares[k] for k in languages})
        name = f"Journal of {' '.join(w.capitalize() for w in rng.sample(vocab, 2))} {j}"
        journals[lang].append(name)
        if lang == "en":
            picks = rng.sample(cat_paths, 2 if rng.random() < 0.3 else 1)
            categories[name] = sorted(picks)
    conferences = [f"Proceedings of the {rng.choice(vocab).capitalize()} Conference" for _ in range(5)]
    books = [f"Handbook of {rng.choice(vocab).capitalize()}" for _ in range(5)]

    year_weights = {y: 1.06 ** (y - lo) for y in range(lo, hi + 1)}
    used_titles: set[str] = set()

    def title() -> str:
        while True:
            t = " ".join(rng.sample(vocab, rng.randint(6, 9)))
            if t not in used_titles:
                used_titles.add(t)
                return t.capitalize()

    n_dup = round(n * config.duplicate_rate)
    dup_idx = set(rng.sample(range(n), n_dup)) if n_dup else set()
    n_noyear = round(n * config.missing_year_rate)
    noyear_idx = set(rng.sample(sorted(set(range(n)) - dup_idx), min(n_noyear, n - n_dup))) if n_noyear else set()

    works: list[_Work] = []
    for i in range(total_works):
        churned = i >= n
        lang = _categorical(rng, config.language_shares)
        dtype = _categorical(rng, config.type_shares)
        year = None if i in noyear_idx else int(_categorical(rng, {str(y): w for y, w in year_weights.items()}))
        authors = [(rng.choice(surnames), _initials(rng)) for _ in range(rng.randint(1, 4))]
        if dtype == "article":
            source = rng.choice(journals.get(lang) or journals[languages[0]])
        elif dtype == "conference":
            source = rng.choice(conferences)
        elif dtype == "book_chapter":
            source = rng.choice(books)
        else:
            source = None
        home = per_lang_hosts[lang]
        primary = rng.choice(home)
        hosts = [primary.name]
        if i in dup_idx:
            extra = [d for d in (*repos, *social) if d.name != primary.name]
            hosts += [d.name for d in rng.sample(extra, rng.randint(1, 2))]
        elif not churned and rng.random() < 0.15:
            # single copy hosted only in a repository
            hosts = [rng.choice(repos).name]
        abstract = " ".join(rng.choice(vocab) for _ in range(rng.randint(20, 40))).capitalize() + "."
        online = rng.randint(1, 6) if year == hi else None
        works.append(_Work(f"w{i:06d}", title(), authors, year, lang, dtype, source, abstract, hosts,
                           churned=churned, online_offset=online))

    # citation graph: in-degree from a discrete power law; citers are
    # same-year-or-later works, never churned-away targets
    by_year = sorted((w for w in works if w.year is not None), key=lambda w: (w.year, w.key))
    years_sorted = [w.year for w in by_year]
    sample_count = _power_law_sampler(rng, config.citation_exponent, max(1, min(total_works - 1, 2000)))
    position = {w.key: i for i, w in enumerate(by_year)}
    n_dated = len(by_year)
    citers_of: dict[str, list[str]] = {}
    for w in works:
        if w.churned or w.year is None:
            continue
        start = bisect.bisect_left(years_sorted, w.year)
        c = min(sample_count(), n_dated - start - 1)
        if c <= 0:
            citers_of[w.key] = []
            continue
        # c+1 draws, then drop the work itself: a uniform c-subset of the others
        picks = rng.sample(range(start, n_dated), min(c + 1, n_dated - start))
        chosen = [by_year[p] for p in picks if p != position[w.key]][:c]
        citers_of[w.key] = sorted(e.key for e in chosen)
    index = {w.key: w for w in works}
    for cited_key, citers in citers_of.items():
        cited = index[cited_key]
        sn, ini = cited.authors[0]
        ref = _ref_string(sn, ini, cited.year, cited.title, cited.source)
        for ck in citers:
            index[ck].references.append(ref)

    # external references: stub fodder
    n_ext = max(1, total_works // 3)
    ext_works = []
    for k in range(n_ext):
        t = " ".join(rng.sample(ext_vocab, rng.randint(5, 8))).capitalize()
        ext_works.append((rng.choice(surnames), _initials(rng), rng.randint(lo - 30, hi), t))
    ext_pick = _power_law_sampler(rng, 1.5, n_ext - 1)
    rate = config.stub_reference_rate
    ext_used: set[int] = set()
    for w in works:
        n_in = len(w.references)
        n_out = sum(1 for _ in range(n_in) if rng.random() < rate / (1 - rate)) if rate > 0 else 0
        if n_in + n_out == 0:
            n_out = 1
        for _ in range(n_out):
            e = ext_pick()
            sn, ini, y, t = ext_works[e]
            w.references.append(_ref_string(sn, ini, y, t, None))
            if not w.churned:
                ext_used.add(e)
        rng.shuffle(w.references)

    # snapshots
    all_domains = {d.name: d for hosts in per_lang_hosts.values() for d in hosts}
    all_domains.update({d.name: d for d in (*repos, *social)})
    gen0: dict[str, list[RawDocument]] = {name: [] for name in all_domains}
    gen1: dict[str, list[RawDocument]] = {name: [] for name in all_domains}
    for w in works:
        for copy, host in enumerate(w.hosts):
            doc = _render(w, host, copy, config.snapshot_date, rng)
            gen0[host].append(doc)
            if not w.churned:
                gen1[host].append(doc)

    snapshots = []
    for name in sorted(all_domains):
        d = all_domains[name]
        if gen0[name]:
            snapshots.append(SourceSnapshot(name, config.snapshot_date, gen0[name], d.whitelisted, d.kind))
    if n_churn:
        later = config.snapshot_date + timedelta(days=30)
        for name in sorted(all_domains):
            d = all_domains[name]
            if gen0[name]:
                snapshots.append(SourceSnapshot(name, later, gen1[name], d.whitelisted, d.kind))

    truth = GroundTruth()
    live = [w for w in works if not w.churned]
    truth.true_size = len(live)
    for w in live:
        yk = str(w.year) if w.year is not None else "unknown"
        truth.per_year[yk] = truth.per_year.get(yk, 0) + 1
        truth.per_language[w.language] = truth.per_language.get(w.language, 0) + 1
        truth.per_type[w.doc_type] = truth.per_type.get(w.doc_type, 0) + 1
        tld = _primary_host(w, all_domains).rsplit(".", 1)[-1]
        truth.per_primary_tld[tld] = truth.per_primary_tld.get(tld, 0) + 1
        truth.titles[w.key] = w.title
        truth.true_citation_graph[w.key] = [c for c in citers_of.get(w.key, []) if not index[c].churned]
        if len(w.hosts) > 1:
            truth.version_groups.append([_url(w, h, i) for i, h in enumerate(w.hosts)])
    truth.per_year = dict(sorted(truth.per_year.items()))
    truth.per_language = dict(sorted(truth.per_language.items()))
    truth.per_type = dict(sorted(truth.per_type.items()))
    truth.per_primary_tld = dict(sorted(truth.per_primary_tld.items()))
    truth.external_targets = len(ext_used)
    truth.journal_categories = categories
    truth.tlds = sorted({name.rsplit(".", 1)[-1] for name in all_domains})
    return snapshots, truth


_PRIORITY = {SourceType.PUBLISHER: 0, SourceType.DATABASE: 1, SourceType.REPOSITORY: 2,
             SourceType.UNIVERSITY: 3, SourceType.OTHER: 3, SourceType.SOCIAL: 4}


def _primary_host(w: _Work, domains: dict[str, _Domain]) -> str:
    best = min(range(len(w.hosts)), key=lambda i: (_PRIORITY[domains[w.hosts[i]].kind], _url(w, w.hosts[i], i)))
    return w.hosts[best]


def _url(w: _Work, host: str, copy: int) -> str:
    return f"https://{host}/files/{w.key}-{copy}.pdf"


def _render(w: _Work, host: str, copy: int, snap: date, rng: random.Random) -> RawDocument:
    author_line = ", ".join(f"{' '.join(c + '.' for c in ini)} {sn}" for sn, ini in w.authors)
    blocks = [
        TextBlock(w.title, 18, 1),
        TextBlock(author_line, 12, 1),
        TextBlock(w.abstract, 10, 1),
        TextBlock("Introduction and results are discussed in the body of the paper.", 10, 2),
        TextBlock("References", 12, 3),
    ]
    blocks += [TextBlock(f"[{k}] {ref}", 9, 3) for k, ref in enumerate(w.references, 1)]
    tags = _meta_tags(w, snap)
    return RawDocument(
        url=_url(w, host, copy),
        meta_tags=tags,
        body=StructuredText(blocks),
        byte_size=200_000 + 1000 * len(w.references),
        file_kind=FileKind.PDF,
        abstract_visible=True,
    )


_HIGHWIRE_SOURCE = {
    "article": "citation_journal_title",
    "conference": "citation_conference_title",
    "book_chapter": "citation_inbook_title",
}
_HIGHWIRE_MARKER = {
    "thesis": ("citation_dissertation_institution", "Synthetic University"),
    "report": ("citation_technical_report_institution", "Synthetic Institute"),
    "patent": ("citation_patent_number", "US0000000"),
}


def _meta_tags(w: _Work, snap: date) -> list[tuple[str, str, str]]:
    authors = [f"{sn}, {' '.join(c + '.' for c in ini)}" for sn, ini in w.authors]
    if w.doc_type == "unknown":
        tags = [("dublin_core", "DC.title", w.title)]
        tags += [("dublin_core", "DC.creator", a) for a in authors]
        if w.year is not None:
            tags.append(("dublin_core", "DC.date", str(w.year)))
        tags.append(("dublin_core", "DC.language", w.language))
        return tags
    if w.doc_type == "other":
        tags = [("eprints", "eprints.title", w.title)]
        tags += [("eprints", "eprints.creators_name", a) for a in authors]
        if w.year is not None:
            tags.append(("eprints", "eprints.date", str(w.year)))
        tags += [("eprints", "eprints.type", "other"), ("eprints", "eprints.language", w.language)]
        return tags
    tags = [("highwire", "citation_title", w.title)]
    tags += [("highwire", "citation_author", a) for a in authors]
    if w.year is not None:
        tags.append(("highwire", "citation_publication_date", f"{w.year}/01/01"))
    if w.online_offset is not None:
        tags.append(("highwire", "citation_online_date", (snap - timedelta(days=w.online_offset)).strftime("%Y/%m/%d")))
    if w.doc_type in _HIGHWIRE_SOURCE and w.source:
        tags.append(("highwire", _HIGHWIRE_SOURCE[w.doc_type], w.source))
    if w.doc_type in _HIGHWIRE_MARKER:
        tags.append(("highwire", *_HIGHWIRE_MARKER[w.doc_type]))
    tags.append(("highwire", "citation_language", w.language))
    return tags


# -- writing and reports ------------------------------------------------------

def write_corpus(snapshots: list[SourceSnapshot], truth: GroundTruth, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    snap_root = out / "snapshots"
    for s in snapshots:
        write_snapshot(s, snap_root / s.snapshot_date.isoformat() / s.domain)
    truth_dir = out / "truth"
    truth_dir.mkdir(parents=True, exist_ok=True)
    (truth_dir / "truth.json").write_text(truth.to_json(), encoding="utf-8")
    for name, text in ground_truth_report(truth).items():
        (truth_dir / name).write_text(text, encoding="utf-8")
    return out


def ground_truth_report(truth: GroundTruth) -> dict[str, str]:
    """CSV tables keyed by file name."""
    def table(header: str, rows: dict[str, int]) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([header, "count"])
        for k, v in rows.items():
            w.writerow([k, v])
        w.writerow(["TOTAL", sum(rows.values())])
        return buf.getvalue()

    return {
        "per_year.csv": table("year", truth.per_year),
        "per_language.csv": table("language", truth.per_language),
        "per_type.csv": table("doc_type", truth.per_type),
        "per_primary_tld.csv": table("tld", truth.per_primary_tld),
    }


# -- reference database ---------------------------------------------------

@dataclass
class Selectivity:
    journal_only: bool = False
    english_bias: float = 0.0
    coverage: float = 1.0

    def __post_init__(self):
        for name in ("english_bias", "coverage"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass
class ReferenceDB:
    selected: frozenset[str]
    citations: dict[str, int]

    def comparison_rows(self, store: CorpusStore):
        from .estimation import ComparisonRow

        rows = []
        for rid in sorted(self.selected):
            r = store.get(rid)
            if r is not None:
                rows.append(ComparisonRow(rid, len(r.cited_by), self.citations[rid]))
        return rows


def generate_reference_db(store: CorpusStore, selectivity: Selectivity, seed: int = 0) -> ReferenceDB:
    """A selective database over the same corpus.

    Coverage decides which full records it holds (English records get the
    ``english_bias`` boost; ``journal_only`` keeps articles alone).  Its
    citation counts only see citing records it also holds.
    """
    rng = random.Random(seed)
    selected = set()
    for rid in store.ids():
        r = store.get(rid)
        if r.is_stub:
            continue
        if selectivity.journal_only and r.doc_type is not DocType.ARTICLE:
            continue
        p = selectivity.coverage
        if r.language is Language.EN:
            p = p + selectivity.english_bias * (1 - p)
        if rng.random() < p:
            selected.add(rid)
    counts = {}
    for rid in sorted(selected):
        counts[rid] = len(store.get(rid).cited_by & selected)
    return ReferenceDB(frozenset(selected), counts)
