"""Command-line entry point: ``scholarlite <command> ...``.

Machine-readable output (JSON lines, CSV) goes to stdout or to files in the
output directory; progress and errors go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bibliometrics, estimation
from .ingestion import find_snapshots, tld_of
from .model import CorpusStore, InvariantViolation, Kind, Language, RecordFilter, parse_language
from .pipeline import ingest_all
from .query import NoiseModel, QueryParseError, SearchEngine, parse_query
from .synth import ConfigError, CorpusConfig, GroundTruth, Selectivity, generate_corpus, generate_reference_db, write_corpus

log = logging.getLogger("scholarlite")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_UNDEFINED = 3

CONFIG_ENV = "SCHOLARLITE_CONFIG"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    corpus_path: Path = Path("corpus.jsonl")
    current_year: int = 2017
    relevance_weights: tuple[float, float] = (1.0, 0.5)
    noise_model: str = "exact"
    output_dir: Path = Path("reports")

    def validate(self) -> None:
        if min(self.relevance_weights) < 0:
            raise UsageError("relevance weights must be >= 0")
        NoiseModel.parse(self.noise_model)

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        cfg = cls()
        for n, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = (s.strip() for s in line.partition("="))
            if not sep:
                raise UsageError(f"{path}:{n}: expected key=value")
            if key == "corpus_path":
                cfg.corpus_path = Path(value)
            elif key == "current_year":
                cfg.current_year = int(value)
            elif key == "relevance_weights":
                a, b = value.split(",")
                cfg.relevance_weights = (float(a), float(b))
            elif key == "noise_model":
                cfg.noise_model = value
            elif key == "output_dir":
                cfg.output_dir = Path(value)
            else:
                raise UsageError(f"{path}:{n}: unknown key {key!r}")
        return cfg


def _run_config(args: argparse.Namespace) -> RunConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    cfg = RunConfig.from_file(path) if path else RunConfig()
    if args.corpus:
        cfg.corpus_path = Path(args.corpus)
    if args.current_year is not None:
        cfg.current_year = args.current_year
    if args.noise:
        cfg.noise_model = args.noise
    if args.alpha is not None or args.beta is not None:
        a, b = cfg.relevance_weights
        cfg.relevance_weights = (args.alpha if args.alpha is not None else a, args.beta if args.beta is not None else b)
    if args.output_dir:
        cfg.output_dir = Path(args.output_dir)
    try:
        cfg.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def _engine(cfg: RunConfig, store: CorpusStore) -> SearchEngine:
    a, b = cfg.relevance_weights
    return SearchEngine(store, current_year=cfg.current_year, alpha=a, beta=b, noise=NoiseModel.parse(cfg.noise_model))


def _write(cfg: RunConfig, name: str, text: str) -> Path:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.output_dir / name
    path.write_text(text, encoding="utf-8")
    log.info("wrote %s", path)
    return path


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")


# -- commands ---------------------------------------------------------------

def cmd_generate(args, cfg: RunConfig) -> int:
    try:
        corpus_cfg = CorpusConfig.from_file(args.config_file)
    except (ConfigError, OSError) as exc:
        log.error("config error: %s", exc)
        return EXIT_DATA
    if args.seed is not None:
        corpus_cfg.seed = args.seed
    snapshots, truth = generate_corpus(corpus_cfg)
    out = write_corpus(snapshots, truth, args.out)
    _emit({"snapshots": len(snapshots), "true_size": truth.true_size, "out": str(out)})
    return EXIT_OK


def cmd_ingest(args, cfg: RunConfig) -> int:
    try:
        snapshots = find_snapshots(args.snapshot_dir)
    except (OSError, ValueError, KeyError) as exc:
        log.error("cannot read snapshots: %s", exc)
        return EXIT_DATA
    store = CorpusStore.load(cfg.corpus_path)
    try:
        report = ingest_all(snapshots, store, workers=args.workers)
    except (ValueError, InvariantViolation) as exc:
        log.error("ingest failed: %s", exc)
        return EXIT_DATA
    store.save(cfg.corpus_path)
    _emit(report.as_dict())
    return EXIT_OK


def cmd_query(args, cfg: RunConfig) -> int:
    try:
        q = parse_query(args.query)
    except QueryParseError as exc:
        log.error("query error: %s", exc)
        return EXIT_USAGE
    q.sort = args.sort
    q.include_citations = not args.no_citations
    q.include_patents = not args.no_patents
    engine = _engine(cfg, CorpusStore.load(cfg.corpus_path))
    page = engine.execute(q, args.page, args.pagesize)
    log.info("about %d results", page.hit_count_estimate)
    for line in engine.result_lines(page):
        sys.stdout.write(line + "\n")
    return EXIT_OK


def cmd_profile(args, cfg: RunConfig) -> int:
    store = CorpusStore.load(cfg.corpus_path)
    profile = bibliometrics.build_author_profile((args.surname, args.initials), store, cfg.current_year)
    _emit(profile.as_dict())
    return EXIT_OK


def _load_categories(path: str | None) -> dict[str, list[tuple[str, ...]]]:
    if not path:
        return {}
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    cats = data.get("journal_categories", data)
    return {name: [tuple(p) for p in paths] for name, paths in cats.items()}


def cmd_gsm(args, cfg: RunConfig) -> int:
    store = CorpusStore.load(cfg.corpus_path)
    rankings = bibliometrics.gsm_rankings(store, args.edition_year, _load_categories(args.categories))
    text = rankings.to_csv()
    _write(cfg, f"gsm_{args.edition_year}.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def _read_sample(path: str) -> set[str]:
    return {line.strip() for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()}


def cmd_estimate(args, cfg: RunConfig) -> int:
    store = CorpusStore.load(cfg.corpus_path)
    engine = _engine(cfg, store)
    years = tuple(args.years) if args.years else None
    m = args.method
    if m in ("absurd", "absurd_query"):
        est = estimation.estimate_absurd(engine, years, not args.no_citations, not args.no_patents)
    elif m in ("year", "year_query"):
        est = estimation.estimate_year_query(engine, years, not args.no_citations, not args.no_patents)
    elif m == "domain_sum":
        tlds = args.tlds.split(",") if args.tlds else sorted({
            tld_of(r.primary.source_domain) for r in store if r.primary is not None
        })
        if not tlds:
            raise UsageError("empty corpus and no --tlds given")
        est = estimation.estimate_domain_sum(engine, tlds)
    elif m == "capture_recapture":
        if args.sample_a and args.sample_b:
            a, b = _read_sample(args.sample_a), _read_sample(args.sample_b)
        else:
            pop = store.ids() if not args.no_citations else [
                r.record_id for r in store if r.kind is Kind.FULL]
            rng = random.Random(args.seed)
            a = estimation.draw_sample(pop, args.sample_size, rng)
            b = estimation.draw_sample(pop, args.sample_size, rng)
        est = estimation.estimate_capture_recapture(a, b, chapman=args.chapman)
    elif m == "language_proportion":
        est = estimation.estimate_language_proportion(engine, parse_language(args.language), args.share)
    elif m == "components":
        parts = {}
        for item in args.component or []:
            k, _, v = item.partition("=")
            parts[k] = int(v.replace(",", "").replace("_", ""))
        est = estimation.combine_components(parts, args.printed_total)
        sys.stderr.write(estimation.size_report(est))
    elif m == "language_distribution":
        rows = estimation.language_distribution(engine, years)
        text = estimation.table_csv(rows, ["language", "documents", "percent"])
        _write(cfg, "language_distribution.csv", text)
        sys.stdout.write(text)
        return EXIT_OK
    elif m == "doc_types":
        counts = estimation.doc_type_distribution(r for r in store if r.kind is Kind.FULL)
        text = estimation.table_csv(counts.items(), ["doc_type", "documents"])
        _write(cfg, "doc_types.csv", text)
        sys.stdout.write(text)
        return EXIT_OK
    elif m == "correlation":
        exact = SearchEngine(store, current_year=cfg.current_year)
        rounded = SearchEngine(store, current_year=cfg.current_year, noise=NoiseModel(3))
        series = [
            estimation.estimate_absurd(exact, years, False, False),
            estimation.estimate_year_query(exact, years, True, True),
            estimation.estimate_absurd(rounded, years, False, False),
            estimation.estimate_absurd(rounded, years, True, True),
        ]
        labels = ["absurd_pure_exact", "year_full_exact", "absurd_pure_rounded3", "absurd_full_rounded3"]
        matrix = estimation.method_correlation(series)
        rows = [[labels[i], *("" if v is None else f"{v:.3f}" for v in row)] for i, row in enumerate(matrix)]
        text = estimation.table_csv(rows, ["query", *labels])
        _write(cfg, "correlation.csv", text)
        sys.stdout.write(text)
        return EXIT_OK
    elif m == "indexing_speed":
        speeds = estimation.record_indexing_speeds(store)
        text = estimation.table_csv(speeds, ["record_id", "index_speed_days"])
        _write(cfg, "indexing_speed.csv", text)
        sys.stdout.write(text)
        return EXIT_OK
    else:
        raise UsageError(f"unknown method {m!r}")
    _write(cfg, f"estimate_{est.method}.json", est.to_json() + "\n")
    if est.per_bucket is not None:
        _write(cfg, f"estimate_{est.method}.csv", est.to_csv())
    sys.stdout.write(est.to_json() + "\n")
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig) -> int:
    store = CorpusStore.load(cfg.corpus_path)
    sel = Selectivity(journal_only=args.journal_only, english_bias=args.english_bias, coverage=args.coverage)
    refdb = generate_reference_db(store, sel, seed=args.seed)
    rows = refdb.comparison_rows(store)
    text = estimation.table_csv(((r.record_id, r.citations_a, r.citations_b) for r in rows),
                                ["record_id", "citations_corpus", "citations_reference"])
    _write(cfg, "comparison.csv", text)
    summary = {"documents": len(rows)}
    try:
        summary["ratio"] = estimation.citation_ratio(rows)
    except ZeroDivisionError:
        summary["ratio"] = None
    summary["spearman"] = estimation.spearman(rows) if len(rows) >= 2 else None
    _write(cfg, "comparison_summary.json", json.dumps(summary, sort_keys=True) + "\n")
    _emit(summary)
    return EXIT_OK


def cmd_report(args, cfg: RunConfig) -> int:
    """Ground-truth tables next to what the store holds."""
    truth = GroundTruth.from_json((Path(args.truth_dir) / "truth.json").read_text(encoding="utf-8"))
    store = CorpusStore.load(cfg.corpus_path)
    full = [r for r in store if r.kind is Kind.FULL]
    observed = {
        "year": {}, "language": {}, "doc_type": {},
    }
    for r in full:
        for key, val in (("year", str(r.pub_year) if r.pub_year else "unknown"),
                         ("language", r.language.value), ("doc_type", r.doc_type.value)):
            observed[key][val] = observed[key].get(val, 0) + 1
    rows = [("total", "all", truth.true_size, len(full))]
    for key, table in (("year", truth.per_year), ("language", truth.per_language), ("doc_type", truth.per_type)):
        for k in sorted(set(table) | set(observed[key])):
            rows.append((key, k, table.get(k, 0), observed[key].get(k, 0)))
    text = estimation.table_csv(rows, ["table", "bucket", "truth", "observed"])
    _write(cfg, "truth_vs_observed.csv", text)
    sys.stdout.write(text)
    return EXIT_OK


def _setup_logging(verbose: bool) -> None:
    # bound to the current stderr on every call so repeated in-process runs behave
    for h in list(log.handlers):
        log.removeHandler(h)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
    log.propagate = False


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scholarlite", description="Desk-scale academic search engine and estimation lab.")
    p.add_argument("--config", help=f"run config file (key=value); default from ${CONFIG_ENV}")
    p.add_argument("--corpus", help="corpus file (line-delimited JSON records)")
    p.add_argument("--current-year", type=int)
    p.add_argument("--noise", help="exact | rounded(k)")
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--output-dir")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic corpus and its ground truth")
    g.add_argument("config_file")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", default="synthetic")
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("ingest", help="ingest a snapshot directory into the corpus")
    i.add_argument("snapshot_dir")
    i.add_argument("--workers", type=int, default=1)
    i.set_defaults(func=cmd_ingest)

    q = sub.add_parser("query", help="run a search")
    q.add_argument("query")
    q.add_argument("--pagesize", type=int, choices=(10, 20), default=10)
    q.add_argument("--page", type=int, default=0)
    q.add_argument("--sort", choices=("relevance", "date"), default="relevance")
    q.add_argument("--no-citations", action="store_true")
    q.add_argument("--no-patents", action="store_true")
    q.set_defaults(func=cmd_query)

    pr = sub.add_parser("profile", help="author indicators")
    pr.add_argument("surname")
    pr.add_argument("initials", nargs="?", default="")
    pr.set_defaults(func=cmd_profile)

    gs = sub.add_parser("gsm", aliases=["rank"], help="journal rankings for an edition year")
    gs.add_argument("edition_year", type=int)
    gs.add_argument("--categories", help="JSON with journal -> category paths (truth.json works)")
    gs.set_defaults(func=cmd_gsm)

    e = sub.add_parser("estimate", help="run an estimator")
    e.add_argument("method", choices=[
        "absurd", "absurd_query", "year", "year_query", "domain_sum", "capture_recapture",
        "language_proportion", "language_distribution", "doc_types", "correlation", "components", "indexing_speed",
    ])
    e.add_argument("--years", type=int, nargs=2, metavar=("LO", "HI"))
    e.add_argument("--no-citations", action="store_true")
    e.add_argument("--no-patents", action="store_true")
    e.add_argument("--tlds")
    e.add_argument("--sample-a")
    e.add_argument("--sample-b")
    e.add_argument("--sample-size", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--chapman", action="store_true")
    e.add_argument("--language", default="en")
    e.add_argument("--share", type=float, default=1.0)
    e.add_argument("--component", action="append", metavar="NAME=COUNT")
    e.add_argument("--printed-total", type=lambda s: int(s.replace(",", "")))
    e.set_defaults(func=cmd_estimate)

    c = sub.add_parser("compare", help="compare with a selective reference database")
    c.add_argument("--coverage", type=float, default=0.5)
    c.add_argument("--english-bias", type=float, default=0.0)
    c.add_argument("--journal-only", action="store_true")
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_compare)

    r = sub.add_parser("report", help="ground truth against the ingested corpus")
    r.add_argument("truth_dir")
    r.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    _setup_logging(args.verbose)
    try:
        cfg = _run_config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except estimation.NoOverlap as exc:
        log.error("%s", exc)
        return EXIT_UNDEFINED
    except (ValueError, ZeroDivisionError) as exc:
        if "undefined" in str(exc):
            log.error("%s", exc)
            return EXIT_UNDEFINED
        log.error("%s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
