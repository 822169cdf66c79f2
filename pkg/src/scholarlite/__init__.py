"""A desk-scale academic search engine with size and coverage estimators."""

from .model import CorpusStore, DocumentRecord, Kind, Language
from .query import SearchEngine, parse_query

__all__ = ["CorpusStore", "DocumentRecord", "Kind", "Language", "SearchEngine", "parse_query"]
__version__ = "0.1.0"
