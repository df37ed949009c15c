"""
Exception hierarchy for the retrieval engine.

Data problems (bad input files, unknown ids) fail fast with a message that
names the offending record. Scoring signals (unsmoothable term, undefined
IDF, empty query, no relevant objects) are raised by the kernels and caught
by their callers, which skip and record the affected term or query.
"""

from __future__ import annotations

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class FusionRetrievalError(Exception):
    """Base class for every error raised by this package."""

    exit_status = EXIT_DATA


class ConfigError(FusionRetrievalError):
    """Raised when run parameters or command-line flags are invalid."""

    exit_status = EXIT_USAGE


class DataError(FusionRetrievalError):
    """Raised when an input file or record cannot be used."""


class MalformedRecordError(DataError):
    """Raised when a line of an input file does not parse."""

    def __init__(self, message: str, line_no: int, path: Optional[str] = None):
        self.line_no = line_no
        self.path = path
        where = f"{path}:{line_no}" if path else f"line {line_no}"
        super().__init__(f"{where}: {message}")


class EmptyCorpusError(DataError):
    """Raised when ingestion sees no documents at all."""

    def __init__(self) -> None:
        super().__init__("empty corpus")


class DuplicateDocumentError(DataError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"duplicate document id: {doc_id}")


class UnknownDocumentError(DataError):
    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"association references unknown document: {doc_id}")


class NegativeWeightError(DataError):
    def __init__(self, doc_id: str, object_id: str, weight: float):
        super().__init__(
            f"negative association weight {weight} on edge ({doc_id}, {object_id})"
        )


class UnknownObjectError(DataError):
    def __init__(self, object_id: str):
        self.object_id = object_id
        super().__init__(f"unknown object: {object_id}")


class EmptyObjectIndexError(DataError):
    """Raised when no object has a non-empty pseudo-document."""

    def __init__(self) -> None:
        super().__init__("no scorable objects: every object has an empty pseudo-document")


class DisjointQueriesError(DataError):
    def __init__(self) -> None:
        super().__init__("run and qrels share no query id")


class EmptyRunError(DataError):
    def __init__(self) -> None:
        super().__init__("no queries in run")


class IndexCacheError(DataError):
    """Raised when an object-index cache file is unreadable or stale."""


class UnsmoothableTermError(FusionRetrievalError):
    """The smoothed term probability is zero; the term must be skipped."""


class UndefinedIdfError(FusionRetrievalError):
    """The term occurs in no unit, so IDF is undefined; the term must be skipped."""


class EmptyQueryError(FusionRetrievalError):
    """The query has no terms after tokenization."""

    def __init__(self, query_id: Optional[str] = None):
        self.query_id = query_id
        super().__init__(f"empty query{f': {query_id}' if query_id else ''}")


class NoRelevantError(FusionRetrievalError):
    """The query has no relevant object, so the metric is undefined."""
