"""
Text Corpus
Ingests raw documents, normalizes text into terms, and keeps the
per-document frequencies and collection statistics every scorer reads.

Corpus file format: UTF-8, one record per line, ``doc_id<TAB>text``.
Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from utils.errors import DuplicateDocumentError, EmptyCorpusError, MalformedRecordError
from utils.text_files import iter_text_lines

logger = logging.getLogger(__name__)

# Runs of Unicode letters and digits; underscore is a separator.
_TERM_RE = re.compile(r"[^\W_]+")


def tokenize(text: str, stopwords: Optional[frozenset[str]] = None) -> list[str]:
    """Lowercase and split on every non-alphanumeric character.

    No stemming. Stopwords are removed only when a list is supplied.
    Order and multiplicity of the input are preserved.
    """
    terms = _TERM_RE.findall(text.lower())
    if stopwords:
        terms = [t for t in terms if t not in stopwords]
    return terms


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a stopword list (one or more words per line, ``#`` comments)."""
    words: set[str] = set()
    for line in iter_text_lines(path):
        if line.startswith("#"):
            continue
        words.update(tokenize(line))
    logger.info(f"Loaded {len(words)} stopwords from {path}")
    return frozenset(words)


@dataclass(frozen=True)
class Document:
    id: str
    freqs: Mapping[str, int]
    length: int


@dataclass(frozen=True)
class CollectionStats:
    total_tokens: int
    collection_freq: Mapping[str, int]
    doc_freq: Mapping[str, int]
    num_docs: int
    avg_doc_length: float

    @classmethod
    def from_documents(cls, docs: Iterable[Document]) -> "CollectionStats":
        total = 0
        num_docs = 0
        cf: Counter[str] = Counter()
        df: Counter[str] = Counter()
        for doc in docs:
            num_docs += 1
            total += doc.length
            for term, count in doc.freqs.items():
                cf[term] += count
                df[term] += 1
        return cls(
            total_tokens=total,
            collection_freq=dict(cf),
            doc_freq=dict(df),
            num_docs=num_docs,
            avg_doc_length=total / num_docs if num_docs else 0.0,
        )


@dataclass(frozen=True)
class DocumentIndex:
    """Immutable document store with postings and collection statistics."""

    docs: Mapping[str, Document]
    stats: CollectionStats
    postings: Mapping[str, tuple[str, ...]] = field(repr=False)

    def get(self, doc_id: str) -> Optional[Document]:
        return self.docs.get(doc_id)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self.docs

    def __len__(self) -> int:
        return len(self.docs)

    def candidates(self, terms: Iterable[str]) -> list[str]:
        """Ids of documents containing at least one of `terms`, ascending."""
        hits: set[str] = set()
        for term in terms:
            hits.update(self.postings.get(term, ()))
        return sorted(hits)


def background_prob(stats: CollectionStats, term: str) -> float:
    """Maximum-likelihood background probability P(t); 0 for unseen terms."""
    cf = stats.collection_freq.get(term, 0)
    if cf == 0:
        return 0.0
    return cf / stats.total_tokens


def iter_corpus_records(
    lines: Iterable[str], path: Optional[str] = None
) -> Iterator[tuple[str, str]]:
    """Parse ``doc_id<TAB>text`` lines into (doc_id, text) pairs."""
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        doc_id, sep, text = line.partition("\t")
        if not sep:
            raise MalformedRecordError("expected doc_id<TAB>text", line_no, path)
        if not doc_id.strip() or doc_id != doc_id.strip():
            raise MalformedRecordError(f"invalid document id {doc_id!r}", line_no, path)
        yield doc_id, text


def read_corpus_file(path: str | Path) -> list[tuple[str, str]]:
    return list(iter_corpus_records(iter_text_lines(path), str(path)))


def ingest_corpus(
    records: Iterable[tuple[str, str]],
    stopwords: Optional[frozenset[str]] = None,
) -> DocumentIndex:
    """Build a DocumentIndex from (doc_id, text) records.

    Documents that tokenize to nothing are kept with length 0; they can still
    carry associations but never become retrieval candidates.

    Raises:
        DuplicateDocumentError: if a doc id repeats
        EmptyCorpusError: if there are no records
    """
    docs: dict[str, Document] = {}
    postings: dict[str, list[str]] = {}
    for doc_id, text in records:
        if doc_id in docs:
            logger.error(f"Duplicate document id during ingestion: {doc_id}")
            raise DuplicateDocumentError(doc_id)
        freqs = Counter(tokenize(text, stopwords))
        doc = Document(id=doc_id, freqs=dict(freqs), length=sum(freqs.values()))
        docs[doc_id] = doc
        for term in doc.freqs:
            postings.setdefault(term, []).append(doc_id)

    if not docs:
        raise EmptyCorpusError()

    stats = CollectionStats.from_documents(docs.values())
    empty = sum(1 for d in docs.values() if d.length == 0)
    logger.info(
        f"Ingested {stats.num_docs} documents, {stats.total_tokens} tokens, "
        f"{len(stats.doc_freq)} terms ({empty} empty documents)"
    )
    return DocumentIndex(
        docs=docs,
        stats=stats,
        postings={t: tuple(sorted(ids)) for t, ids in postings.items()},
    )
