"""
Corpus ingestion and document-object associations
"""

from .associations import (
    AssociationMode,
    AssociationTable,
    load_associations,
    read_associations_file,
    weight,
)
from .text_corpus import (
    CollectionStats,
    Document,
    DocumentIndex,
    background_prob,
    ingest_corpus,
    load_stopwords,
    read_corpus_file,
    tokenize,
)

__all__ = [
    "AssociationMode",
    "AssociationTable",
    "CollectionStats",
    "Document",
    "DocumentIndex",
    "background_prob",
    "ingest_corpus",
    "load_associations",
    "load_stopwords",
    "read_associations_file",
    "read_corpus_file",
    "tokenize",
    "weight",
]
