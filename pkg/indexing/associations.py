"""
Document-object associations
Stores the bipartite doc <-> object graph and computes association weights
w(d,o): binary (membership), uniform (1/len(o)) or explicit (stored weight).

Associations file format: UTF-8, one edge per line,
``doc_id<TAB>object_id[<TAB>weight]``; ``#`` comment lines ignored.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from indexing.text_corpus import DocumentIndex
from utils.errors import (
    MalformedRecordError,
    NegativeWeightError,
    UnknownDocumentError,
    UnknownObjectError,
)
from utils.text_files import iter_text_lines

logger = logging.getLogger(__name__)

AssociationRecord = tuple[str, str, Optional[float]]


class AssociationMode(str, Enum):
    BINARY = "binary"
    UNIFORM = "uniform"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class AssociationTable:
    """Deduplicated edges with both adjacency directions, sorted by id."""

    docs_of: Mapping[str, tuple[str, ...]]
    objects_of: Mapping[str, tuple[str, ...]]
    explicit_weights: Mapping[tuple[str, str], float] = field(repr=False)
    dropped_edges: int = 0

    @property
    def object_ids(self) -> list[str]:
        return sorted(self.docs_of)

    def len_of(self, object_id: str) -> int:
        docs = self.docs_of.get(object_id)
        if docs is None:
            raise UnknownObjectError(object_id)
        return len(docs)

    def has_edge(self, doc_id: str, object_id: str) -> bool:
        return object_id in self.objects_of.get(doc_id, ())

    def __len__(self) -> int:
        return sum(len(docs) for docs in self.docs_of.values())


def weight(
    table: AssociationTable, mode: AssociationMode, doc_id: str, object_id: str
) -> float:
    """w(d,o) under the given association mode.

    Raises:
        UnknownObjectError: if `object_id` has no associated documents
    """
    n = table.len_of(object_id)
    if not table.has_edge(doc_id, object_id):
        return 0.0
    if mode is AssociationMode.BINARY:
        return 1.0
    if mode is AssociationMode.UNIFORM:
        return 1.0 / n
    return table.explicit_weights.get((doc_id, object_id), 1.0)


def iter_association_records(
    lines: Iterable[str], path: Optional[str] = None
) -> Iterator[AssociationRecord]:
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) not in (2, 3) or not fields[0] or not fields[1]:
            raise MalformedRecordError(
                "expected doc_id<TAB>object_id[<TAB>weight]", line_no, path
            )
        w: Optional[float] = None
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise MalformedRecordError(
                    f"invalid weight {fields[2]!r}", line_no, path
                ) from None
            if not math.isfinite(w):
                raise MalformedRecordError(f"non-finite weight {fields[2]!r}", line_no, path)
        yield fields[0], fields[1], w


def read_associations_file(path: str | Path) -> list[AssociationRecord]:
    return list(iter_association_records(iter_text_lines(path), str(path)))


def load_associations(
    records: Iterable[tuple[str, str] | AssociationRecord],
    index: DocumentIndex,
    lenient: bool = False,
) -> AssociationTable:
    """Build an AssociationTable from (doc_id, object_id[, weight]) records.

    Args:
        records: Edge records; the weight element is optional
        index: Document index the edges refer to
        lenient: Drop edges to unknown documents instead of failing

    Returns:
        The table; ``dropped_edges`` counts edges removed in lenient mode

    Raises:
        UnknownDocumentError: strict mode and an edge names an unknown doc
        NegativeWeightError: an explicit weight is negative
    """
    docs_of: dict[str, set[str]] = {}
    objects_of: dict[str, set[str]] = {}
    explicit: dict[tuple[str, str], float] = {}
    dropped = 0
    duplicates = 0

    for record in records:
        doc_id, object_id = record[0], record[1]
        w = record[2] if len(record) > 2 else None
        if doc_id not in index:
            if not lenient:
                logger.error(f"Association references unknown document {doc_id}")
                raise UnknownDocumentError(doc_id)
            dropped += 1
            continue
        if w is not None and w < 0:
            raise NegativeWeightError(doc_id, object_id, w)

        edge = (doc_id, object_id)
        if object_id in objects_of.get(doc_id, ()):
            duplicates += 1
            if w is not None and explicit.get(edge) != w:
                logger.warning(
                    f"Duplicate edge {edge} carries weight {w}; keeping the first occurrence"
                )
            continue
        docs_of.setdefault(object_id, set()).add(doc_id)
        objects_of.setdefault(doc_id, set()).add(object_id)
        if w is not None:
            explicit[edge] = w

    if dropped:
        logger.warning(f"Dropped {dropped} associations to unknown documents (lenient mode)")
    if duplicates:
        logger.info(f"Ignored {duplicates} duplicate associations")
    logger.info(
        f"Loaded {sum(len(d) for d in docs_of.values())} associations "
        f"for {len(docs_of)} objects"
    )
    return AssociationTable(
        docs_of={o: tuple(sorted(ds)) for o, ds in sorted(docs_of.items())},
        objects_of={d: tuple(sorted(os_)) for d, os_ in sorted(objects_of.items())},
        explicit_weights=explicit,
        dropped_edges=dropped,
    )
