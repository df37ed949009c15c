"""
Early Fusion Ranker
Builds a pseudo-document for every object by aggregating term counts of its
associated documents, then ranks the pseudo-documents directly:

    f~(t,o) = sum_d f(t,d) * w(d,o)        |o| = sum_t f~(t,o)

The LM background model P(t) always comes from the document collection.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from indexing.associations import AssociationMode, AssociationTable, weight
from indexing.text_corpus import CollectionStats, DocumentIndex, background_prob
from rankers.ranked_list import RankedList
from scoring.term_scoring import (
    ModelParams,
    RetrievalModel,
    bm25_term_score,
    idf,
    lm_term_score,
)
from utils.errors import (
    EmptyObjectIndexError,
    EmptyQueryError,
    UnknownDocumentError,
    UnknownObjectError,
    UnsmoothableTermError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PseudoObject:
    id: str
    pseudo_freqs: Mapping[str, float]
    length: float


@dataclass(frozen=True)
class ObjectIndex:
    """Pseudo-objects plus the object-level statistics BM25 needs.

    `excluded` lists objects whose associated documents were all empty;
    they are not part of N or avg(o).
    """

    objects: Mapping[str, PseudoObject]
    object_doc_freq: Mapping[str, int]
    avg_object_length: float
    background: CollectionStats = field(repr=False)
    mode: AssociationMode = AssociationMode.BINARY
    excluded: tuple[str, ...] = ()
    postings: Mapping[str, tuple[str, ...]] = field(default_factory=dict, repr=False)

    @property
    def num_objects(self) -> int:
        return len(self.objects)

    def candidates(self, query: Sequence[str]) -> list[str]:
        hits: set[str] = set()
        for term in query:
            hits.update(self.postings.get(term, ()))
        return sorted(hits)

    @classmethod
    def from_objects(
        cls,
        objects: Sequence[PseudoObject],
        background: CollectionStats,
        mode: AssociationMode,
        excluded: Sequence[str] = (),
    ) -> "ObjectIndex":
        """Derive object-level df, avg(o) and postings from built objects."""
        if not objects:
            raise EmptyObjectIndexError()
        ordered = sorted(objects, key=lambda o: o.id)
        postings: dict[str, list[str]] = {}
        for obj in ordered:
            for term in obj.pseudo_freqs:
                postings.setdefault(term, []).append(obj.id)
        return cls(
            objects={o.id: o for o in ordered},
            object_doc_freq={t: len(ids) for t, ids in sorted(postings.items())},
            avg_object_length=math.fsum(o.length for o in ordered) / len(ordered),
            background=background,
            mode=mode,
            excluded=tuple(sorted(excluded)),
            postings={t: tuple(ids) for t, ids in postings.items()},
        )


def build_object_index(
    index: DocumentIndex, table: AssociationTable, mode: AssociationMode
) -> ObjectIndex:
    """Materialize f~(t,o) sparsely for every object in `table`.

    Documents are summed in ascending id order so results do not depend on
    input order. Objects whose pseudo-length is 0 are excluded and logged.
    """
    built: list[PseudoObject] = []
    excluded: list[str] = []
    for object_id in table.object_ids:
        freqs: dict[str, float] = {}
        for doc_id in table.docs_of[object_id]:
            w = weight(table, mode, doc_id, object_id)
            if w == 0.0:
                continue
            doc = index.get(doc_id)
            if doc is None:
                raise UnknownDocumentError(doc_id)
            for term, count in doc.freqs.items():
                freqs[term] = freqs.get(term, 0.0) + count * w
        pseudo = {t: f for t, f in sorted(freqs.items()) if f > 0.0}
        length = math.fsum(pseudo.values())
        if length == 0.0:
            excluded.append(object_id)
            continue
        built.append(PseudoObject(id=object_id, pseudo_freqs=pseudo, length=length))

    if excluded:
        logger.warning(
            f"Excluded {len(excluded)} objects with empty pseudo-documents: "
            f"{', '.join(excluded[:10])}{' ...' if len(excluded) > 10 else ''}"
        )
    obj_index = ObjectIndex.from_objects(built, index.stats, mode, excluded)
    logger.info(
        f"Built {obj_index.num_objects} pseudo-objects ({mode.value} associations), "
        f"avg length {obj_index.avg_object_length:.2f}"
    )
    return obj_index


def score_object_early(
    obj_index: ObjectIndex,
    object_id: str,
    query: Sequence[str],
    model: RetrievalModel,
    params: ModelParams,
) -> float:
    """Sum of per-instance term scores of `query` against one pseudo-object.

    Query terms unseen in the collection (LM) or in every object (BM25) are
    skipped. Repeated query terms count once per occurrence.
    """
    obj = obj_index.objects.get(object_id)
    if obj is None:
        raise UnknownObjectError(object_id)

    total = 0.0
    for term in query:
        freq = obj.pseudo_freqs.get(term, 0.0)
        if model is RetrievalModel.LM:
            p_t = background_prob(obj_index.background, term)
            if p_t == 0.0:
                continue
            total += lm_term_score(freq, obj.length, p_t, params.lambda_)
        else:
            n_t = obj_index.object_doc_freq.get(term, 0)
            if n_t == 0:
                continue
            total += bm25_term_score(
                freq,
                obj.length,
                obj_index.avg_object_length,
                idf(obj_index.num_objects, n_t),
                params.k1,
                params.b,
            )
    return total


def rank_objects_early(
    obj_index: ObjectIndex,
    query: Sequence[str],
    model: RetrievalModel,
    params: ModelParams,
    cutoff: Optional[int] = None,
) -> RankedList:
    """Rank objects that contain at least one query term.

    Raises:
        EmptyQueryError: if `query` has no terms
    """
    if not query:
        raise EmptyQueryError()
    scores: dict[str, float] = {}
    for object_id in obj_index.candidates(query):
        try:
            scores[object_id] = score_object_early(obj_index, object_id, query, model, params)
        except UnsmoothableTermError:
            # lambda = 0 and a query term is missing: zero likelihood
            continue
    return RankedList.from_scores(scores, cutoff)


class EarlyFusionRanker:
    """Ranks objects through their pseudo-documents."""

    def __init__(
        self,
        obj_index: ObjectIndex,
        model: RetrievalModel = RetrievalModel.LM,
        params: Optional[ModelParams] = None,
    ):
        self.obj_index = obj_index
        self.model = model
        self.params = params or ModelParams()

    @classmethod
    def build(
        cls,
        index: DocumentIndex,
        table: AssociationTable,
        mode: AssociationMode,
        model: RetrievalModel = RetrievalModel.LM,
        params: Optional[ModelParams] = None,
    ) -> "EarlyFusionRanker":
        return cls(build_object_index(index, table, mode), model, params)

    def rank(self, query: Sequence[str], cutoff: Optional[int] = None) -> RankedList:
        ranked = rank_objects_early(self.obj_index, query, self.model, self.params, cutoff)
        logger.debug(f"Early fusion ({self.model.value}): {len(ranked)} objects")
        return ranked
