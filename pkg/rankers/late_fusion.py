"""
Late Fusion Ranker
Scores documents with a standard retrieval model, then aggregates document
evidence into object scores:

    score(o,q) = sum_{d in top-K} score(d,q) * w(d,o)

With the reciprocal-rank transform, score(d,q) is replaced by 1/rank(d)
(the voting model). LM document scores are query likelihoods in probability
space, so summing them rewards objects with more relevant documents.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field

from indexing.associations import AssociationMode, AssociationTable, weight
from indexing.text_corpus import DocumentIndex, background_prob
from rankers.ranked_list import RankedList, sort_scored
from scoring.term_scoring import (
    ModelParams,
    RetrievalModel,
    bm25_term_score,
    idf,
    lm_term_score,
)
from utils.errors import EmptyQueryError, UnsmoothableTermError

logger = logging.getLogger(__name__)

DEFAULT_TOPK_DOCS = 1000


class AggregationTransform(str, Enum):
    RAW = "raw"
    RECIPROCAL_RANK = "rr"


class AggregationSpec(BaseModel):
    """How document evidence is folded into object scores.

    ``top_k=None`` means unbounded.
    """

    model_config = ConfigDict(frozen=True)

    transform: AggregationTransform = AggregationTransform.RAW
    top_k: Optional[int] = Field(DEFAULT_TOPK_DOCS, ge=1)
    mode: AssociationMode = AssociationMode.BINARY


@dataclass(frozen=True)
class DocScoreList:
    """(doc_id, score) pairs, score descending, ties by ascending doc id."""

    entries: tuple[tuple[str, float], ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ids(self) -> list[str]:
        return [d for d, _ in self.entries]


def score_documents(
    index: DocumentIndex,
    query: Sequence[str],
    model: RetrievalModel,
    params: ModelParams,
) -> DocScoreList:
    """Score every document containing at least one query term.

    LM scores are exp(sum of log term scores), i.e. P(q|d) in (0, 1].
    BM25 uses document-level IDF and the average document length.
    """
    if not query:
        raise EmptyQueryError()
    stats = index.stats
    scores: dict[str, float] = {}

    if model is RetrievalModel.LM:
        terms = [(t, background_prob(stats, t)) for t in query]
        terms = [(t, p) for t, p in terms if p > 0.0]
        for doc_id in index.candidates(t for t, _ in terms):
            doc = index.docs[doc_id]
            try:
                log_score = math.fsum(
                    lm_term_score(doc.freqs.get(term, 0), doc.length, p_t, params.lambda_)
                    for term, p_t in terms
                )
            except UnsmoothableTermError:
                continue
            scores[doc_id] = math.exp(log_score)
    else:
        terms = [
            (t, idf(stats.num_docs, stats.doc_freq[t]))
            for t in query
            if stats.doc_freq.get(t, 0) > 0
        ]
        for doc_id in index.candidates(t for t, _ in terms):
            doc = index.docs[doc_id]
            score = 0.0
            for term, idf_t in terms:
                score += bm25_term_score(
                    doc.freqs.get(term, 0),
                    doc.length,
                    stats.avg_doc_length,
                    idf_t,
                    params.k1,
                    params.b,
                )
            scores[doc_id] = score

    return DocScoreList(tuple(sort_scored(scores.items())))


def aggregate_objects(
    docs: DocScoreList, table: AssociationTable, spec: AggregationSpec
) -> RankedList:
    """Fold the top-K document scores into object scores.

    Objects qualify when they have a nonzero-weight edge to a retained
    document. Contributions are accumulated in document rank order.
    """
    retained = docs.entries if spec.top_k is None else docs.entries[: spec.top_k]
    scores: dict[str, float] = {}
    for rank, (doc_id, doc_score) in enumerate(retained, start=1):
        evidence = (
            1.0 / rank
            if spec.transform is AggregationTransform.RECIPROCAL_RANK
            else doc_score
        )
        for object_id in table.objects_of.get(doc_id, ()):
            w = weight(table, spec.mode, doc_id, object_id)
            if w == 0.0:
                continue
            scores[object_id] = scores.get(object_id, 0.0) + evidence * w
    return RankedList.from_scores(scores)


class LateFusionRanker:
    """Ranks documents first, then aggregates their scores per object."""

    def __init__(
        self,
        index: DocumentIndex,
        table: AssociationTable,
        model: RetrievalModel = RetrievalModel.LM,
        params: Optional[ModelParams] = None,
        spec: Optional[AggregationSpec] = None,
    ):
        self.index = index
        self.table = table
        self.model = model
        self.params = params or ModelParams()
        self.spec = spec or AggregationSpec()

    def rank(self, query: Sequence[str], cutoff: Optional[int] = None) -> RankedList:
        doc_scores = score_documents(self.index, query, self.model, self.params)
        ranked = aggregate_objects(doc_scores, self.table, self.spec)
        logger.debug(
            f"Late fusion ({self.model.value}, {self.spec.transform.value}): "
            f"{len(doc_scores)} documents -> {len(ranked)} objects"
        )
        if cutoff is not None:
            ranked = RankedList(ranked.entries[:cutoff])
        return ranked
