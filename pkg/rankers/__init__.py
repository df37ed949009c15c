"""
Object rankers: early fusion (pseudo-documents) and late fusion (document score aggregation)
"""

from .early_fusion import (
    EarlyFusionRanker,
    ObjectIndex,
    PseudoObject,
    build_object_index,
    rank_objects_early,
    score_object_early,
)
from .late_fusion import (
    AggregationSpec,
    AggregationTransform,
    DocScoreList,
    LateFusionRanker,
    aggregate_objects,
    score_documents,
)
from .ranked_list import RankedList

__all__ = [
    "AggregationSpec",
    "AggregationTransform",
    "DocScoreList",
    "EarlyFusionRanker",
    "LateFusionRanker",
    "ObjectIndex",
    "PseudoObject",
    "RankedList",
    "aggregate_objects",
    "build_object_index",
    "rank_objects_early",
    "score_documents",
    "score_object_early",
]
