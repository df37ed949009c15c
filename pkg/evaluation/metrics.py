"""
Evaluation metrics
MAP, reciprocal rank, P@k and nDCG@k over graded relevance judgments, with
trec_eval-style metric names (``map``, ``recip_rank``, ``P_10``, ``ndcg_cut_20``).

Binary metrics treat grade > 0 as relevant. Queries without any relevant
object are excluded from the means and counted separately.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Collection, Mapping, Sequence

from pydantic import BaseModel, ConfigDict, field_validator

from utils.errors import DisjointQueriesError, NoRelevantError

logger = logging.getLogger(__name__)

Qrels = Mapping[str, Mapping[str, int]]


class GainFunction(str, Enum):
    EXPONENTIAL = "exponential"
    LINEAR = "linear"


class MetricConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    precision_cutoffs: tuple[int, ...] = (5, 10)
    ndcg_cutoffs: tuple[int, ...] = (20,)
    gain: GainFunction = GainFunction.EXPONENTIAL

    @field_validator("precision_cutoffs", "ndcg_cutoffs")
    @classmethod
    def _positive(cls, v: tuple[int, ...]) -> tuple[int, ...]:
        if any(k < 1 for k in v):
            raise ValueError("cutoffs must be >= 1")
        return tuple(sorted(set(v)))

    @property
    def metric_names(self) -> list[str]:
        return (
            ["map", "recip_rank"]
            + [f"P_{k}" for k in self.precision_cutoffs]
            + [f"ndcg_cut_{k}" for k in self.ndcg_cutoffs]
        )


def precision_at_k(ranking: Sequence[str], relevant: Collection[str], k: int) -> float:
    """Relevant results among the first k, divided by k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return sum(1 for oid in ranking[:k] if oid in relevant) / k


def reciprocal_rank(ranking: Sequence[str], relevant: Collection[str]) -> float:
    for position, oid in enumerate(ranking, start=1):
        if oid in relevant:
            return 1.0 / position
    return 0.0


def average_precision(ranking: Sequence[str], relevant: Collection[str]) -> float:
    """Mean of precision at each relevant hit, over all R relevant objects.

    Raises:
        NoRelevantError: if `relevant` is empty
    """
    if not relevant:
        raise NoRelevantError("average precision undefined without relevant objects")
    hits = 0
    total = 0.0
    for position, oid in enumerate(ranking, start=1):
        if oid in relevant:
            hits += 1
            total += hits / position
    return total / len(relevant)


def _gain(grade: int, gain: GainFunction) -> float:
    if gain is GainFunction.LINEAR:
        return float(grade)
    return 2.0**grade - 1.0


def ndcg_at_k(
    ranking: Sequence[str],
    grades: Mapping[str, int],
    k: int,
    gain: GainFunction = GainFunction.EXPONENTIAL,
) -> float:
    """DCG@k / ideal DCG@k with a log2(i+1) discount.

    Raises:
        NoRelevantError: if no object has a positive grade
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    positive = sorted((g for g in grades.values() if g > 0), reverse=True)
    if not positive:
        raise NoRelevantError("nDCG undefined without positive grades")
    dcg = sum(
        _gain(grades.get(oid, 0), gain) / math.log2(i + 1)
        for i, oid in enumerate(ranking[:k], start=1)
    )
    ideal = sum(_gain(g, gain) / math.log2(i + 1) for i, g in enumerate(positive[:k], start=1))
    return dcg / ideal


@dataclass
class MetricReport:
    per_query: dict[str, dict[str, float]]
    means: dict[str, float]
    num_queries: int
    metric_names: list[str]
    num_excluded: int = 0
    num_ignored: int = 0
    excluded: list[str] = field(default_factory=list)


def evaluate_query(
    ranking: Sequence[str], grades: Mapping[str, int], config: MetricConfig
) -> dict[str, float]:
    relevant = {oid for oid, g in grades.items() if g > 0}
    values = {
        "map": average_precision(ranking, relevant),
        "recip_rank": reciprocal_rank(ranking, relevant),
    }
    for k in config.precision_cutoffs:
        values[f"P_{k}"] = precision_at_k(ranking, relevant, k)
    for k in config.ndcg_cutoffs:
        values[f"ndcg_cut_{k}"] = ndcg_at_k(ranking, grades, k, config.gain)
    return values


def evaluate_run(
    run: Mapping[str, Sequence[str]],
    qrels: Qrels,
    config: MetricConfig | None = None,
) -> MetricReport:
    """Evaluate a run (query id -> ranked object ids) against qrels.

    Judged queries missing from the run score 0 on every metric. Run
    queries without judgments are ignored and counted.

    Raises:
        DisjointQueriesError: if run and qrels share no query id
        NoRelevantError: if no judged query has a relevant object
    """
    config = config or MetricConfig()
    names = config.metric_names
    if not set(run) & set(qrels):
        raise DisjointQueriesError()

    per_query: dict[str, dict[str, float]] = {}
    excluded: list[str] = []
    for qid in sorted(qrels):
        grades = qrels[qid]
        if not any(g > 0 for g in grades.values()):
            excluded.append(qid)
            continue
        per_query[qid] = evaluate_query(list(run.get(qid, ())), grades, config)

    if not per_query:
        raise NoRelevantError("no judged query has a relevant object")

    ignored = sorted(set(run) - set(qrels))
    if excluded:
        logger.warning(f"Excluded {len(excluded)} judged queries without relevant objects")
    if ignored:
        logger.warning(f"Ignored {len(ignored)} run queries without judgments")

    n = len(per_query)
    means = {m: math.fsum(v[m] for v in per_query.values()) / n for m in names}
    return MetricReport(
        per_query=per_query,
        means=means,
        num_queries=n,
        metric_names=names,
        num_excluded=len(excluded),
        num_ignored=len(ignored),
        excluded=excluded,
    )
