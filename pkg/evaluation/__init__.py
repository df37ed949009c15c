"""
Run evaluation against TREC qrels
"""

from .metrics import (
    GainFunction,
    MetricConfig,
    MetricReport,
    average_precision,
    evaluate_run,
    ndcg_at_k,
    precision_at_k,
    reciprocal_rank,
)
from .trec_io import format_report, read_qrels, read_queries_file, read_run

__all__ = [
    "GainFunction",
    "MetricConfig",
    "MetricReport",
    "average_precision",
    "evaluate_run",
    "format_report",
    "ndcg_at_k",
    "precision_at_k",
    "read_qrels",
    "read_queries_file",
    "read_run",
    "reciprocal_rank",
]
