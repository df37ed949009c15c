"""
Configuration grid and top-K sweep.

The grid runs all eight configurations (fusion x model x association) with
default parameters and tabulates the metric columns of the chosen task; the
sweep evaluates late fusion at several document cutoffs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Any, Optional, Sequence

from evaluation.metrics import MetricReport
from evaluation.trec_io import REPORT_VALUE_FORMAT, read_qrels
from indexing.associations import AssociationMode
from orchestration.coordinator import RetrievalWorkflow
from scoring.term_scoring import RetrievalModel
from utils.config import FusionStrategy, RunConfig
from utils.errors import ConfigError, DisjointQueriesError

logger = logging.getLogger(__name__)

MAX_MARKER = "*"


class Task(str, Enum):
    EXPERT = "expert"
    BLOG = "blog"
    VERTICAL = "vertical"


TASK_COLUMNS: dict[Task, tuple[str, ...]] = {
    Task.EXPERT: ("map", "recip_rank", "P_10"),
    Task.BLOG: ("map", "recip_rank", "P_10"),
    Task.VERTICAL: ("ndcg_cut_20", "map", "P_5"),
}

GRID_ASSOCIATIONS = (AssociationMode.BINARY, AssociationMode.UNIFORM)


@dataclass
class GridRow:
    config: RunConfig
    values: dict[str, float]


def grid_configs(base: Optional[RunConfig] = None) -> list[RunConfig]:
    """The eight configurations in table order: fusion, then model, then association."""
    base = base or RunConfig()
    return [
        base.model_copy(update={"fusion": fusion, "model": model, "assoc": assoc})
        for fusion, model, assoc in product(FusionStrategy, RetrievalModel, GRID_ASSOCIATIONS)
    ]


def _report_values(report: Optional[MetricReport], columns: Sequence[str]) -> dict[str, float]:
    if report is None:
        return {c: 0.0 for c in columns}
    return {c: report.means[c] for c in columns}


def _run_and_evaluate(
    workflow: RetrievalWorkflow, config: RunConfig, state: dict[str, Any]
) -> tuple[Optional[MetricReport], dict[str, Any]]:
    try:
        result = workflow.run(config, preloaded=state)
    except DisjointQueriesError:
        query_ids = {qid for qid, _ in state.get("queries", [])}
        if query_ids.isdisjoint(state.get("qrels") or {}):
            raise
        logger.warning(f"{config.label}: no query produced results, scoring 0")
        return None, state
    next_state = dict(state)
    if "object_indexes" in result:
        next_state["object_indexes"] = result["object_indexes"]
    return result.get("report"), next_state


def run_grid(
    workflow: RetrievalWorkflow,
    corpus_path: str,
    associations_path: str,
    queries_path: str,
    qrels_path: str,
    task: Task = Task.EXPERT,
    base: Optional[RunConfig] = None,
) -> list[GridRow]:
    """Evaluate every configuration of the grid on the same inputs."""
    columns = TASK_COLUMNS[task]
    missing = set(columns) - set(workflow.metric_config.metric_names)
    if missing:
        raise ConfigError(f"metric configuration lacks grid columns: {sorted(missing)}")

    state = workflow.load(corpus_path, associations_path, queries_path)
    state["qrels"] = read_qrels(qrels_path)

    rows = []
    for config in grid_configs(base):
        report, state = _run_and_evaluate(workflow, config, state)
        rows.append(GridRow(config=config, values=_report_values(report, columns)))
        logger.info(f"Grid {config.label}: " + ", ".join(
            f"{c}={rows[-1].values[c]:.4f}" for c in columns
        ))
    return rows


def _printed(value: float) -> float:
    return float(REPORT_VALUE_FORMAT.format(value))


def format_grid_table(rows: Sequence[GridRow], task: Task = Task.EXPERT) -> str:
    """Tab-separated table with the per-column maximum marked by ``*``."""
    columns = TASK_COLUMNS[task]
    # Maxima are taken over the printed values so equal cells are marked alike.
    best = {c: max((_printed(r.values[c]) for r in rows), default=0.0) for c in columns}
    lines = ["\t".join(("fusion", "model", "assoc") + columns)]
    for row in rows:
        cells = [row.config.fusion.value, row.config.model.value, row.config.assoc.value]
        for c in columns:
            value = REPORT_VALUE_FORMAT.format(row.values[c])
            cells.append(value + MAX_MARKER if float(value) == best[c] else value)
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def run_topk_sweep(
    workflow: RetrievalWorkflow,
    corpus_path: str,
    associations_path: str,
    queries_path: str,
    qrels_path: str,
    ks: Sequence[int],
    base: Optional[RunConfig] = None,
) -> list[tuple[int, MetricReport | None]]:
    """Late-fusion effectiveness as a function of the document cutoff K."""
    base = (base or RunConfig()).model_copy(update={"fusion": FusionStrategy.LATE})
    state = workflow.load(corpus_path, associations_path, queries_path)
    state["qrels"] = read_qrels(qrels_path)

    results = []
    for k in sorted(set(ks)):
        config = base.model_copy(update={"top_k_docs": k})
        report, state = _run_and_evaluate(workflow, config, state)
        results.append((k, report))
    return results


def format_sweep_table(
    results: Sequence[tuple[int, MetricReport | None]], metric_names: Sequence[str]
) -> str:
    lines = ["\t".join(("topk", *metric_names))]
    for k, report in results:
        values = _report_values(report, metric_names)
        lines.append("\t".join([str(k)] + [REPORT_VALUE_FORMAT.format(values[m]) for m in metric_names]))
    return "\n".join(lines) + "\n"
