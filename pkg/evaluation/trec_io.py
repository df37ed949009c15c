"""
TREC file formats: qrels, run files, queries, and the tab-separated metric report.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Optional

from evaluation.metrics import MetricReport
from utils.errors import EmptyRunError, MalformedRecordError
from utils.text_files import iter_text_lines

logger = logging.getLogger(__name__)

REPORT_VALUE_FORMAT = "{:.4f}"


def _content_lines(lines: Iterable[str]) -> Iterable[tuple[int, str]]:
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        yield line_no, line


def parse_qrels(lines: Iterable[str], path: Optional[str] = None) -> dict[str, dict[str, int]]:
    """``query_id 0 object_id grade`` per line, whitespace-delimited."""
    qrels: dict[str, dict[str, int]] = {}
    for line_no, line in _content_lines(lines):
        fields = line.split()
        if len(fields) != 4:
            raise MalformedRecordError("expected 'query_id 0 object_id grade'", line_no, path)
        qid, _, oid, grade_str = fields
        try:
            grade = int(grade_str)
        except ValueError:
            raise MalformedRecordError(f"invalid grade {grade_str!r}", line_no, path) from None
        if grade < 0:
            raise MalformedRecordError(f"negative grade {grade}", line_no, path)
        qrels.setdefault(qid, {})[oid] = grade
    return qrels


def read_qrels(path: str | Path) -> dict[str, dict[str, int]]:
    return parse_qrels(iter_text_lines(path), str(path))


def parse_run(lines: Iterable[str], path: Optional[str] = None) -> dict[str, list[str]]:
    """Run lines ``qid Q0 object_id rank score tag`` -> ranked ids per query.

    Entries are ordered by the rank column (file order breaks ties). An object
    listed twice for the same query keeps only its best-ranked entry.

    Raises:
        EmptyRunError: if the run holds no lines
    """
    rows: dict[str, list[tuple[int, int, str]]] = {}
    for line_no, line in _content_lines(lines):
        fields = line.split()
        if len(fields) != 6:
            raise MalformedRecordError(
                "expected 'query_id Q0 object_id rank score tag'", line_no, path
            )
        qid, _, oid, rank_str, score_str, _ = fields
        try:
            rank = int(rank_str)
            float(score_str)
        except ValueError:
            raise MalformedRecordError("invalid rank or score", line_no, path) from None
        rows.setdefault(qid, []).append((rank, line_no, oid))
    if not rows:
        raise EmptyRunError()

    ranked: dict[str, list[str]] = {}
    for qid, entries in rows.items():
        seen: set[str] = set()
        ids = ranked[qid] = []
        for _, line_no, oid in sorted(entries):
            if oid in seen:
                logger.warning(
                    f"{path or 'run'}:{line_no}: object {oid} repeated for query {qid}; "
                    "keeping the best-ranked entry"
                )
                continue
            seen.add(oid)
            ids.append(oid)
    return ranked


def read_run(path: str | Path) -> dict[str, list[str]]:
    return parse_run(iter_text_lines(path), str(path))


def parse_queries(lines: Iterable[str], path: Optional[str] = None) -> list[tuple[str, str]]:
    """``query_id<TAB>query text`` per line, in file order."""
    queries: list[tuple[str, str]] = []
    seen: set[str] = set()
    for line_no, line in _content_lines(lines):
        qid, sep, text = line.partition("\t")
        if not sep or not qid.strip():
            raise MalformedRecordError("expected query_id<TAB>query text", line_no, path)
        if qid in seen:
            raise MalformedRecordError(f"duplicate query id {qid}", line_no, path)
        seen.add(qid)
        queries.append((qid, text))
    return queries


def read_queries_file(path: str | Path) -> list[tuple[str, str]]:
    return parse_queries(iter_text_lines(path), str(path))


def format_report(report: MetricReport) -> str:
    """``metric<TAB>query_id<TAB>value`` per query, then ``metric<TAB>all<TAB>mean``."""
    lines = []
    for qid in sorted(report.per_query):
        values = report.per_query[qid]
        for metric in report.metric_names:
            lines.append(f"{metric}\t{qid}\t{REPORT_VALUE_FORMAT.format(values[metric])}")
    for metric in report.metric_names:
        lines.append(f"{metric}\tall\t{REPORT_VALUE_FORMAT.format(report.means[metric])}")
    return "\n".join(lines) + "\n"
