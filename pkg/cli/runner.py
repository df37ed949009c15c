"""
fusion-rank: rank objects by early or late fusion, evaluate runs, and
compare the fusion x model x association grid.

    fusion-rank rank  --corpus C --associations A --queries Q [options]
    fusion-rank eval  --run R --qrels Q
    fusion-rank grid  --corpus C --associations A --queries Q --qrels R
    fusion-rank sweep --corpus C --associations A --queries Q --qrels R --topk 10,100,1000

Results go to stdout (or --output); diagnostics go to stderr. Exit status is
0 on success, 1 on usage errors and 2 on data errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence, TextIO

from pydantic import ValidationError

from evaluation.metrics import GainFunction, MetricConfig, evaluate_run
from evaluation.trec_io import format_report, read_qrels, read_run
from indexing.associations import AssociationMode
from indexing.text_corpus import load_stopwords
from orchestration.coordinator import RetrievalWorkflow
from orchestration.grid import (
    Task,
    format_grid_table,
    format_sweep_table,
    run_grid,
    run_topk_sweep,
)
from rankers.late_fusion import DEFAULT_TOPK_DOCS, AggregationTransform
from scoring.term_scoring import RetrievalModel
from utils.config import (
    DEFAULT_OUTPUT_DEPTH,
    DEFAULT_RUN_TAG,
    MAX_CONCURRENCY,
    RUN_LOG_DIR,
    FusionStrategy,
    configure_logging,
    create_run_config,
)
from utils.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE, ConfigError, FusionRetrievalError

logger = logging.getLogger(__name__)

DEFAULT_SWEEP_TOPK = (10, 100, 1000)


class _UsageErrorParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(value: str) -> tuple[int, ...]:
    try:
        numbers = tuple(int(v) for v in value.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")
    if not numbers or any(n < 1 for n in numbers):
        raise argparse.ArgumentTypeError(f"expected positive integers, got {value!r}")
    return numbers


def _choices(enum_cls) -> list[str]:
    return [member.value for member in enum_cls]


def _add_input_args(parser: argparse.ArgumentParser, qrels: bool = False) -> None:
    parser.add_argument("--corpus", required=True, help="Corpus file: doc_id<TAB>text")
    parser.add_argument(
        "--associations", required=True, help="Associations file: doc_id<TAB>object_id[<TAB>weight]"
    )
    parser.add_argument("--queries", required=True, help="Queries file: query_id<TAB>text")
    if qrels:
        parser.add_argument("--qrels", required=True, help="TREC qrels file")
    parser.add_argument("--stopwords", help="Stopword list applied to documents and queries")
    parser.add_argument(
        "--lenient", action="store_true", help="Drop associations to unknown documents"
    )
    parser.add_argument("--run-log-dir", default=RUN_LOG_DIR, help="Directory for JSON run logs")


def _add_model_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", choices=_choices(RetrievalModel), default=RetrievalModel.LM.value)
    parser.add_argument(
        "--assoc", choices=_choices(AssociationMode), default=AssociationMode.BINARY.value,
        help="Association weighting",
    )
    parser.add_argument(
        "--transform", choices=_choices(AggregationTransform),
        default=AggregationTransform.RAW.value,
        help="Late-fusion aggregation: raw scores or reciprocal-rank voting",
    )
    parser.add_argument("--lambda", dest="lambda_", type=float, help="Jelinek-Mercer weight (0.1)")
    parser.add_argument("--k1", type=float, help="BM25 k1 (1.2)")
    parser.add_argument("--b", type=float, help="BM25 b (0.75)")


def _add_metric_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--precision-cutoffs", type=_int_list, default=(5, 10))
    parser.add_argument("--ndcg-cutoffs", type=_int_list, default=(20,))
    parser.add_argument(
        "--gain", choices=_choices(GainFunction), default=GainFunction.EXPONENTIAL.value
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _UsageErrorParser(
        prog="fusion-rank",
        description="Object retrieval by early and late fusion",
    )
    parser.add_argument("--log-level", help="Logging level (default: FUSION_LOG_LEVEL or INFO)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    rank = subparsers.add_parser("rank", help="Rank objects and write a TREC run")
    _add_input_args(rank)
    rank.add_argument(
        "--fusion", choices=_choices(FusionStrategy), default=FusionStrategy.EARLY.value
    )
    _add_model_args(rank)
    rank.add_argument("--topk-docs", type=int, default=DEFAULT_TOPK_DOCS,
                      help="Documents kept per query before late-fusion aggregation")
    rank.add_argument("--depth", type=int, default=DEFAULT_OUTPUT_DEPTH,
                      help="Objects written per query")
    rank.add_argument("--tag", default=DEFAULT_RUN_TAG, help="Run tag (last column)")
    rank.add_argument("--index-cache", help="Object-index cache file (early fusion)")
    rank.add_argument("--output", help="Write the run here instead of stdout")

    evaluate = subparsers.add_parser("eval", help="Evaluate a TREC run against qrels")
    evaluate.add_argument("--run", required=True)
    evaluate.add_argument("--qrels", required=True)
    _add_metric_args(evaluate)

    grid = subparsers.add_parser("grid", help="Compare all fusion x model x association runs")
    _add_input_args(grid, qrels=True)
    grid.add_argument("--task", choices=_choices(Task), default=Task.EXPERT.value)

    sweep = subparsers.add_parser("sweep", help="Late fusion at several document cutoffs")
    _add_input_args(sweep, qrels=True)
    _add_model_args(sweep)
    sweep.add_argument("--topk", type=_int_list, default=DEFAULT_SWEEP_TOPK)
    _add_metric_args(sweep)

    return parser


def _workflow(args: argparse.Namespace, metric_config: Optional[MetricConfig] = None,
              index_cache: Optional[str] = None) -> RetrievalWorkflow:
    stopwords = load_stopwords(args.stopwords) if args.stopwords else None
    return RetrievalWorkflow(
        stopwords=stopwords,
        lenient=args.lenient,
        index_cache=index_cache,
        metric_config=metric_config,
        run_log_dir=args.run_log_dir,
        max_concurrency=MAX_CONCURRENCY,
    )


def _metric_config(args: argparse.Namespace) -> MetricConfig:
    try:
        return MetricConfig(
            precision_cutoffs=args.precision_cutoffs,
            ndcg_cutoffs=args.ndcg_cutoffs,
            gain=args.gain,
        )
    except ValidationError as e:
        raise ConfigError(f"invalid metric configuration: {e}") from e


def cmd_rank(args: argparse.Namespace, out: TextIO) -> int:
    config = create_run_config(
        fusion=args.fusion,
        model=args.model,
        assoc=args.assoc,
        lambda_=args.lambda_,
        k1=args.k1,
        b=args.b,
        transform=args.transform,
        top_k_docs=args.topk_docs,
        output_depth=args.depth,
        run_tag=args.tag,
    )
    workflow = _workflow(args, index_cache=args.index_cache)
    state = workflow.run(config, args.corpus, args.associations, args.queries)

    lines = []
    for query_id, ranked in state["run"].items():
        lines.extend(ranked.to_run_lines(query_id, config.run_tag, config.output_depth))
    text = "".join(line + "\n" for line in lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"Wrote {len(lines)} run lines to {args.output}")
    else:
        out.write(text)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, out: TextIO) -> int:
    run = read_run(args.run)
    qrels = read_qrels(args.qrels)
    report = evaluate_run(run, qrels, _metric_config(args))
    out.write(format_report(report))
    return EXIT_OK


def cmd_grid(args: argparse.Namespace, out: TextIO) -> int:
    task = Task(args.task)
    rows = run_grid(_workflow(args), args.corpus, args.associations, args.queries, args.qrels, task)
    out.write(format_grid_table(rows, task))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, out: TextIO) -> int:
    base = create_run_config(
        fusion=FusionStrategy.LATE.value,
        model=args.model,
        assoc=args.assoc,
        lambda_=args.lambda_,
        k1=args.k1,
        b=args.b,
        transform=args.transform,
    )
    metric_config = _metric_config(args)
    results = run_topk_sweep(
        _workflow(args, metric_config),
        args.corpus, args.associations, args.queries, args.qrels,
        args.topk, base,
    )
    out.write(format_sweep_table(results, metric_config.metric_names))
    return EXIT_OK


COMMANDS = {
    "rank": cmd_rank,
    "eval": cmd_eval,
    "grid": cmd_grid,
    "sweep": cmd_sweep,
}


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """Entry point; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.log_level)
    out = out or sys.stdout
    try:
        return COMMANDS[args.command](args, out)
    except FusionRetrievalError as e:
        logger.error(str(e))
        return e.exit_status
    except OSError as e:
        logger.error(f"{e.filename or 'file'}: {e.strerror or e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
