"""
LangGraph Orchestration Coordinator
Wires ingestion, association loading, object indexing, ranking and
evaluation into one retrieval pipeline.

    ingest -> associate -> [index_objects] -> rank -> [evaluate]

`index_objects` runs for early fusion only; `evaluate` runs when qrels are
supplied. Nodes skip work whose result is already in the state, so the grid
can ingest once and re-rank under many configurations.
"""

from __future__ import annotations

import asyncio
import logging
from typing import Any, Callable, Optional, Sequence, TypedDict

from langgraph.graph import END, StateGraph

from evaluation.metrics import MetricConfig, MetricReport, evaluate_run
from evaluation.trec_io import read_qrels, read_queries_file
from indexing.associations import (
    AssociationMode,
    AssociationTable,
    load_associations,
    read_associations_file,
)
from indexing.text_corpus import DocumentIndex, ingest_corpus, read_corpus_file, tokenize
from rankers.early_fusion import EarlyFusionRanker, ObjectIndex, build_object_index
from rankers.late_fusion import LateFusionRanker
from rankers.ranked_list import RankedList
from utils.config import MAX_CONCURRENCY, FusionStrategy, RunConfig
from utils.errors import IndexCacheError
from utils.index_cache import fingerprint_inputs, load_object_index, save_object_index
from utils.run_logger import get_run_logger

logger = logging.getLogger(__name__)

RankFn = Callable[[Sequence[str], Optional[int]], RankedList]


class RetrievalState(TypedDict, total=False):
    """State schema for the retrieval pipeline."""

    config: RunConfig
    corpus_path: str
    associations_path: str
    queries_path: str
    qrels_path: Optional[str]
    index: DocumentIndex
    table: AssociationTable
    queries: list[tuple[str, str]]
    qrels: dict[str, dict[str, int]]
    object_indexes: dict[AssociationMode, ObjectIndex]
    object_index: ObjectIndex
    run: dict[str, RankedList]
    skipped: dict[str, str]
    report: MetricReport


class RetrievalWorkflow:
    """Runs the retrieval pipeline as a LangGraph state machine."""

    def __init__(
        self,
        stopwords: Optional[frozenset[str]] = None,
        lenient: bool = False,
        index_cache: Optional[str] = None,
        metric_config: Optional[MetricConfig] = None,
        run_log_dir: Optional[str] = None,
        max_concurrency: int = MAX_CONCURRENCY,
    ):
        """Initialize pipeline options and build the workflow graph.

        Args:
            stopwords: Optional stopword list applied to documents and queries
            lenient: Drop associations to unknown documents instead of failing
            index_cache: Path of the object-index cache file (early fusion)
            metric_config: Metric cutoffs and gain for the evaluate step
            run_log_dir: Directory for JSON run logs
            max_concurrency: Bound on queries ranked at the same time
        """
        self.stopwords = stopwords
        self.lenient = lenient
        self.index_cache = index_cache
        self.metric_config = metric_config or MetricConfig()
        self.max_concurrency = max(1, max_concurrency)
        self.run_logger = get_run_logger(run_log_dir)
        self.workflow = self._build_workflow()

    def _build_workflow(self):
        graph = StateGraph(RetrievalState)

        graph.add_node("ingest", self._ingest_node)
        graph.add_node("associate", self._associate_node)
        graph.add_node("index_objects", self._index_objects_node)
        graph.add_node("rank", self._rank_node)
        graph.add_node("evaluate", self._evaluate_node)

        graph.set_entry_point("ingest")
        graph.add_edge("ingest", "associate")
        graph.add_conditional_edges(
            "associate",
            self._route_fusion,
            {"early": "index_objects", "late": "rank"},
        )
        graph.add_edge("index_objects", "rank")
        graph.add_conditional_edges(
            "rank",
            self._route_evaluation,
            {"evaluate": "evaluate", "end": END},
        )
        graph.add_edge("evaluate", END)

        return graph.compile()

    # ------------------------------------------------------------------
    # Routing
    # ------------------------------------------------------------------

    @staticmethod
    def _route_fusion(state: RetrievalState) -> str:
        return state["config"].fusion.value

    @staticmethod
    def _route_evaluation(state: RetrievalState) -> str:
        if state.get("qrels") is not None or state.get("qrels_path"):
            return "evaluate"
        return "end"

    # ------------------------------------------------------------------
    # Nodes
    # ------------------------------------------------------------------

    def _ingest_node(self, state: RetrievalState) -> RetrievalState:
        if state.get("index") is None:
            try:
                records = read_corpus_file(state["corpus_path"])
                state["index"] = ingest_corpus(records, self.stopwords)
            except Exception as e:
                self.run_logger.log_error("ingest", "ingest_corpus", e)
                raise
            stats = state["index"].stats
            self.run_logger.log_step(
                "ingest", "ingest_corpus",
                input_data={"corpus": state["corpus_path"]},
                output_data={"num_docs": stats.num_docs, "total_tokens": stats.total_tokens},
            )
        if state.get("queries") is None:
            state["queries"] = read_queries_file(state["queries_path"])
            logger.info(f"Loaded {len(state['queries'])} queries")
        return state

    def _associate_node(self, state: RetrievalState) -> RetrievalState:
        if state.get("table") is None:
            try:
                records = read_associations_file(state["associations_path"])
                state["table"] = load_associations(records, state["index"], self.lenient)
            except Exception as e:
                self.run_logger.log_error("associate", "load_associations", e)
                raise
            self.run_logger.log_step(
                "associate", "load_associations",
                input_data={"associations": state["associations_path"], "lenient": self.lenient},
                output_data={
                    "objects": len(state["table"].docs_of),
                    "edges": len(state["table"]),
                    "dropped": state["table"].dropped_edges,
                },
            )
        return state

    def _index_objects_node(self, state: RetrievalState) -> RetrievalState:
        mode = state["config"].assoc
        cached = dict(state.get("object_indexes") or {})
        obj_index = cached.get(mode)
        if obj_index is None:
            try:
                obj_index = self._object_index_for(state, mode)
            except Exception as e:
                self.run_logger.log_error("index_objects", "build_object_index", e)
                raise
            cached[mode] = obj_index
        state["object_indexes"] = cached
        state["object_index"] = obj_index
        self.run_logger.log_step(
            "index_objects", "build_object_index",
            input_data={"mode": mode.value},
            output_data={
                "num_objects": obj_index.num_objects,
                "avg_object_length": obj_index.avg_object_length,
                "excluded": list(obj_index.excluded),
            },
        )
        return state

    def _rank_node(self, state: RetrievalState) -> RetrievalState:
        config = state["config"]
        logger.info(f"Ranking {len(state['queries'])} queries with {config.label}")
        rank_fn = self._ranker_for(state)
        run, skipped = self.rank_queries(rank_fn, state["queries"], config.output_depth)
        state["run"] = run
        state["skipped"] = skipped
        if skipped:
            listed = ", ".join(f"{qid} ({reason})" for qid, reason in skipped.items())
            logger.warning(f"{len(skipped)} queries produced no results: {listed}")
        self.run_logger.log_step(
            "rank", config.label,
            input_data={"queries": len(state["queries"]), "config": config.model_dump(mode="json")},
            output_data={"ranked": len(run), "skipped": skipped},
        )
        return state

    def _evaluate_node(self, state: RetrievalState) -> RetrievalState:
        qrels = state.get("qrels")
        if qrels is None:
            qrels = read_qrels(state["qrels_path"])
            state["qrels"] = qrels
        run_ids = {qid: ranked.ids for qid, ranked in state["run"].items()}
        try:
            state["report"] = evaluate_run(run_ids, qrels, self.metric_config)
        except Exception as e:
            self.run_logger.log_error("evaluate", "evaluate_run", e)
            raise
        self.run_logger.log_step(
            "evaluate", "evaluate_run",
            output_data={"means": state["report"].means, "num_queries": state["report"].num_queries},
        )
        return state

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _object_index_for(self, state: RetrievalState, mode: AssociationMode) -> ObjectIndex:
        """Build the object index, going through the cache file when configured."""
        index = state["index"]
        if not self.index_cache or not state.get("corpus_path"):
            return build_object_index(index, state["table"], mode)

        fingerprint = fingerprint_inputs(
            [state["corpus_path"], state["associations_path"]], mode, self.stopwords
        )
        try:
            return load_object_index(self.index_cache, index.stats, fingerprint)
        except IndexCacheError as e:
            logger.warning(f"Rebuilding object index: {e}")
        obj_index = build_object_index(index, state["table"], mode)
        save_object_index(self.index_cache, obj_index, fingerprint)
        return obj_index

    def _ranker_for(self, state: RetrievalState) -> RankFn:
        config = state["config"]
        if config.fusion is FusionStrategy.EARLY:
            ranker = EarlyFusionRanker(state["object_index"], config.model, config.params)
        else:
            ranker = LateFusionRanker(
                state["index"], state["table"], config.model, config.params, config.aggregation
            )
        return ranker.rank

    def _rank_one(
        self, rank_fn: RankFn, query_id: str, text: str, depth: int
    ) -> tuple[str, Optional[RankedList], str]:
        terms = tokenize(text, self.stopwords)
        if not terms:
            return query_id, None, "empty query"
        ranked = rank_fn(terms, depth)
        if not ranked:
            return query_id, None, "no match"
        return query_id, ranked, ""

    async def _rank_parallel(
        self, rank_fn: RankFn, queries: list[tuple[str, str]], depth: int
    ) -> list[tuple[str, Optional[RankedList], str]]:
        semaphore = asyncio.Semaphore(self.max_concurrency)

        async def rank_async(query_id: str, text: str):
            async with semaphore:
                return await asyncio.to_thread(self._rank_one, rank_fn, query_id, text, depth)

        return await asyncio.gather(*(rank_async(qid, text) for qid, text in queries))

    def rank_queries(
        self, rank_fn: RankFn, queries: list[tuple[str, str]], depth: int
    ) -> tuple[dict[str, RankedList], dict[str, str]]:
        """Rank all queries concurrently; results keep query-file order.

        Returns:
            (query id -> ranked list, query id -> reason it produced nothing)
        """
        try:
            results = asyncio.run(self._rank_parallel(rank_fn, queries, depth))
        except RuntimeError as e:
            logger.error(f"Parallel ranking failed, falling back to sequential: {e}")
            results = [self._rank_one(rank_fn, qid, text, depth) for qid, text in queries]

        run: dict[str, RankedList] = {}
        skipped: dict[str, str] = {}
        for query_id, ranked, reason in results:
            if ranked is None:
                skipped[query_id] = reason
            else:
                run[query_id] = ranked
        return run, skipped

    # ------------------------------------------------------------------
    # Entry points
    # ------------------------------------------------------------------

    def load(
        self, corpus_path: str, associations_path: str, queries_path: str
    ) -> dict[str, Any]:
        """Ingest inputs once; the returned state can seed several runs."""
        state: RetrievalState = {
            "corpus_path": str(corpus_path),
            "associations_path": str(associations_path),
            "queries_path": str(queries_path),
        }
        self._ingest_node(state)
        self._associate_node(state)
        return dict(state)

    def run(
        self,
        config: RunConfig,
        corpus_path: Optional[str] = None,
        associations_path: Optional[str] = None,
        queries_path: Optional[str] = None,
        qrels_path: Optional[str] = None,
        preloaded: Optional[dict[str, Any]] = None,
    ) -> RetrievalState:
        """Run the pipeline for one configuration.

        Args:
            config: Fusion strategy, model, association mode and parameters
            corpus_path: Corpus file (not needed when `preloaded` has an index)
            associations_path: Associations file
            queries_path: Queries file
            qrels_path: Optional qrels file; enables the evaluate step
            preloaded: State from `load()` or a previous run

        Returns:
            Final pipeline state (run, skipped, report, ...)
        """
        initial: dict[str, Any] = dict(preloaded or {})
        initial["config"] = config
        for key, value in (
            ("corpus_path", corpus_path),
            ("associations_path", associations_path),
            ("queries_path", queries_path),
            ("qrels_path", qrels_path),
        ):
            if value is not None:
                initial[key] = str(value)

        self.run_logger.start_run(config.label, {
            k: initial.get(k) for k in ("corpus_path", "associations_path", "queries_path", "qrels_path")
        })
        try:
            final_state = self.workflow.invoke(initial)
        except Exception as e:
            logger.error(f"Pipeline failed for {config.label}: {e}")
            self.run_logger.end_run({"status": "error", "error": str(e)})
            raise
        self.run_logger.end_run({
            "status": "success",
            "ranked": len(final_state.get("run", {})),
            "skipped": len(final_state.get("skipped", {})),
        })
        return final_state
