import pytest

from evaluation.metrics import MetricConfig
from orchestration.coordinator import RetrievalWorkflow
from orchestration.grid import (
    GridRow,
    Task,
    format_grid_table,
    format_sweep_table,
    grid_configs,
    run_grid,
    run_topk_sweep,
)
from rankers.ranked_list import RankedList
from utils.config import FusionStrategy, RunConfig, _env_positive_int, create_run_config
from utils.errors import ConfigError, DisjointQueriesError


@pytest.fixture
def workflow():
    return RetrievalWorkflow(max_concurrency=2)


def test_early_run(workflow, toy_paths):
    state = workflow.run(
        RunConfig(), toy_paths["corpus"], toy_paths["associations"], toy_paths["queries"]
    )
    assert list(state["run"]) == ["q1", "q2"]
    assert state["run"]["q1"].ids == ["o1", "o2"]
    assert state["run"]["q1"].entries[0][1] == pytest.approx(-1.894851, abs=1e-6)
    assert state["skipped"] == {"q3": "no match"}
    assert "report" not in state


def test_late_run_with_evaluation(workflow, toy_paths):
    config = RunConfig(fusion=FusionStrategy.LATE)
    state = workflow.run(
        config,
        toy_paths["corpus"],
        toy_paths["associations"],
        toy_paths["queries"],
        qrels_path=toy_paths["qrels"],
    )
    assert state["run"]["q2"].score_of("o1") == pytest.approx(0.794444, abs=1e-6)
    assert state["report"].num_queries == 3


def test_preloaded_state_is_reused(workflow, toy_paths, monkeypatch):
    loaded = workflow.load(toy_paths["corpus"], toy_paths["associations"], toy_paths["queries"])
    first = workflow.run(RunConfig(), preloaded=loaded)

    def fail(*args, **kwargs):
        raise AssertionError("inputs were read again")

    monkeypatch.setattr("orchestration.coordinator.read_corpus_file", fail)
    monkeypatch.setattr("orchestration.coordinator.build_object_index", fail)
    again = workflow.run(RunConfig(), preloaded={**loaded, "object_indexes": first["object_indexes"]})
    assert again["run"]["q1"] == first["run"]["q1"]


def test_stopwords_and_empty_query(toy_paths, tmp_path):
    queries = tmp_path / "queries.tsv"
    queries.write_text("q1\tthe\nq2\ta\n", encoding="utf-8")
    workflow = RetrievalWorkflow(stopwords=frozenset({"the"}))
    state = workflow.run(RunConfig(), toy_paths["corpus"], toy_paths["associations"], str(queries))
    assert state["skipped"] == {"q1": "empty query"}
    assert list(state["run"]) == ["q2"]


def test_rank_queries_keeps_query_order(workflow):
    def rank_fn(terms, cutoff):
        return RankedList.from_scores({t: 1.0 for t in terms}, cutoff)

    queries = [(f"q{i}", f"x{i}") for i in range(10, 0, -1)]
    run, skipped = workflow.rank_queries(rank_fn, queries, 5)
    assert list(run) == [qid for qid, _ in queries]
    assert skipped == {}


def test_deterministic(toy_paths):
    outputs = []
    for concurrency in (1, 8):
        workflow = RetrievalWorkflow(max_concurrency=concurrency)
        state = workflow.run(
            RunConfig(), toy_paths["corpus"], toy_paths["associations"], toy_paths["queries"]
        )
        outputs.append({qid: ranked.entries for qid, ranked in state["run"].items()})
    assert outputs[0] == outputs[1]


class TestRunConfig:
    def test_defaults(self):
        config = create_run_config()
        assert config.params.lambda_ == 0.1
        assert config.params.k1 == 1.2
        assert config.params.b == 0.75
        assert config.top_k_docs == 1000
        assert config.output_depth == 1000
        assert config.label == "early/lm/binary"

    @pytest.mark.parametrize(
        "kwargs",
        [{"lambda_": 2.0}, {"b": -0.1}, {"top_k_docs": 0}, {"run_tag": "two words"}, {"model": "tfidf"}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            create_run_config(**kwargs)

    @pytest.mark.parametrize("raw,expected", [("4", 4), ("", 8), ("many", 8), ("0", 8), ("-3", 8)])
    def test_concurrency_from_environment(self, monkeypatch, raw, expected):
        monkeypatch.setenv("FUSION_MAX_CONCURRENCY", raw)
        assert _env_positive_int("FUSION_MAX_CONCURRENCY", 8) == expected


class TestGrid:
    def test_configuration_order(self):
        labels = [c.label for c in grid_configs()]
        assert labels == [
            "early/lm/binary", "early/lm/uniform", "early/bm25/binary", "early/bm25/uniform",
            "late/lm/binary", "late/lm/uniform", "late/bm25/binary", "late/bm25/uniform",
        ]

    def test_grid_table(self, workflow, toy_paths):
        rows = run_grid(
            workflow, toy_paths["corpus"], toy_paths["associations"],
            toy_paths["queries"], toy_paths["qrels"], Task.EXPERT,
        )
        assert len(rows) == 8
        # q1 ranks o1 first in every configuration
        assert all(row.values["recip_rank"] == pytest.approx(1 / 3) for row in rows)
        table = format_grid_table(rows, Task.EXPERT)
        lines = table.splitlines()
        assert lines[0] == "fusion\tmodel\tassoc\tmap\trecip_rank\tP_10"
        assert lines[1].startswith("early\tlm\tbinary\t0.3333*\t0.3333*\t")
        assert len(lines) == 9

    def test_max_marks_equal_printed_values(self):
        rows = [
            GridRow(config=config, values={"map": v, "recip_rank": 0.5, "P_10": 0.1})
            for config, v in zip(grid_configs(), [0.33334, 0.33331, 0.2, 0.1, 0.0, 0.0, 0.0, 0.0])
        ]
        lines = format_grid_table(rows, Task.EXPERT).splitlines()
        assert lines[1].split("\t")[3] == "0.3333*"
        assert lines[2].split("\t")[3] == "0.3333*"
        assert lines[3].split("\t")[3] == "0.2000"
        assert all(line.split("\t")[4] == "0.5000*" for line in lines[1:])

    def test_vertical_columns(self, workflow, toy_paths):
        rows = run_grid(
            workflow, toy_paths["corpus"], toy_paths["associations"],
            toy_paths["queries"], toy_paths["qrels"], Task.VERTICAL,
        )
        header = format_grid_table(rows, Task.VERTICAL).splitlines()[0]
        assert header.endswith("ndcg_cut_20\tmap\tP_5")

    def test_grid_needs_its_metrics(self, toy_paths):
        workflow = RetrievalWorkflow(metric_config=MetricConfig(precision_cutoffs=(5,)))
        with pytest.raises(ConfigError):
            run_grid(
                workflow, toy_paths["corpus"], toy_paths["associations"],
                toy_paths["queries"], toy_paths["qrels"], Task.EXPERT,
            )

    def test_empty_runs_score_zero(self, workflow, toy_paths, tmp_path):
        queries = tmp_path / "queries.tsv"
        queries.write_text("q1\tzzz\n", encoding="utf-8")
        rows = run_grid(
            workflow, toy_paths["corpus"], toy_paths["associations"],
            str(queries), toy_paths["qrels"],
        )
        assert all(v == 0.0 for row in rows for v in row.values.values())

    def test_disjoint_queries_fail(self, workflow, toy_paths, tmp_path):
        queries = tmp_path / "queries.tsv"
        queries.write_text("q9\ta\n", encoding="utf-8")
        with pytest.raises(DisjointQueriesError):
            run_grid(
                workflow, toy_paths["corpus"], toy_paths["associations"],
                str(queries), toy_paths["qrels"],
            )


def test_topk_sweep(workflow, toy_paths):
    results = run_topk_sweep(
        workflow, toy_paths["corpus"], toy_paths["associations"],
        toy_paths["queries"], toy_paths["qrels"], [100, 1, 100],
    )
    assert [k for k, _ in results] == [1, 100]
    table = format_sweep_table(results, workflow.metric_config.metric_names)
    lines = table.splitlines()
    assert lines[0] == "topk\tmap\trecip_rank\tP_5\tP_10\tndcg_cut_20"
    assert lines[1].startswith("1\t")
