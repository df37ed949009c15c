import pytest
from pydantic import ValidationError

from evaluation.metrics import (
    GainFunction,
    MetricConfig,
    average_precision,
    evaluate_run,
    ndcg_at_k,
    precision_at_k,
    reciprocal_rank,
)
from evaluation.trec_io import (
    format_report,
    parse_qrels,
    parse_queries,
    parse_run,
    read_qrels,
    read_run,
)
from utils.errors import DisjointQueriesError, EmptyRunError, MalformedRecordError, NoRelevantError

RANKING = ["o1", "o2", "o3"]


class TestMetrics:
    def test_precision(self):
        assert precision_at_k(RANKING, {"o1", "o3"}, 2) == 0.5
        assert precision_at_k(RANKING, {"o1", "o2"}, 2) == 1.0
        assert precision_at_k([], {"o1"}, 10) == 0.0

    def test_precision_divides_by_k(self):
        assert precision_at_k(["o1"], {"o1"}, 10) == 0.1

    def test_reciprocal_rank(self):
        assert reciprocal_rank(RANKING, {"o1"}) == 1.0
        assert reciprocal_rank(["o2", "o1"], {"o1"}) == 0.5
        assert reciprocal_rank(RANKING, {"o9"}) == 0.0

    def test_average_precision(self):
        assert average_precision(RANKING, {"o1", "o3"}) == pytest.approx(0.833333, abs=1e-6)
        assert average_precision(["o1", "o3", "o2"], {"o1", "o3"}) == 1.0
        assert average_precision(["o2", "o1"], {"o1"}) == 0.5

    def test_average_precision_counts_unretrieved(self):
        assert average_precision(["o1"], {"o1", "o9"}) == 0.5

    def test_average_precision_without_relevant(self):
        with pytest.raises(NoRelevantError):
            average_precision(RANKING, set())

    def test_ndcg(self):
        grades = {"o1": 2, "o3": 1}
        assert ndcg_at_k(RANKING, grades, 3) == pytest.approx(0.963941, abs=1e-6)
        assert ndcg_at_k(["o1", "o3"], grades, 3) == pytest.approx(1.0)
        assert ndcg_at_k(["o2", "o1"], grades, 1) == 0.0

    def test_ndcg_linear_gain(self):
        grades = {"o1": 2, "o3": 1}
        # (2 + 1/2) / (2 + 1/log2(3))
        expected = 2.5 / (2 + 0.6309297535714575)
        assert ndcg_at_k(RANKING, grades, 3, GainFunction.LINEAR) == pytest.approx(expected)

    def test_ndcg_without_relevant(self):
        with pytest.raises(NoRelevantError):
            ndcg_at_k(RANKING, {"o1": 0}, 5)


class TestMetricConfig:
    def test_names_follow_trec_eval(self):
        assert MetricConfig().metric_names == ["map", "recip_rank", "P_5", "P_10", "ndcg_cut_20"]

    def test_cutoffs_sorted_and_deduplicated(self):
        config = MetricConfig(precision_cutoffs=(10, 5, 10))
        assert config.precision_cutoffs == (5, 10)

    def test_rejects_zero_cutoff(self):
        with pytest.raises(ValidationError):
            MetricConfig(ndcg_cutoffs=(0,))


class TestEvaluateRun:
    def test_single_query(self):
        report = evaluate_run({"q1": RANKING}, {"q1": {"o1": 1, "o3": 1}})
        assert report.num_queries == 1
        assert report.means == report.per_query["q1"]
        assert report.means["map"] == pytest.approx(0.833333, abs=1e-6)

    def test_mean_over_queries(self):
        run = {"q1": ["o1"], "q2": ["o2", "o1"]}
        qrels = {"q1": {"o1": 1}, "q2": {"o1": 1}}
        assert evaluate_run(run, qrels).means["map"] == 0.75

    def test_missing_judged_query_scores_zero(self):
        run = {"q1": ["o1"]}
        qrels = {"q1": {"o1": 1}, "q2": {"o1": 1}}
        report = evaluate_run(run, qrels)
        assert report.means["map"] == 0.5
        assert report.per_query["q2"]["recip_rank"] == 0.0

    def test_queries_without_relevant_excluded(self):
        run = {"q1": ["o1"], "q2": ["o1"]}
        qrels = {"q1": {"o1": 1}, "q2": {"o1": 0}}
        report = evaluate_run(run, qrels)
        assert report.num_queries == 1
        assert report.excluded == ["q2"]
        assert report.means["map"] == 1.0

    def test_unjudged_run_queries_ignored(self):
        report = evaluate_run({"q1": ["o1"], "qx": ["o1"]}, {"q1": {"o1": 1}})
        assert report.num_ignored == 1
        assert "qx" not in report.per_query

    def test_disjoint(self):
        with pytest.raises(DisjointQueriesError):
            evaluate_run({"q1": ["o1"]}, {"q2": {"o1": 1}})

    def test_nothing_evaluable(self):
        with pytest.raises(NoRelevantError):
            evaluate_run({"q1": ["o1"]}, {"q1": {"o1": 0}})


class TestTrecFiles:
    def test_parse_qrels(self):
        qrels = parse_qrels(["q1 0 o1 2\n", "q1 0 o2 0\n", "q2\t0\to1\t1\n"])
        assert qrels == {"q1": {"o1": 2, "o2": 0}, "q2": {"o1": 1}}

    def test_malformed_qrels_names_line(self):
        lines = ["q1 0 o1 1\n", "q1 0 o2 0\n", "q1 0 o3\n"]
        with pytest.raises(MalformedRecordError, match="qrels.txt:3"):
            parse_qrels(lines, "qrels.txt")

    def test_negative_grade(self):
        with pytest.raises(MalformedRecordError):
            parse_qrels(["q1 0 o1 -1\n"])

    def test_parse_run_orders_by_rank(self):
        lines = ["q1 Q0 o2 2 0.5 t\n", "q1 Q0 o1 1 0.9 t\n", "q2 Q0 o3 1 0.1 t\n"]
        assert parse_run(lines) == {"q1": ["o1", "o2"], "q2": ["o3"]}

    def test_empty_run(self):
        with pytest.raises(EmptyRunError, match="no queries in run"):
            parse_run([])

    def test_bad_run_line(self):
        with pytest.raises(MalformedRecordError, match="line 1"):
            parse_run(["q1 Q0 o1 first 0.5 t\n"])

    def test_repeated_object_keeps_best_rank(self, caplog):
        lines = ["q1 Q0 o1 2 1.0 t\n", "q1 Q0 o2 3 0.5 t\n", "q1 Q0 o1 1 2.0 t\n"]
        with caplog.at_level("WARNING"):
            run = parse_run(lines, "dup.run")
        assert run == {"q1": ["o1", "o2"]}
        assert "dup.run:1: object o1 repeated" in caplog.text

    def test_repeated_object_cannot_inflate_metrics(self):
        run = parse_run(["q1 Q0 o1 1 2.0 t\n", "q1 Q0 o1 2 1.0 t\n"])
        report = evaluate_run(run, {"q1": {"o1": 1}})
        assert report.means["map"] == 1.0
        assert report.means["recip_rank"] == 1.0
        assert report.means["P_5"] == pytest.approx(0.2)
        assert report.means["ndcg_cut_20"] == pytest.approx(1.0)

    def test_invalid_utf8_run(self, tmp_path):
        path = tmp_path / "bad.run"
        path.write_bytes(b"q1 Q0 o1 1 1.0 t\nq1 Q0 \xe9t\xe9 2 0.5 t\n")
        with pytest.raises(MalformedRecordError, match=r"bad.run:2: invalid UTF-8"):
            read_run(path)

    def test_parse_queries_keeps_file_order(self):
        assert parse_queries(["q2\tb\n", "q1\ta b\n"]) == [("q2", "b"), ("q1", "a b")]

    def test_duplicate_query(self):
        with pytest.raises(MalformedRecordError, match="duplicate"):
            parse_queries(["q1\ta\n", "q1\tb\n"])

    def test_format_report(self):
        report = evaluate_run({"q1": RANKING}, {"q1": {"o1": 1, "o3": 1}})
        text = format_report(report)
        assert "map\tq1\t0.8333\n" in text
        assert text.endswith("ndcg_cut_20\tall\t" + f"{report.means['ndcg_cut_20']:.4f}\n")

    def test_toy_qrels(self, toy_paths):
        qrels = read_qrels(toy_paths["qrels"])
        assert set(qrels) == {"q1", "q2", "q3"}
        assert qrels["q1"] == {"o1": 2, "o2": 0}
