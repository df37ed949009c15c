import math

import pytest

from indexing.associations import AssociationMode, load_associations
from indexing.text_corpus import ingest_corpus
from rankers.early_fusion import (
    EarlyFusionRanker,
    ObjectIndex,
    build_object_index,
    rank_objects_early,
    score_object_early,
)
from scoring.term_scoring import ModelParams, RetrievalModel
from utils.errors import EmptyObjectIndexError, EmptyQueryError

LM = RetrievalModel.LM
BM25 = RetrievalModel.BM25
DEFAULTS = ModelParams()


@pytest.fixture
def binary_index(toy_index, toy_table):
    return build_object_index(toy_index, toy_table, AssociationMode.BINARY)


@pytest.fixture
def uniform_index(toy_index, toy_table):
    return build_object_index(toy_index, toy_table, AssociationMode.UNIFORM)


class TestBuild:
    def test_binary_pseudo_documents(self, binary_index):
        o1 = binary_index.objects["o1"]
        assert o1.pseudo_freqs == {"a": 2.0, "b": 2.0, "c": 1.0}
        assert o1.length == 5.0
        assert binary_index.objects["o2"].length == 4.0
        assert binary_index.avg_object_length == 4.5
        assert binary_index.object_doc_freq == {"a": 2, "b": 1, "c": 2}

    def test_uniform_pseudo_documents(self, uniform_index):
        o1 = uniform_index.objects["o1"]
        assert o1.pseudo_freqs == {"a": 1.0, "b": 1.0, "c": 0.5}
        assert o1.length == 2.5

    def test_uniform_is_binary_scaled(self, toy_table, binary_index, uniform_index):
        for oid, obj in binary_index.objects.items():
            n = toy_table.len_of(oid)
            scaled = uniform_index.objects[oid]
            for term, freq in obj.pseudo_freqs.items():
                assert scaled.pseudo_freqs[term] == pytest.approx(freq / n, abs=1e-12)

    def test_length_is_sum_of_frequencies(self, binary_index):
        for obj in binary_index.objects.values():
            assert obj.length == pytest.approx(math.fsum(obj.pseudo_freqs.values()), abs=1e-12)

    def test_empty_object_excluded(self):
        index = ingest_corpus([("d1", "a b"), ("d2", "")])
        table = load_associations([("d1", "o1"), ("d2", "o2")], index)
        obj_index = build_object_index(index, table, AssociationMode.BINARY)
        assert list(obj_index.objects) == ["o1"]
        assert obj_index.excluded == ("o2",)
        assert obj_index.avg_object_length == 2.0

    def test_no_scorable_objects(self):
        index = ingest_corpus([("d1", "a"), ("d2", "")])
        table = load_associations([("d2", "o1")], index)
        with pytest.raises(EmptyObjectIndexError):
            build_object_index(index, table, AssociationMode.BINARY)

    def test_explicit_zero_weight_contributes_nothing(self, toy_index):
        table = load_associations([("d1", "o1", 0.0), ("d2", "o1", 2.0)], toy_index)
        obj_index = build_object_index(toy_index, table, AssociationMode.EXPLICIT)
        assert obj_index.objects["o1"].pseudo_freqs == {"b": 2.0, "c": 2.0}

    def test_input_order_does_not_matter(self, toy_index):
        forward = load_associations([("d1", "o1"), ("d2", "o1"), ("d3", "o2")], toy_index)
        backward = load_associations([("d3", "o2"), ("d2", "o1"), ("d1", "o1")], toy_index)
        a = build_object_index(toy_index, forward, AssociationMode.UNIFORM)
        b = build_object_index(toy_index, backward, AssociationMode.UNIFORM)
        assert a.objects == b.objects


class TestScoring:
    def test_lm_scores(self, binary_index):
        assert score_object_early(binary_index, "o1", ["a", "b"], LM, DEFAULTS) == pytest.approx(
            -1.894851, abs=1e-6
        )
        assert score_object_early(binary_index, "o2", ["a", "b"], LM, DEFAULTS) == pytest.approx(
            -5.160167, abs=1e-6
        )

    def test_bm25_scores(self, binary_index):
        assert score_object_early(binary_index, "o1", ["b"], BM25, DEFAULTS) == pytest.approx(
            0.924196, abs=1e-6
        )
        assert score_object_early(binary_index, "o2", ["b"], BM25, DEFAULTS) == 0.0

    @pytest.mark.parametrize("model", [LM, BM25])
    def test_repeated_query_terms(self, binary_index, model):
        a = score_object_early(binary_index, "o1", ["a"], model, DEFAULTS)
        b = score_object_early(binary_index, "o1", ["b"], model, DEFAULTS)
        aab = score_object_early(binary_index, "o1", ["a", "a", "b"], model, DEFAULTS)
        assert aab == pytest.approx(2 * a + b, abs=1e-12)

    def test_unseen_terms_skipped(self, binary_index):
        with_unseen = score_object_early(binary_index, "o1", ["a", "zzz"], LM, DEFAULTS)
        assert with_unseen == score_object_early(binary_index, "o1", ["a"], LM, DEFAULTS)

    def test_lm_invariant_to_uniform_weights(self, binary_index, uniform_index):
        for query in (["a"], ["a", "b"], ["c", "c", "b"]):
            for oid in binary_index.objects:
                assert score_object_early(uniform_index, oid, query, LM, DEFAULTS) == pytest.approx(
                    score_object_early(binary_index, oid, query, LM, DEFAULTS), abs=1e-12
                )


class TestRanking:
    def test_lm_ranking(self, binary_index):
        ranked = rank_objects_early(binary_index, ["a", "b"], LM, DEFAULTS)
        assert ranked.ids == ["o1", "o2"]

    def test_bm25_only_candidates(self, binary_index):
        assert rank_objects_early(binary_index, ["b"], BM25, DEFAULTS).ids == ["o1"]

    def test_no_candidates(self, binary_index):
        assert len(rank_objects_early(binary_index, ["zzz"], LM, DEFAULTS)) == 0

    def test_empty_query(self, binary_index):
        with pytest.raises(EmptyQueryError):
            rank_objects_early(binary_index, [], LM, DEFAULTS)

    def test_cutoff(self, binary_index):
        assert rank_objects_early(binary_index, ["a"], LM, DEFAULTS, cutoff=1).ids == ["o1"]

    def test_ties_broken_by_id(self):
        index = ingest_corpus([("d1", "x y"), ("d2", "x y")])
        table = load_associations([("d2", "ob"), ("d1", "oa")], index)
        ranker = EarlyFusionRanker.build(index, table, AssociationMode.BINARY)
        ranked = ranker.rank(["x"])
        assert ranked.ids == ["oa", "ob"]
        assert ranked.entries[0][1] == ranked.entries[1][1]

    def test_zero_lambda_drops_objects_missing_a_term(self, binary_index):
        params = ModelParams(lambda_=0.0)
        assert rank_objects_early(binary_index, ["a", "b"], LM, params).ids == ["o1"]

    def test_bijection_matches_document_ranking(self, toy_index):
        table = load_associations([("d1", "o1"), ("d2", "o2"), ("d3", "o3")], toy_index)
        obj_index = build_object_index(toy_index, table, AssociationMode.BINARY)
        assert isinstance(obj_index, ObjectIndex)
        # d2 "b c": 0.9 * 1/2 + 0.1 * 2/9
        assert score_object_early(obj_index, "o2", ["b"], LM, DEFAULTS) == pytest.approx(
            math.log(0.45 + 0.1 * 2 / 9), abs=1e-12
        )
        # document-level IDF ln(3/2) and avg length 3 for d1 "a a b"
        assert score_object_early(obj_index, "o1", ["b"], BM25, DEFAULTS) == pytest.approx(
            math.log(1.5), abs=1e-12
        )
