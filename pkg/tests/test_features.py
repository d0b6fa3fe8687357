"""Feature engineering: n-grams, clusters, vocabulary, scaling, info gain."""

import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rareclass.corpus import Label
from rareclass.errors import DataError
from rareclass.features import (
    ClusterMap,
    SparseVector,
    apply_scaler,
    build_vocabulary,
    cluster_features,
    extract_ngrams,
    fit_scaler,
    information_gain,
    interpolate,
    load_clusters,
    structural_features,
    vectorize,
)


class TestSparseVector:
    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            SparseVector((1, 1), (1.0, 2.0), 5)
        with pytest.raises(ValueError):
            SparseVector((3, 1), (1.0, 2.0), 5)
        with pytest.raises(ValueError):
            SparseVector((0,), (float("nan"),), 5)
        with pytest.raises(ValueError):
            SparseVector((7,), (1.0,), 5)

    def test_from_pairs_sorts_and_drops_zeros(self):
        vec = SparseVector.from_pairs([(4, 0.0), (2, 1.5), (0, -1.0)], 5)
        assert vec.indices == (0, 2) and vec.values == (-1.0, 1.5)

    def test_dot_and_norms(self):
        a = SparseVector.from_pairs([(0, 1.0), (2, 2.0)], 4)
        b = SparseVector.from_pairs([(2, 3.0), (3, 1.0)], 4)
        assert a.dot(b) == 6.0
        assert a.squared_norm() == 5.0
        assert a.squared_distance(b) == pytest.approx(
            (1 - 0) ** 2 + (2 - 3) ** 2 + (0 - 1) ** 2
        )

    def test_interpolation_midpoint(self):
        a = SparseVector.from_pairs([], 2)
        b = SparseVector.from_pairs([(0, 2.0), (1, 2.0)], 2)
        mid = interpolate(a, b, 0.5)
        assert mid.to_dict() == {0: 1.0, 1: 1.0}

    def test_interpolation_endpoints(self):
        a = SparseVector.from_pairs([(0, 3.0)], 2)
        b = SparseVector.from_pairs([(1, 4.0)], 2)
        assert interpolate(a, b, 0.0).to_dict() == a.to_dict()
        assert interpolate(a, b, 1.0).to_dict() == b.to_dict()


class TestNgrams:
    def test_up_to_trigrams(self):
        grams = extract_ngrams(["my", "baby"], 1, 3)
        assert grams == Counter({"my": 1, "baby": 1, "my baby": 1})

    def test_short_document(self):
        assert extract_ngrams(["a"], 1, 3) == Counter({"a": 1})

    def test_window_count(self):
        grams = extract_ngrams(["a", "b", "c"], 1, 3)
        assert sum(grams.values()) == 6

    def test_empty_document(self):
        assert extract_ngrams([], 1, 3) == Counter()

    def test_bad_range(self):
        with pytest.raises(ValueError):
            extract_ngrams(["a"], 0, 2)
        with pytest.raises(ValueError):
            extract_ngrams(["a"], 3, 2)

    @given(
        tokens=st.lists(st.sampled_from("abcd"), max_size=12),
        n_max=st.integers(min_value=1, max_value=4),
    )
    @settings(max_examples=60, deadline=None)
    def test_total_count_formula(self, tokens, n_max):
        grams = extract_ngrams(tokens, 1, n_max)
        expected = sum(max(0, len(tokens) - n + 1) for n in range(1, n_max + 1))
        assert sum(grams.values()) == expected


class TestClusters:
    def test_load_basic(self, tmp_path):
        path = tmp_path / "clusters.tsv"
        path.write_text("0101\tbby\t384\n", encoding="utf-8")
        cmap = load_clusters(path)
        assert cmap.get("bby") == "0101"

    def test_empty_file_is_valid(self, tmp_path):
        path = tmp_path / "clusters.tsv"
        path.write_text("", encoding="utf-8")
        assert len(load_clusters(path)) == 0

    def test_duplicate_token_overwrites_with_warning(self, tmp_path, caplog):
        path = tmp_path / "clusters.tsv"
        path.write_text("0101\tbby\t1\n1111\tbby\t2\n", encoding="utf-8")
        with caplog.at_level("WARNING"):
            cmap = load_clusters(path)
        assert len(cmap) == 1 and cmap.get("bby") == "1111"
        assert any("redefined" in rec.message for rec in caplog.records)

    def test_malformed_line_names_line_number(self, tmp_path):
        path = tmp_path / "clusters.tsv"
        path.write_text("0101\tbby\t5\n0101 only-two\n", encoding="utf-8")
        with pytest.raises(DataError, match="line 2"):
            load_clusters(path)

    def test_non_binary_path_rejected(self, tmp_path):
        path = tmp_path / "clusters.tsv"
        path.write_text("01a1\tbby\t5\n", encoding="utf-8")
        with pytest.raises(DataError, match="cluster path"):
            load_clusters(path)

    def test_cluster_features(self):
        cmap = ClusterMap({"bby": "0101", "babby": "0101"})
        assert cluster_features(["bby"], cmap) == Counter({"cluster:0101": 1})
        assert cluster_features(["zzz"], cmap) == Counter()
        assert cluster_features(["bby", "babby"], cmap) == Counter({"cluster:0101": 2})

    def test_shared_cluster_property(self):
        cmap = ClusterMap({"a": "11", "b": "11"})
        assert cluster_features(["a"], cmap) == cluster_features(["b"], cmap)


class TestStructural:
    @pytest.mark.parametrize(
        "text,expected",
        [("ab cd", (5, 2)), ("", (0, 0)), ("a  b", (4, 2)), ("\U0001f60a hi", (4, 2))],
    )
    def test_lengths(self, text, expected):
        assert structural_features(text) == expected


class TestVocabulary:
    def test_min_df_cutoff(self):
        docs = [Counter({"my baby": 1}), Counter({"my baby": 2}), Counter({"rare": 1})]
        vocab = build_vocabulary(docs, min_df=2)
        assert "my baby" in vocab and "rare" not in vocab

    def test_multiset_counts_do_not_inflate_df(self):
        docs = [Counter({"x": 5})]
        vocab = build_vocabulary(docs, min_df=2)
        assert "x" not in vocab

    def test_lexicographic_indices_and_determinism(self):
        docs = [Counter({"b": 1, "a": 1, "cluster:01": 1})] * 2
        v1 = build_vocabulary(docs, min_df=1, include_structural=True)
        v2 = build_vocabulary(list(docs), min_df=1, include_structural=True)
        assert v1.names == v2.names == tuple(sorted(v1.names))
        assert v1.kinds[v1.index_of("cluster:01")] == "cluster"
        assert v1.kinds[v1.index_of("struct:char_length")] == "structural"
        assert v1.kinds[v1.index_of("a")] == "ngram"


class TestVectorize:
    def test_binary_presence(self):
        vocab = build_vocabulary([Counter({"my baby": 1})], min_df=1)
        vec = vectorize(Counter({"my baby": 3}), None, vocab, binary=True)
        assert vec.to_dict() == {vocab.index_of("my baby"): 1.0}

    def test_count_mode(self):
        vocab = build_vocabulary([Counter({"my baby": 1})], min_df=1)
        vec = vectorize(Counter({"my baby": 3}), None, vocab, binary=False)
        assert vec.to_dict() == {vocab.index_of("my baby"): 3.0}

    def test_oov_features_ignored(self):
        vocab = build_vocabulary([Counter({"kept": 1})], min_df=1, include_structural=True)
        vec = vectorize(Counter({"unseen": 4}), (12, 3), vocab)
        assert vec.to_dict() == {
            vocab.index_of("struct:char_length"): 12.0,
            vocab.index_of("struct:word_length"): 3.0,
        }

    def test_structural_only_vector(self):
        vocab = build_vocabulary([], min_df=1, include_structural=True)
        vec = vectorize(Counter(), (7, 2), vocab)
        assert len(vec.indices) == 2

    def test_deterministic(self):
        vocab = build_vocabulary([Counter({"a": 1, "b": 1})], min_df=1)
        doc = Counter({"a": 2, "b": 1})
        assert vectorize(doc, None, vocab) == vectorize(doc, None, vocab)


class TestScaler:
    def test_endpoint_mapping(self):
        vecs = [SparseVector.from_pairs([(0, 2.0)], 1), SparseVector.from_pairs([(0, 4.0)], 1)]
        scaler = fit_scaler(vecs)
        assert apply_scaler(scaler, vecs[0]).to_dict() == {}  # scaled 0 is dropped
        assert apply_scaler(scaler, vecs[1]).to_dict() == {0: 1.0}

    def test_midpoint_and_no_clamping(self):
        vecs = [SparseVector.from_pairs([(0, 2.0)], 1), SparseVector.from_pairs([(0, 4.0)], 1)]
        scaler = fit_scaler(vecs)
        mid = apply_scaler(scaler, SparseVector.from_pairs([(0, 3.0)], 1))
        assert mid.to_dict() == {0: 0.5}
        outside = apply_scaler(scaler, SparseVector.from_pairs([(0, 6.0)], 1))
        assert outside.to_dict() == {0: 2.0}

    def test_constant_column_maps_to_zero(self):
        vecs = [SparseVector.from_pairs([(0, 5.0)], 1)] * 3
        scaler = fit_scaler(vecs)
        assert apply_scaler(scaler, SparseVector.from_pairs([(0, 9.0)], 1)).to_dict() == {}

    def test_implicit_zero_extends_range(self):
        vecs = [
            SparseVector.from_pairs([(0, 4.0)], 1),
            SparseVector.from_pairs([], 1),
        ]
        scaler = fit_scaler(vecs)
        assert scaler.mins == (0.0,) and scaler.maxs == (4.0,)
        assert apply_scaler(scaler, vecs[0]).to_dict() == {0: 1.0}

    def test_binary_and_structural_ranges(self):
        # binary columns stay in {0, 1}; structural training values land in [0, 1]
        vecs = [
            SparseVector.from_pairs([(0, 1.0), (1, 10.0)], 2),
            SparseVector.from_pairs([(1, 30.0)], 2),
        ]
        scaler = fit_scaler(vecs)
        for vec in vecs:
            scaled = apply_scaler(scaler, vec).to_dict()
            assert scaled.get(0, 0.0) in (0.0, 1.0)
            assert 0.0 <= scaled.get(1, 0.0) <= 1.0


class TestInformationGain:
    def _vocab(self, names):
        return build_vocabulary([Counter(dict.fromkeys(names, 1))] * 2, min_df=1)

    def test_perfect_predictor_is_one_bit(self):
        vocab = self._vocab(["f"])
        vectors = [
            SparseVector.from_pairs([(0, 1.0)], 1),
            SparseVector.from_pairs([(0, 1.0)], 1),
            SparseVector.from_pairs([], 1),
            SparseVector.from_pairs([], 1),
        ]
        labels = [Label.DEFECT, Label.DEFECT, Label.NON_DEFECT, Label.NON_DEFECT]
        ranked = information_gain(vectors, labels, vocab)
        assert ranked == [("f", pytest.approx(1.0))]

    def test_constant_feature_is_zero(self):
        vocab = self._vocab(["f"])
        vectors = [SparseVector.from_pairs([(0, 1.0)], 1)] * 4
        labels = [Label.DEFECT, Label.DEFECT, Label.NON_DEFECT, Label.NON_DEFECT]
        assert information_gain(vectors, labels, vocab)[0][1] == 0.0

    def test_pure_split_on_four_docs(self):
        vocab = self._vocab(["f", "g"])
        fi, gi = vocab.index_of("f"), vocab.index_of("g")
        vectors = [
            SparseVector.from_pairs([(fi, 1.0)], 2),
            SparseVector.from_pairs([(fi, 1.0), (gi, 1.0)], 2),
            SparseVector.from_pairs([], 2),
            SparseVector.from_pairs([(gi, 1.0)], 2),
        ]
        labels = [Label.DEFECT, Label.DEFECT, Label.NON_DEFECT, Label.NON_DEFECT]
        ranked = dict(information_gain(vectors, labels, vocab))
        assert ranked["f"] == pytest.approx(1.0)
        # g is present in one doc of each class: knowing it gains nothing
        assert ranked["g"] == pytest.approx(0.0, abs=1e-12)

    def test_sorted_descending_with_name_tiebreak(self):
        vocab = self._vocab(["b", "a"])
        vectors = [SparseVector.from_pairs([], 2)] * 3
        labels = [Label.DEFECT, Label.NON_DEFECT, Label.NON_DEFECT]
        ranked = information_gain(vectors, labels, vocab)
        assert [name for name, _ in ranked] == ["a", "b"]

    def test_bounded_by_label_entropy_and_relabel_invariant(self):
        vocab = self._vocab(["f"])
        vectors = [
            SparseVector.from_pairs([(0, 1.0)], 1),
            SparseVector.from_pairs([], 1),
            SparseVector.from_pairs([(0, 1.0)], 1),
        ]
        labels = [Label.DEFECT, Label.NON_DEFECT, Label.NON_DEFECT]
        swapped = [Label.NON_DEFECT, Label.DEFECT, Label.DEFECT]
        h_y = -(1 / 3) * math.log2(1 / 3) - (2 / 3) * math.log2(2 / 3)
        ig = information_gain(vectors, labels, vocab)[0][1]
        ig_swapped = information_gain(vectors, swapped, vocab)[0][1]
        assert 0.0 <= ig <= h_y + 1e-12
        assert ig == pytest.approx(ig_swapped)
