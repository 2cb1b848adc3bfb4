import numpy as np
import pytest

from lexalign.dictionaries import BilingualDictionary
from lexalign.embeddings import EmbeddingSpace
from lexalign.errors import NoEvaluableQueriesError, ParseError, ValidationError
from lexalign.mapping import TranslationMatrix
from lexalign.retrieval import (
    Prediction,
    RetrievalConfig,
    breakdown_report,
    csls_score,
    evaluate_p1,
    frequency_bin,
    load_word_class_map,
    mean_nn_similarity,
    translate,
)
from lexalign.synthetic import SynthSpec, make_pair


def unit_space(rows, words=None):
    rows = np.asarray(rows, dtype=np.float64)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    words = words or [f"w{i}" for i in range(len(rows))]
    return EmbeddingSpace(words=words, vectors=rows, normalized=True)


def brute_force_csls_argmax(src_vecs, tgt_vecs, query_index, k):
    """Direct per-definition evaluation: mean-top-k terms via full sort."""
    n_s, n_t = len(src_vecs), len(tgt_vecs)
    best_j, best_score = None, -np.inf
    for j in range(n_t):
        cos_xy = float(src_vecs[query_index] @ tgt_vecs[j])
        cos_x_all = sorted((float(src_vecs[query_index] @ tgt_vecs[t]) for t in range(n_t)), reverse=True)
        mnn_x = sum(cos_x_all[:k]) / k
        cos_y_all = sorted((float(tgt_vecs[j] @ src_vecs[s]) for s in range(n_s)), reverse=True)
        mnn_y = sum(cos_y_all[:k]) / k
        score = 2 * cos_xy - mnn_x - mnn_y
        if score > best_score:
            best_j, best_score = j, score
    return best_j, best_score


class TestCslsScore:
    def test_perfect_match_with_dense_neighborhoods(self):
        assert csls_score(1.0, 1.0, 1.0) == pytest.approx(0.0)

    def test_hand_arithmetic(self):
        assert csls_score(0.8, 0.7, 0.5) == pytest.approx(0.4)

    def test_identical_vectors_empty_neighborhoods(self):
        assert csls_score(1.0, 0.0, 0.0) == pytest.approx(2.0)


class TestMeanNNSimilarity:
    def test_exact_member_k1(self):
        space = unit_space(np.eye(3))
        assert mean_nn_similarity(space.vectors[1], space, k=1) == pytest.approx(1.0)

    def test_top2_mean(self):
        space = unit_space([[1, 0], [0, 1], [-1, 0]])
        x = np.array([0.6, 0.8])
        cosines = sorted(space.vectors @ x, reverse=True)
        expected = (cosines[0] + cosines[1]) / 2
        assert mean_nn_similarity(x, space, k=2) == pytest.approx(expected)

    def test_k_at_vocab_size_rejected(self):
        space = unit_space(np.eye(3))
        with pytest.raises(ValidationError, match="k=3"):
            mean_nn_similarity(space.vectors[0], space, k=3)


class TestTranslate:
    def test_self_retrieval_identity(self):
        rng = np.random.default_rng(0)
        space = unit_space(rng.standard_normal((20, 6)))
        result = translate(
            space.words, space, space, TranslationMatrix.identity(6),
            RetrievalConfig(method="cosine"),
        )
        assert all(p.target == p.query for p in result.predictions)

    def test_true_rotation_recovers_gold(self):
        pair = make_pair(SynthSpec(n=50, d=8, noise_sigma=0.0, seed=4))
        result = translate(
            pair.gold.sources(), pair.source, pair.target, pair.true_map,
            RetrievalConfig(method="cosine"),
        )
        gold_map = pair.gold.by_source()
        assert all(p.target in gold_map[p.query] for p in result.predictions)

    def test_csls_matches_brute_force_oracle(self):
        rng = np.random.default_rng(17)
        mismatches = 0
        for case in range(200):
            n_s = int(rng.integers(4, 11))
            n_t = int(rng.integers(4, 11))
            d = int(rng.integers(2, 6))
            k = int(rng.integers(1, min(4, n_t, n_s)))
            src = unit_space(rng.standard_normal((n_s, d)))
            tgt = unit_space(rng.standard_normal((n_t, d)), [f"t{i}" for i in range(n_t)])
            cfg = RetrievalConfig(method="csls", csls_k=k)
            result = translate([src.words[0]], src, tgt, TranslationMatrix.identity(d), cfg)
            expected_j, expected_score = brute_force_csls_argmax(
                src.vectors, tgt.vectors, 0, k
            )
            pred = result.predictions[0]
            if pred.target != tgt.words[expected_j]:
                mismatches += 1
            assert pred.score == pytest.approx(expected_score, abs=1e-9)
        assert mismatches == 0

    def test_oov_skipped_and_counted(self):
        space = unit_space(np.eye(3), ["a", "b", "c"])
        cfg = RetrievalConfig(method="csls", csls_k=2)
        result = translate(["a", "zzz"], space, space, TranslationMatrix.identity(3), cfg)
        assert result.skipped_oov == ["zzz"]
        assert len(result.predictions) == 1

    def test_all_oov_rejected(self):
        space = unit_space(np.eye(3))
        with pytest.raises(NoEvaluableQueriesError):
            translate(["x", "y"], space, space, TranslationMatrix.identity(3))

    def test_csls_k_must_fit_vocab(self):
        space = unit_space(np.eye(3), ["a", "b", "c"])
        with pytest.raises(ValidationError, match="csls_k"):
            translate(["a"], space, space, TranslationMatrix.identity(3))

    def test_candidate_cap_limits_targets(self):
        space = unit_space(np.eye(4), ["a", "b", "c", "d"])
        cfg = RetrievalConfig(method="cosine", candidates=2)
        result = translate(["d"], space, space, TranslationMatrix.identity(4), cfg)
        assert result.predictions[0].target in ("a", "b")

    def test_tie_breaks_toward_frequent_target(self):
        # two identical target rows: the earlier (more frequent) one wins
        src = unit_space([[1.0, 0.0]], ["q"])
        tgt = unit_space([[1.0, 0.0], [1.0, 0.0]], ["first", "second"])
        result = translate(["q"], src, tgt, TranslationMatrix.identity(2),
                           RetrievalConfig(method="cosine"))
        assert result.predictions[0].target == "first"


class TestEvaluateP1:
    def test_all_correct(self):
        gold = BilingualDictionary([("a", "x"), ("b", "y")])
        preds = [Prediction("a", "x", 1.0), Prediction("b", "y", 1.0)]
        assert evaluate_p1(preds, gold).p_at_1 == pytest.approx(1.0)

    def test_half_correct(self):
        gold = BilingualDictionary([("a", "x"), ("b", "y")])
        preds = [Prediction("a", "x", 1.0), Prediction("b", "z", 1.0)]
        report = evaluate_p1(preds, gold)
        assert report.p_at_1 == pytest.approx(0.5)
        assert report.evaluated == 2

    def test_multi_reference(self):
        gold = BilingualDictionary([("q", "a"), ("q", "b")])
        assert evaluate_p1([Prediction("q", "b", 0.5)], gold).p_at_1 == pytest.approx(1.0)

    def test_queries_without_gold_excluded(self):
        gold = BilingualDictionary([("a", "x")])
        preds = [Prediction("a", "x", 1.0), Prediction("unknown", "x", 1.0)]
        report = evaluate_p1(preds, gold)
        assert report.evaluated == 1
        assert report.skipped_no_gold == 1

    def test_prediction_order_invariant(self):
        gold = BilingualDictionary([("a", "x"), ("b", "y"), ("c", "z")])
        preds = [
            Prediction("a", "x", 1.0),
            Prediction("b", "wrong", 1.0),
            Prediction("c", "z", 1.0),
        ]
        forward = evaluate_p1(preds, gold)
        backward = evaluate_p1(list(reversed(preds)), gold)
        assert forward.p_at_1 == backward.p_at_1

    def test_no_evaluable_queries(self):
        gold = BilingualDictionary([("a", "x")])
        with pytest.raises(NoEvaluableQueriesError):
            evaluate_p1([Prediction("other", "x", 1.0)], gold)


class TestBreakdown:
    def make_setup(self):
        rng = np.random.default_rng(8)
        words = [f"w{i}" for i in range(150)]
        src = unit_space(rng.standard_normal((150, 4)), words)
        tgt_words = [f"w{i}" if i < 50 else f"v{i}" for i in range(150)]
        tgt = unit_space(rng.standard_normal((150, 4)), tgt_words)
        return src, tgt

    def test_frequency_bins(self):
        assert frequency_bin(50) == "1-100"
        assert frequency_bin(100) == "1-100"
        assert frequency_bin(101) == "101-1000"
        assert frequency_bin(1000) == "101-1000"
        assert frequency_bin(1001) == "1001-10000"
        assert frequency_bin(10001) == "10001+"

    def test_homograph_classes(self):
        src, tgt = self.make_setup()
        gold = BilingualDictionary([
            ("w0", "w0"),       # same spelling, same meaning
            ("w1", "v100"),     # w1 exists in target but is not a translation
            ("w120", "v101"),   # w120 not spelled in target
        ])
        preds = [
            Prediction("w0", "w0", 1.0),
            Prediction("w1", "v100", 1.0),
            Prediction("w120", "v101", 1.0),
        ]
        report = breakdown_report(preds, gold, src, tgt)
        homograph = report.groups["homograph"]
        assert homograph["same-same"].count == 1
        assert homograph["same-diff"].count == 1
        assert homograph["diff-diff"].count == 1
        assert report.p_at_1 == pytest.approx(1.0)

    def test_group_counts_sum_to_evaluated(self):
        src, tgt = self.make_setup()
        gold = BilingualDictionary([(w, w) for w in src.words[:40]])
        preds = [Prediction(w, w if i % 2 else "nope", 1.0) for i, w in enumerate(src.words[:40])]
        report = breakdown_report(preds, gold, src, tgt)
        for family, members in report.groups.items():
            assert sum(g.count for g in members.values()) == report.evaluated, family

    def test_word_class_groups(self):
        src, tgt = self.make_setup()
        gold = BilingualDictionary([("w0", "w0"), ("w1", "w1"), ("w2", "w2")])
        preds = [Prediction(w, w, 1.0) for w in ["w0", "w1", "w2"]]
        classes = {"w0": "NOUN", "w1": "VERB"}
        report = breakdown_report(preds, gold, src, tgt, word_class_map=classes)
        assert report.groups["word_class"]["NOUN"].count == 1
        assert report.groups["word_class"]["other"].count == 1
        assert "homograph_classes" in report.notes


def test_load_word_class_map(tmp_path):
    path = tmp_path / "classes.tsv"
    path.write_text("cat\tNOUN\nrun\tVERB\n", encoding="utf-8")
    assert load_word_class_map(path) == {"cat": "NOUN", "run": "VERB"}
    bad = tmp_path / "bad.tsv"
    bad.write_text("catNOUN\n", encoding="utf-8")
    with pytest.raises(ParseError, match="line 1"):
        load_word_class_map(bad)


def test_uniform_cosines_make_csls_and_cosine_agree():
    # orthogonal rows: every query-candidate cosine is 0, both methods tie
    # across candidates and tie-breaking picks the most frequent target.
    src = unit_space(np.eye(4)[:2], ["q0", "q1"])
    tgt = unit_space(np.eye(4)[2:], ["t0", "t1"])
    for method in ("cosine", "csls"):
        cfg = RetrievalConfig(method=method, csls_k=1)
        result = translate(["q0", "q1"], src, tgt, TranslationMatrix.identity(4), cfg)
        assert [p.target for p in result.predictions] == ["t0", "t0"]
