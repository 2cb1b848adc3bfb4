import numpy as np
import pytest

from lexalign import linalg
from lexalign.dictionaries import BilingualDictionary
from lexalign.embeddings import EmbeddingSpace
from lexalign.errors import EmptySeedError, ValidationError
from lexalign.mapping import (
    AdversarialConfig,
    TranslationMatrix,
    adversarial_init,
    identical_seed,
    load_matrix,
    mutual_nn_dictionary,
    procrustes,
    refine,
    save_matrix,
)
from lexalign.retrieval import RetrievalConfig, translate
from lexalign.synthetic import SynthSpec, make_pair


def unit_space(rows, words=None):
    rows = np.asarray(rows, dtype=np.float64)
    rows = rows / np.linalg.norm(rows, axis=1, keepdims=True)
    words = words or [f"w{i}" for i in range(len(rows))]
    return EmbeddingSpace(words=words, vectors=rows, normalized=True)


def random_orthogonal(d, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


class TestIdenticalSeed:
    def test_intersection_only(self):
        src = unit_space(np.eye(2), ["madrid", "the"])
        tgt = unit_space(np.eye(2), ["madrid", "el"])
        seed = identical_seed(src, tgt)
        assert seed.pairs == [("madrid", "madrid")]
        assert seed.provenance == "identical-seed"

    def test_disjoint_vocabs_rejected(self):
        src = unit_space(np.eye(2), ["a", "b"])
        tgt = unit_space(np.eye(2), ["c", "d"])
        with pytest.raises(EmptySeedError):
            identical_seed(src, tgt)

    def test_identical_vocabs_full_length(self):
        space = unit_space(np.eye(3), ["x", "y", "z"])
        assert len(identical_seed(space, space)) == 3

    def test_ordered_by_source_rank(self):
        src = unit_space(np.eye(3), ["b", "a", "c"])
        tgt = unit_space(np.eye(3), ["a", "b", "c"])
        assert [s for s, _ in identical_seed(src, tgt).pairs] == ["b", "a", "c"]


class TestProcrustes:
    def test_identity_fixed_point(self):
        rng = np.random.default_rng(1)
        space = unit_space(rng.standard_normal((30, 5)))
        seed = BilingualDictionary([(w, w) for w in space.words])
        result = procrustes(space, space, seed)
        assert np.linalg.norm(result.matrix.w - np.eye(5)) < 1e-9

    def test_recovers_known_rotation(self):
        pair = make_pair(SynthSpec(n=50, d=4, noise_sigma=0.0, seed=9))
        result = procrustes(pair.source, pair.target, pair.gold)
        assert np.linalg.norm(result.matrix.w - pair.true_map.w) < 1e-6
        assert result.pairs_used == 50

    def test_single_pair_rank_one(self):
        rng = np.random.default_rng(3)
        src = unit_space(rng.standard_normal((4, 3)))
        tgt = unit_space(rng.standard_normal((4, 3)), [f"t{i}" for i in range(4)])
        seed = BilingualDictionary([(src.words[0], "t2")])
        with pytest.warns(RuntimeWarning, match="rank-deficient"):
            result = procrustes(src, tgt, seed)
        assert result.matrix.orthogonality_residual < 1e-6
        mapped = result.matrix.apply(src.vectors[0])
        assert float(mapped @ tgt.vector("t2")) == pytest.approx(1.0, abs=1e-9)

    def test_oov_pairs_dropped_and_counted(self):
        src = unit_space(np.eye(3), ["a", "b", "c"])
        tgt = unit_space(np.eye(3), ["a", "b", "c"])
        seed = BilingualDictionary([("a", "a"), ("zz", "a"), ("b", "qq")])
        with pytest.warns(RuntimeWarning):
            result = procrustes(src, tgt, seed)
        assert result.pairs_used == 1
        assert result.pairs_dropped == 2

    def test_no_surviving_pairs_rejected(self):
        src = unit_space(np.eye(2), ["a", "b"])
        with pytest.raises(EmptySeedError):
            procrustes(src, src, BilingualDictionary([("zz", "qq")]))

    def test_pair_order_invariant(self):
        pair = make_pair(SynthSpec(n=40, d=5, noise_sigma=0.2, seed=2))
        w1 = procrustes(pair.source, pair.target, pair.gold).matrix.w
        reversed_dict = BilingualDictionary(list(reversed(pair.gold.pairs)))
        w2 = procrustes(pair.source, pair.target, reversed_dict).matrix.w
        assert np.linalg.norm(w1 - w2) < 1e-9

    def test_beats_random_orthogonal_maps(self):
        pair = make_pair(SynthSpec(n=25, d=4, noise_sigma=0.3, seed=7))
        fit = procrustes(pair.source, pair.target, pair.gold).matrix
        s, t = pair.source.vectors, pair.target.vectors
        best = np.linalg.norm(s @ fit.w.T - t)
        assert best <= np.linalg.norm(s - t) + 1e-12  # no worse than identity
        for seed in range(1000):
            q = random_orthogonal(4, seed)
            assert best <= np.linalg.norm(s @ q.T - t) + 1e-9

    def test_orthogonality_invariant(self):
        for seed in range(5):
            pair = make_pair(SynthSpec(n=30, d=6, noise_sigma=0.5, seed=seed))
            fit = procrustes(pair.source, pair.target, pair.gold)
            assert fit.matrix.orthogonality_residual < 1e-6

    def test_dimension_mismatch_rejected(self):
        a = unit_space(np.eye(2), ["a", "b"])
        b = unit_space(np.eye(3), ["a", "b", "c"])
        with pytest.raises(ValidationError, match="mismatch"):
            procrustes(a, b, BilingualDictionary([("a", "a")]))


class TestMutualNN:
    def test_noise_free_rotation_recovers_identity_mapping(self):
        pair = make_pair(SynthSpec(n=60, d=6, noise_sigma=0.0, seed=5))
        induced = mutual_nn_dictionary(
            pair.source, pair.target, pair.true_map, cfg=RetrievalConfig(csls_k=5)
        )
        gold_map = pair.gold.by_source()
        assert len(induced) == 60
        assert all(t in gold_map[s] for s, t in induced.pairs)
        assert induced.provenance == "mutual-nn"

    def test_top_frequent_larger_than_vocab_caps_silently(self):
        pair = make_pair(SynthSpec(n=20, d=4, noise_sigma=0.0, seed=6))
        induced = mutual_nn_dictionary(
            pair.source, pair.target, pair.true_map,
            top_frequent=10**6, cfg=RetrievalConfig(method="cosine"),
        )
        assert len(induced) == 20

    def test_empty_result_with_capped_pool(self):
        # with only the most frequent source queried, and the reverse
        # retrieval over the full source vocabulary landing elsewhere,
        # nothing survives the bidirectional check
        src = unit_space([[1.0, 0.0], [0.8, 0.6]], ["s0", "s1"])
        tgt = unit_space([[0.8, 0.6]], ["t0"])
        with pytest.raises(EmptySeedError):
            mutual_nn_dictionary(
                src, tgt, TranslationMatrix.identity(2),
                top_frequent=1, cfg=RetrievalConfig(method="cosine"),
            )

    def test_symmetry_on_noise_free_pair(self):
        pair = make_pair(SynthSpec(n=40, d=5, noise_sigma=0.0, seed=8))
        cfg = RetrievalConfig(csls_k=5)
        forward = mutual_nn_dictionary(pair.source, pair.target, pair.true_map, cfg=cfg)
        inverse = TranslationMatrix.from_matrix(pair.true_map.w.T)
        backward = mutual_nn_dictionary(pair.target, pair.source, inverse, cfg=cfg)
        assert {(s, t) for s, t in forward.pairs} == {(t, s) for s, t in backward.pairs}


class TestRefine:
    def test_fixed_point_at_true_rotation(self):
        pair = make_pair(SynthSpec(n=80, d=6, noise_sigma=0.0, seed=11))
        result = refine(pair.source, pair.target, pair.true_map, iterations=3,
                        cfg=RetrievalConfig(csls_k=5))
        assert np.linalg.norm(result.matrix.w - pair.true_map.w) < 1e-6
        assert result.dictionary_sizes == [80, 80, 80]

    def test_zero_iterations_returns_input(self):
        pair = make_pair(SynthSpec(n=20, d=4, seed=1))
        w0 = TranslationMatrix.identity(4)
        result = refine(pair.source, pair.target, w0, iterations=0)
        assert result.matrix is w0
        assert result.dictionary_sizes == []

    def test_improves_noisy_seeded_alignment(self):
        pair = make_pair(SynthSpec(n=300, d=10, noise_sigma=0.1, seed=13))
        cfg = RetrievalConfig(csls_k=10)
        seed_dict = BilingualDictionary(pair.gold.pairs[:20])
        held_out = BilingualDictionary(pair.gold.pairs[20:])
        w0 = procrustes(pair.source, pair.target, seed_dict).matrix

        def p1(w):
            result = translate(held_out.sources(), pair.source, pair.target, w, cfg)
            gold_map = held_out.by_source()
            hits = sum(p.target in gold_map[p.query] for p in result.predictions)
            return hits / len(result.predictions)

        refined = refine(pair.source, pair.target, w0, iterations=5, cfg=cfg)
        assert p1(refined.matrix) >= p1(w0)

    def test_empty_mutual_nn_reports_iteration(self):
        src = unit_space([[1.0, 0.0], [0.8, 0.6]], ["s0", "s1"])
        tgt = unit_space([[0.8, 0.6]], ["t0"])
        with pytest.raises(EmptySeedError, match="iteration 1"):
            refine(src, tgt, TranslationMatrix.identity(2), iterations=2,
                   top_frequent=1, cfg=RetrievalConfig(method="cosine"))


class TestAdversarial:
    def test_zero_epochs_returns_identity(self):
        pair = make_pair(SynthSpec(n=30, d=4, seed=0))
        result = adversarial_init(pair.source, pair.target, AdversarialConfig(epochs=0))
        assert np.allclose(result.matrix.w, np.eye(4))
        assert result.trace == []

    def test_orthogonality_residual_after_every_epoch(self):
        pair = make_pair(SynthSpec(n=100, d=6, noise_sigma=0.05, seed=1))
        cfg = AdversarialConfig(epochs=5, batch_size=16, vocab_cap=100, seed=2)
        result = adversarial_init(pair.source, pair.target, cfg)
        assert len(result.trace) == 5
        assert all(t.orthogonality_residual < 1e-3 for t in result.trace)
        assert result.matrix.orthogonality_residual < 1e-9

    def test_deterministic_given_seed(self):
        pair = make_pair(SynthSpec(n=60, d=5, noise_sigma=0.1, seed=3))
        cfg = AdversarialConfig(epochs=3, batch_size=8, vocab_cap=60, seed=7)
        a = adversarial_init(pair.source, pair.target, cfg)
        b = adversarial_init(pair.source, pair.target, cfg)
        assert np.array_equal(a.matrix.w, b.matrix.w)
        assert a.trace == b.trace

    def test_identical_spaces_stay_near_chance(self):
        pair = make_pair(SynthSpec(n=500, d=10, seed=4))
        cfg = AdversarialConfig(epochs=10, vocab_cap=500, seed=5)
        result = adversarial_init(pair.source, pair.source, cfg)
        assert 0.35 <= result.trace[-1].discriminator_accuracy <= 0.65

    def test_dimension_mismatch_rejected(self):
        a = unit_space(np.eye(2), ["a", "b"])
        b = unit_space(np.eye(3), ["x", "y", "z"])
        with pytest.raises(ValidationError, match="mismatch"):
            adversarial_init(a, b)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            AdversarialConfig(label_smoothing=0.5)
        with pytest.raises(ValidationError):
            AdversarialConfig(epochs=-1)
        with pytest.raises(ValidationError):
            AdversarialConfig(generator_momentum=1.0)

    def test_divergence_reports_epoch(self):
        from lexalign.errors import TrainingDivergenceError

        pair = make_pair(SynthSpec(n=100, d=6, noise_sigma=0.1, seed=0))
        cfg = AdversarialConfig(
            epochs=30, batch_size=16, vocab_cap=100, discriminator_lr=1e9, seed=0
        )
        with pytest.raises(TrainingDivergenceError, match="epoch"):
            adversarial_init(pair.source, pair.target, cfg)


class TestMatrixIO:
    def test_round_trip(self, tmp_path):
        w = TranslationMatrix.from_matrix(random_orthogonal(5, 21))
        path = tmp_path / "w.vec"
        save_matrix(w, path)
        loaded = load_matrix(path)
        assert np.allclose(loaded.w, w.w, atol=1e-12)
        assert loaded.dim == 5

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.vec"
        path.write_text("2 2\n1.0 0.0\n", encoding="utf-8")
        from lexalign.errors import ParseError

        with pytest.raises(ParseError, match="header"):
            load_matrix(path)
