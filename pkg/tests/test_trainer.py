import math

import numpy as np
import pytest

from mixtag.corpus import Corpus, CorpusMeta, Sentence, Token
from mixtag.features import FeatureCatalogue
from mixtag.trainer import (
    TrainConfig,
    index_corpus,
    objective_and_gradient,
    train,
)

from conftest import make_corpus, make_sentence

# small catalogue keeps the toy parameter spaces tight
LEAN = FeatureCatalogue().without(
    "ortho", "vowel_count", "vowel_collapse", "normalization", "affixes"
)


def toy_corpus():
    return make_corpus(
        make_sentence(("the", "en", "D"), ("cat", "en", "N"), ("runs", "en", "V")),
        make_sentence(("a", "en", "D"), ("dog", "en", "N")),
        make_sentence(("cats", "en", "N"), ("run", "en", "V")),
        make_sentence(("the", "en", "D"), ("dog", "en", "N"), ("runs", "en", "V")),
        make_sentence(("run", "en", "V"),),
    )


def numerical_gradient(weights, indexed, sigma2, h=1e-5):
    grad = np.empty_like(weights)
    for k in range(len(weights)):
        wp = weights.copy()
        wp[k] += h
        wm = weights.copy()
        wm[k] -= h
        fp, _ = objective_and_gradient(wp, indexed, sigma2)
        fm, _ = objective_and_gradient(wm, indexed, sigma2)
        grad[k] = (fp - fm) / (2 * h)
    return grad


class TestObjective:
    def test_uniform_gradient_single_token(self):
        # one labeled token, two labels, zero weights: the gold slot gets
        # 0.5 - 1 and the competing slot 0.5
        corpus = make_corpus(make_sentence(("w", "en", "A")),
                             make_sentence(("w", "en", "B")))
        indexed = index_corpus(corpus, catalogue=LEAN)
        keep = [s for s in indexed.sentences if s.label_ids == [0]]
        indexed.sentences = keep  # single sentence, gold label A (index 0)
        w = np.zeros(indexed.index.size)
        value, grad = objective_and_gradient(w, indexed, 10.0)
        assert value == pytest.approx(math.log(2))
        base = indexed.index.state_base("W0=w")
        assert grad[base + 0] == pytest.approx(-0.5)
        assert grad[base + 1] == pytest.approx(0.5)

    def test_zero_weights_no_penalty(self):
        indexed = index_corpus(toy_corpus(), catalogue=LEAN)
        w = np.zeros(indexed.index.size)
        value, _ = objective_and_gradient(w, indexed, 10.0)
        assert value == pytest.approx(indexed.token_count() * math.log(3))

    def test_gradient_matches_finite_differences(self, rng):
        indexed = index_corpus(toy_corpus(), catalogue=LEAN)
        sigma2 = 10.0
        for _ in range(3):
            w = rng.standard_normal(indexed.index.size) * 0.5
            _, grad = objective_and_gradient(w, indexed, sigma2)
            fd = numerical_gradient(w, indexed, sigma2)
            denom = np.maximum(np.maximum(np.abs(grad), np.abs(fd)), 1e-8)
            assert np.max(np.abs(grad - fd) / denom) < 1e-4


class TestTrain:
    def test_separable_corpus_fits_exactly(self):
        # surface uniquely determines the label
        sentences = []
        for k in range(10):
            sentences.append(
                make_sentence(
                    (f"w{k % 4}", "en", f"T{k % 4}"),
                    (f"w{(k + 1) % 4}", "en", f"T{(k + 1) % 4}"),
                    (f"w{(k + 2) % 4}", "en", f"T{(k + 2) % 4}"),
                )
            )
        corpus = make_corpus(*sentences)
        config = TrainConfig(max_iterations=50)
        model, report = train(corpus, catalogue=LEAN, config=config)
        from mixtag.tagging import tag_corpus
        from mixtag.corpus import write_corpus, TRAIN3COL

        stripped = Corpus(
            tuple(
                Sentence(tuple(Token(t.surface, t.lang) for t in s)) for s in corpus
            ),
            corpus.meta,
        )
        tagged = tag_corpus(model, stripped, catalogue=LEAN)
        assert write_corpus(tagged, TRAIN3COL) == write_corpus(corpus, TRAIN3COL)

    def test_zero_iterations_returns_zero_model(self):
        model, report = train(
            toy_corpus(), catalogue=LEAN, config=TrainConfig(max_iterations=0)
        )
        assert np.all(model.weights == 0)
        assert report.iterations == 0

    def test_objective_not_worse_than_uniform(self):
        corpus = toy_corpus()
        model, report = train(corpus, catalogue=LEAN, config=TrainConfig(max_iterations=30))
        assert report.final_objective <= corpus.token_count() * math.log(3) + 1e-9

    def test_accepted_objectives_non_increasing(self):
        _, report = train(toy_corpus(), catalogue=LEAN, config=TrainConfig(max_iterations=30))
        values = [v for v, _ in report.history]
        assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))

    def test_deterministic_across_runs_and_workers(self):
        config1 = TrainConfig(max_iterations=25, worker_count=1)
        config4 = TrainConfig(max_iterations=25, worker_count=4)
        m1, _ = train(toy_corpus(), catalogue=LEAN, config=config1)
        m2, _ = train(toy_corpus(), catalogue=LEAN, config=config4)
        assert np.array_equal(m1.weights, m2.weights)

    def test_memory_size_converges_to_same_objective(self):
        # tight tolerance so both runs converge all the way to the optimum
        r1 = train(toy_corpus(), catalogue=LEAN,
                   config=TrainConfig(max_iterations=500, lbfgs_memory=3, tolerance=1e-12))[1]
        r2 = train(toy_corpus(), catalogue=LEAN,
                   config=TrainConfig(max_iterations=500, lbfgs_memory=15, tolerance=1e-12))[1]
        assert r1.final_objective == pytest.approx(r2.final_objective, rel=1e-6)

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            train(make_corpus())

    def test_unlabeled_token_rejected(self):
        with pytest.raises(ValueError, match="unlabeled"):
            train(make_corpus(make_sentence(("w", "en"))))


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"cutoff": 0},
            {"l2_sigma2": 0.0},
            {"max_iterations": -1},
            {"tolerance": 0.0},
            {"lbfgs_memory": 0},
            {"worker_count": 0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)
