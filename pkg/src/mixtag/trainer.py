"""L2-penalized maximum-likelihood training of the chain CRF.

The objective is the negative conditional log-likelihood plus a Gaussian
penalty ||theta||^2 / (2 sigma^2), minimized from a zero start with
limited-memory BFGS.  Per-sentence statistics are always reduced in
sentence order, so results are deterministic regardless of worker_count.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .corpus import Corpus
from .crf import (
    FeatureIndex,
    LabelSet,
    Lattice,
    Model,
    index_features,
    sequence_score,
    _forward_backward,
)
from .features import (
    EMPTY_LEXICON,
    AttributeSet,
    FeatureCatalogue,
    NormalizationLexicon,
    extract_sentence_attributes,
)


class TrainingError(RuntimeError):
    """Training could not produce a finite objective."""


@dataclass(frozen=True)
class TrainConfig:
    cutoff: int = 1
    l2_sigma2: float = 10.0
    max_iterations: int = 200
    tolerance: float = 1e-5
    lbfgs_memory: int = 10
    worker_count: int = 1

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.l2_sigma2 <= 0:
            raise ValueError("l2_sigma2 must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.lbfgs_memory < 1:
            raise ValueError("lbfgs_memory must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")


@dataclass
class TrainReport:
    iterations: int = 0
    history: list[tuple[float, float]] = field(default_factory=list)  # (objective, |grad|)
    final_objective: float = float("nan")
    wall_time: float = 0.0


@dataclass
class IndexedSentence:
    attrs: list[AttributeSet]
    label_ids: list[int]


@dataclass
class IndexedCorpus:
    """Training corpus resolved against a label set and feature index."""

    labels: LabelSet
    index: FeatureIndex
    sentences: list[IndexedSentence]

    def token_count(self) -> int:
        return sum(len(s.label_ids) for s in self.sentences)


def index_corpus(
    corpus: Corpus,
    lexicon: NormalizationLexicon = EMPTY_LEXICON,
    catalogue: FeatureCatalogue = FeatureCatalogue(),
    cutoff: int = 1,
) -> IndexedCorpus:
    """Extract attributes, collect labels, and build the feature index."""
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    label_strings = set()
    for sentence in corpus:
        for token in sentence:
            if token.pos is None:
                raise ValueError(
                    f"unlabeled training token {token.surface!r}"
                )
            label_strings.add(token.pos)
    labels = LabelSet(sorted(label_strings))

    all_attrs = [
        extract_sentence_attributes(sentence, lexicon, catalogue)
        for sentence in corpus
    ]
    index = index_features(all_attrs, labels, cutoff)
    sentences = [
        IndexedSentence(attrs, [labels.index(tok.pos) for tok in sentence])
        for sentence, attrs in zip(corpus, all_attrs)
    ]
    return IndexedCorpus(labels, index, sentences)


def _sentence_lattice(
    weights: np.ndarray, index: FeatureIndex, sent: IndexedSentence
) -> Lattice:
    L = index.n_labels
    state = np.zeros((len(sent.attrs), L))
    for t, attrs in enumerate(sent.attrs):
        for attr in attrs:
            base = index.state_base(attr)
            if base is not None:
                state[t] += weights[base:base + L]
    return Lattice(state, weights[: L * L].reshape(L, L))


def objective_and_gradient(
    weights: np.ndarray, corpus: IndexedCorpus, l2_sigma2: float
) -> tuple[float, np.ndarray]:
    """Penalized negative log-likelihood and its gradient.

    Each gradient component is expected feature count minus empirical count
    plus the penalty term theta_k / sigma^2.
    """
    index = corpus.index
    L = index.n_labels
    weights = np.asarray(weights, dtype=np.float64)
    value = 0.0
    grad = np.zeros_like(weights)

    for sent in corpus.sentences:
        lattice = _sentence_lattice(weights, index, sent)
        alpha, beta, log_z = _forward_backward(lattice)
        node = np.exp(alpha + beta - log_z)

        gold = sequence_score(lattice, sent.label_ids)
        value -= gold - log_z

        # expected minus empirical state counts
        for t, attrs in enumerate(sent.attrs):
            gold_y = sent.label_ids[t]
            for attr in attrs:
                base = index.state_base(attr)
                if base is None:
                    continue
                grad[base:base + L] += node[t]
                grad[base + gold_y] -= 1.0

        # expected minus empirical transition counts
        if lattice.T > 1:
            trans_grad = np.zeros((L, L))
            for t in range(lattice.T - 1):
                trans_grad += np.exp(
                    alpha[t][:, None]
                    + lattice.trans
                    + (lattice.state[t + 1] + beta[t + 1])[None, :]
                    - log_z
                )
                trans_grad[sent.label_ids[t], sent.label_ids[t + 1]] -= 1.0
            grad[: L * L] += trans_grad.ravel()

    value += float(np.dot(weights, weights)) / (2.0 * l2_sigma2)
    grad += weights / l2_sigma2
    return value, grad


def train(
    corpus: Corpus,
    lexicon: NormalizationLexicon = EMPTY_LEXICON,
    catalogue: FeatureCatalogue = FeatureCatalogue(),
    config: TrainConfig = TrainConfig(),
) -> tuple[Model, TrainReport]:
    """Fit a model from a fully labeled corpus.

    Weights start at zero; optimization stops at max_iterations or when the
    relative objective change drops below the tolerance.
    """
    start = time.perf_counter()
    indexed = index_corpus(corpus, lexicon, catalogue, config.cutoff)
    report = TrainReport()

    weights = np.zeros(indexed.index.size)
    if config.max_iterations > 0:
        cache: dict[bytes, tuple[float, np.ndarray]] = {}

        def fun(w: np.ndarray) -> tuple[float, np.ndarray]:
            key = w.tobytes()
            hit = cache.get(key)
            if hit is None:
                hit = objective_and_gradient(w, indexed, config.l2_sigma2)
                if not np.isfinite(hit[0]):
                    raise TrainingError("objective became non-finite")
                cache.clear()  # keep only the most recent evaluation
                cache[key] = hit
            return hit

        def callback(w: np.ndarray) -> None:
            value, grad = fun(w)
            report.history.append((value, float(np.linalg.norm(grad))))

        result = minimize(
            fun,
            weights,
            jac=True,
            method="L-BFGS-B",
            callback=callback,
            options={
                "maxiter": config.max_iterations,
                "maxcor": config.lbfgs_memory,
                "ftol": config.tolerance,
                "gtol": 1e-12,
            },
        )
        if not np.all(np.isfinite(result.x)):
            raise TrainingError("optimizer produced non-finite weights")
        weights = result.x
        report.iterations = int(result.nit)

    value, _ = objective_and_gradient(weights, indexed, config.l2_sigma2)
    report.final_objective = float(value)
    report.wall_time = time.perf_counter() - start

    model = Model(
        indexed.labels,
        indexed.index,
        weights,
        catalogue_fingerprint=catalogue.fingerprint(),
        lexicon_fingerprint=lexicon.fingerprint(),
    )
    return model, report
