from __future__ import annotations

import numpy as np
import pytest

from mixtag.corpus import Corpus, CorpusMeta, Sentence, Token
from mixtag.crf import FeatureIndex, LabelSet, Lattice, Model


def make_sentence(*items) -> Sentence:
    """items: (surface, lang[, pos]) tuples."""
    return Sentence(tuple(Token(*item) for item in items))


def make_corpus(*sentences, meta: CorpusMeta | None = None) -> Corpus:
    return Corpus(tuple(sentences), meta or CorpusMeta())


def model_from_lattice(state, trans, labels: LabelSet | None = None) -> Model:
    """Wrap raw lattice scores in a Model whose attributes are A0..A{T-1}.

    Position t fires the single attribute "A{t}", so build_lattice
    reproduces exactly the given state matrix.
    """
    state = np.asarray(state, dtype=float)
    trans = np.asarray(trans, dtype=float)
    T, L = state.shape
    if labels is None:
        labels = LabelSet([f"y{i}" for i in range(L)])
    attrs = [f"A{t}" for t in range(T)]
    index = FeatureIndex(L, attrs)
    weights = np.zeros(index.size)
    weights[: L * L] = trans.ravel()
    for t, a in enumerate(attrs):
        base = index.state_base(a)
        weights[base:base + L] = state[t]
    return Model(labels, index, weights)


@pytest.fixture
def rng():
    return np.random.default_rng(20160915)
