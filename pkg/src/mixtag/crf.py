"""Linear-chain CRF machinery.

Feature indexing, log-space lattices, forward-backward (partition function
and posterior marginals), Viterbi decoding, and line-oriented model
persistence.  State features conjoin a position's attributes with its label;
transition features are dense label bigrams applied between positions t-1
and t for t >= 2 (the first position carries state features only).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .features import AttributeSet, escape_value, unescape_value

MODEL_MAGIC = "MIXTAG-MODEL"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    """Unreadable or invalid persisted model."""


class LabelSet:
    """Ordered label alphabet with stable 0-based indices."""

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if not labels:
            raise ValueError("label set must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate labels")
        for label in labels:
            if not label or "\t" in label or "\n" in label or "\r" in label:
                raise ValueError(f"invalid label {label!r}")
        self.labels = labels
        self._index = {label: i for i, label in enumerate(labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, i: int) -> str:
        return self.labels[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, LabelSet) and self.labels == other.labels

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown label {label!r}") from None


class FeatureIndex:
    """Parameter-slot layout: L*L transition slots first, then state slots.

    A state slot exists for (attribute, label) for every label and every
    retained attribute; retained attributes get a contiguous block of L
    slots so slot lookup is base + label index.
    """

    def __init__(self, n_labels: int, attributes: Sequence[str]):
        if n_labels <= 0:
            raise ValueError("label count must be positive")
        self.n_labels = n_labels
        self.attributes = tuple(attributes)
        self._base = {
            a: n_labels * n_labels + rank * n_labels
            for rank, a in enumerate(self.attributes)
        }
        self.size = n_labels * n_labels + len(self.attributes) * n_labels

    def transition_slot(self, prev_label: int, label: int) -> int:
        return prev_label * self.n_labels + label

    def state_slot(self, attribute: str, label: int) -> int | None:
        base = self._base.get(attribute)
        return None if base is None else base + label

    def state_base(self, attribute: str) -> int | None:
        return self._base.get(attribute)


@dataclass
class Model:
    labels: LabelSet
    index: FeatureIndex
    weights: np.ndarray
    catalogue_fingerprint: str = "all"
    lexicon_fingerprint: str = "empty"

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (self.index.size,):
            raise ValueError(
                f"weight count {self.weights.shape} does not match "
                f"parameter count {self.index.size}"
            )
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("non-finite weight")


@dataclass
class Lattice:
    """Per-position label scores plus the shared transition score matrix."""

    state: np.ndarray  # (T, L)
    trans: np.ndarray  # (L, L), trans[y_prev, y]

    def __post_init__(self):
        self.state = np.asarray(self.state, dtype=np.float64)
        self.trans = np.asarray(self.trans, dtype=np.float64)
        if self.state.ndim != 2 or self.trans.shape != (self.L, self.L):
            raise ValueError("inconsistent lattice dimensions")
        if not (np.all(np.isfinite(self.state)) and np.all(np.isfinite(self.trans))):
            raise ValueError("non-finite lattice score")

    @property
    def T(self) -> int:
        return self.state.shape[0]

    @property
    def L(self) -> int:
        return self.state.shape[1]


def index_features(
    corpus_attributes: Iterable[Sequence[AttributeSet]],
    labels: LabelSet,
    cutoff: int = 1,
) -> FeatureIndex:
    """Build the slot layout from training attribute sets.

    An attribute is retained when its corpus occurrence count reaches the
    cutoff; retained attributes are conjoined with every label.  Transition
    slots always cover all label pairs.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    counts: Counter[str] = Counter()
    seen_any = False
    for sentence_attrs in corpus_attributes:
        for attrs in sentence_attrs:
            seen_any = True
            counts.update(attrs)
    if not seen_any:
        raise ValueError("empty corpus")
    retained = sorted(a for a, n in counts.items() if n >= cutoff)
    return FeatureIndex(len(labels), retained)


def build_lattice(model: Model, attrs: Sequence[AttributeSet]) -> Lattice:
    """Score every (position, label) pair; unknown attributes contribute 0."""
    if not attrs:
        raise ValueError("attribute sequence must be nonempty")
    L = len(model.labels)
    w = model.weights
    state = np.zeros((len(attrs), L))
    for t, position_attrs in enumerate(attrs):
        for attr in position_attrs:
            base = model.index.state_base(attr)
            if base is not None:
                state[t] += w[base:base + L]
    trans = w[: L * L].reshape(L, L)
    return Lattice(state, trans)


def log_partition(lattice: Lattice) -> float:
    """log Z by the forward recursion in log space."""
    alpha = lattice.state[0].copy()
    for t in range(1, lattice.T):
        alpha = lattice.state[t] + logsumexp(alpha[:, None] + lattice.trans, axis=0)
    return float(logsumexp(alpha))


def _forward_backward(lattice: Lattice) -> tuple[np.ndarray, np.ndarray, float]:
    T, L = lattice.T, lattice.L
    alpha = np.empty((T, L))
    beta = np.empty((T, L))
    alpha[0] = lattice.state[0]
    for t in range(1, T):
        alpha[t] = lattice.state[t] + logsumexp(
            alpha[t - 1][:, None] + lattice.trans, axis=0
        )
    beta[T - 1] = 0.0
    for t in range(T - 2, -1, -1):
        beta[t] = logsumexp(
            lattice.trans + (lattice.state[t + 1] + beta[t + 1])[None, :], axis=1
        )
    log_z = float(logsumexp(alpha[T - 1]))
    return alpha, beta, log_z


def posterior_marginals(lattice: Lattice) -> tuple[np.ndarray, np.ndarray]:
    """Node marginals P(y_t | x) and edge marginals P(y_t, y_{t+1} | x).

    Returns (node, edge) with node of shape (T, L) and edge of shape
    (T-1, L, L); edge[t, y_prev, y] covers the transition from position t
    to t+1.
    """
    T, L = lattice.T, lattice.L
    alpha, beta, log_z = _forward_backward(lattice)
    node = np.exp(alpha + beta - log_z)
    edge = np.empty((T - 1, L, L))
    for t in range(T - 1):
        edge[t] = np.exp(
            alpha[t][:, None]
            + lattice.trans
            + (lattice.state[t + 1] + beta[t + 1])[None, :]
            - log_z
        )
    return node, edge


def sequence_score(lattice: Lattice, label_ids: Sequence[int]) -> float:
    """Unnormalized path score: state terms plus transitions for t >= 2."""
    if len(label_ids) != lattice.T:
        raise ValueError("label sequence length does not match lattice")
    score = 0.0
    prev = None
    for t, y in enumerate(label_ids):
        score += lattice.state[t, y]
        if prev is not None:
            score += lattice.trans[prev, y]
        prev = y
    return float(score)


def sequence_log_prob(
    model: Model, attrs: Sequence[AttributeSet], labels: Sequence[str]
) -> float:
    """log P(y | x) for one labeling."""
    if len(labels) != len(attrs):
        raise ValueError("label sequence length does not match attribute sequence")
    label_ids = [model.labels.index(y) for y in labels]
    lattice = build_lattice(model, attrs)
    return sequence_score(lattice, label_ids) - log_partition(lattice)


def viterbi_lattice(lattice: Lattice) -> tuple[list[int], float]:
    """Best label-index sequence and its unnormalized score.

    Decoding runs over best-suffix scores so ties resolve to the
    lexicographically least index sequence.
    """
    T, L = lattice.T, lattice.L
    # best[t, y]: best score of the suffix starting at t given label y at t
    best = np.empty((T, L))
    best[T - 1] = lattice.state[T - 1]
    for t in range(T - 2, -1, -1):
        best[t] = lattice.state[t] + np.max(lattice.trans + best[t + 1][None, :], axis=1)
    path = [int(np.argmax(best[0]))]
    for t in range(1, T):
        cont = lattice.trans[path[-1]] + best[t]
        path.append(int(np.argmax(cont)))
    return path, float(best[0][path[0]])


def viterbi(model: Model, attrs: Sequence[AttributeSet]) -> tuple[list[str], float]:
    lattice = build_lattice(model, attrs)
    path, score = viterbi_lattice(lattice)
    return [model.labels[y] for y in path], score


def _format_weight(w: float) -> str:
    return format(float(w), ".17g")


def save_model(model: Model) -> bytes:
    """Serialize to the line-oriented text format, round-trip exact."""
    L = len(model.labels)
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION}"]
    lines.append(f"labels {L}")
    lines.extend(model.labels)
    lines.append(f"catalogue {model.catalogue_fingerprint}")
    lines.append(f"lexicon {model.lexicon_fingerprint}")
    lines.append("transitions")
    for yp in range(L):
        for y in range(L):
            slot = model.index.transition_slot(yp, y)
            lines.append(
                f"{model.labels[yp]}\t{model.labels[y]}\t{_format_weight(model.weights[slot])}"
            )
    lines.append(f"states {len(model.index.attributes)}")
    for attr in model.index.attributes:
        base = model.index.state_base(attr)
        for y in range(L):
            lines.append(
                f"{escape_value(attr)}\t{model.labels[y]}\t{_format_weight(model.weights[base + y])}"
            )
    return ("\n".join(lines) + "\n").encode("utf-8")


def load_model(data: bytes) -> Model:
    """Parse bytes produced by save_model; validates header and weights."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"model file is not UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ModelFormatError("truncated model file")
        line = lines[pos]
        pos += 1
        return line

    header = take().split(" ")
    if len(header) != 2 or header[0] != MODEL_MAGIC:
        raise ModelFormatError("not a model file (bad magic)")
    if header[1] != str(MODEL_VERSION):
        raise ModelFormatError(f"unsupported model version {header[1]!r}")

    kind, _, count = take().partition(" ")
    if kind != "labels":
        raise ModelFormatError("expected label block")
    labels = LabelSet(take() for _ in range(int(count)))
    L = len(labels)

    cat_line = take()
    if not cat_line.startswith("catalogue "):
        raise ModelFormatError("expected catalogue fingerprint")
    catalogue_fp = cat_line[len("catalogue "):]
    lex_line = take()
    if not lex_line.startswith("lexicon "):
        raise ModelFormatError("expected lexicon fingerprint")
    lexicon_fp = lex_line[len("lexicon "):]

    def parse_weight(text: str, context: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise ModelFormatError(f"bad weight {text!r} in {context}") from None
        if not np.isfinite(value):
            raise ModelFormatError(f"non-finite weight {text!r} in {context}")
        return value

    if take() != "transitions":
        raise ModelFormatError("expected transition block")
    trans = np.empty(L * L)
    for yp in range(L):
        for y in range(L):
            cols = take().split("\t")
            if len(cols) != 3:
                raise ModelFormatError("malformed transition line")
            if labels.index(cols[0]) != yp or labels.index(cols[1]) != y:
                raise ModelFormatError("transition block out of order")
            trans[yp * L + y] = parse_weight(cols[2], "transition block")

    kind, _, count = take().partition(" ")
    if kind != "states":
        raise ModelFormatError("expected state block")
    n_attrs = int(count)
    attributes: list[str] = []
    state_weights: list[float] = []
    for _ in range(n_attrs):
        attr = None
        for y in range(L):
            cols = take().split("\t")
            if len(cols) != 3:
                raise ModelFormatError("malformed state line")
            unescaped = unescape_value(cols[0])
            if attr is None:
                attr = unescaped
            elif unescaped != attr:
                raise ModelFormatError("state block out of order")
            if labels.index(cols[1]) != y:
                raise ModelFormatError("state block out of order")
            state_weights.append(parse_weight(cols[2], f"state block ({attr!r})"))
        attributes.append(attr)
    if pos != len(lines):
        raise ModelFormatError("trailing garbage after state block")

    index = FeatureIndex(L, attributes)
    weights = np.concatenate([trans, np.asarray(state_weights)]) if state_weights else trans
    return Model(labels, index, weights, catalogue_fp, lexicon_fp)
