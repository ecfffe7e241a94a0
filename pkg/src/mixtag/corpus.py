"""Reading, merging, and writing of column-formatted code-mixed corpora.

Files are UTF-8 and tab-separated, one token per line, with blank lines
separating sentences.  Training data carries three columns (token, language
tag, POS tag); test data carries two (token, language tag).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

TRAIN3COL = "train3col"
TEST2COL = "test2col"

_SOURCES = {"facebook", "twitter", "whatsapp", "mixed", "unknown"}
_GRANULARITIES = {"coarse", "fine", "unknown"}

_BAD_SURFACE_CHARS = ("\t", "\r", "\n")


class CorpusError(ValueError):
    """Malformed corpus content.  Carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Token:
    surface: str
    lang: str
    pos: str | None = None

    def __post_init__(self):
        if not self.surface:
            raise CorpusError("empty token surface")
        if any(c in self.surface for c in _BAD_SURFACE_CHARS):
            raise CorpusError("token surface contains tab or newline")
        if not self.lang:
            raise CorpusError("empty language tag")
        if self.pos is not None and not self.pos:
            raise CorpusError("empty POS tag")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if len(self.tokens) == 0:
            raise CorpusError("sentence must contain at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, i: int) -> Token:
        return self.tokens[i]


@dataclass(frozen=True)
class CorpusMeta:
    source: str = "unknown"
    granularity: str = "unknown"
    pair: str = ""

    def __post_init__(self):
        if self.source not in _SOURCES:
            raise CorpusError(f"unknown source {self.source!r}")
        if self.granularity not in _GRANULARITIES:
            raise CorpusError(f"unknown granularity {self.granularity!r}")


@dataclass(frozen=True)
class Corpus:
    sentences: tuple[Sentence, ...]
    meta: CorpusMeta = field(default_factory=CorpusMeta)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)


def _check_schema(schema: str) -> int:
    if schema == TRAIN3COL:
        return 3
    if schema == TEST2COL:
        return 2
    raise ValueError(f"unknown schema {schema!r}")


def parse_corpus(text: str, schema: str, meta: CorpusMeta | None = None) -> Corpus:
    """Parse tab-separated column text into a Corpus.

    Blank lines end the current sentence; a trailing partial sentence is
    closed at end of input.  A leading byte-order mark is stripped.
    """
    ncols = _check_schema(schema)
    if text.startswith("\ufeff"):
        text = text[1:]

    sentences: list[Sentence] = []
    current: list[Token] = []

    def close_sentence():
        if current:
            sentences.append(Sentence(tuple(current)))
            current.clear()

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        if line == "":
            close_sentence()
            continue
        cols = line.split("\t")
        if len(cols) != ncols:
            raise CorpusError(
                f"expected {ncols} tab-separated columns, found {len(cols)}",
                line=lineno,
            )
        try:
            if ncols == 3:
                token = Token(surface=cols[0], lang=cols[1], pos=cols[2])
            else:
                token = Token(surface=cols[0], lang=cols[1])
        except CorpusError as exc:
            raise CorpusError(str(exc), line=lineno) from None
        current.append(token)
    close_sentence()

    return Corpus(tuple(sentences), meta if meta is not None else CorpusMeta())


def merge_corpora(parts: Sequence[Corpus]) -> Corpus:
    """Concatenate corpora in argument order.

    Known granularities must agree; the merged source becomes "mixed" when
    the parts disagree.
    """
    if not parts:
        raise CorpusError("nothing to merge")

    granularities = {c.meta.granularity for c in parts} - {"unknown"}
    if len(granularities) > 1:
        raise CorpusError(
            f"conflicting granularities: {', '.join(sorted(granularities))}"
        )
    granularity = granularities.pop() if granularities else "unknown"

    sources = {c.meta.source for c in parts}
    source = sources.pop() if len(sources) == 1 else "mixed"

    pairs = {c.meta.pair for c in parts}
    pair = pairs.pop() if len(pairs) == 1 else ""

    sentences: list[Sentence] = []
    for part in parts:
        sentences.extend(part.sentences)
    return Corpus(tuple(sentences), CorpusMeta(source, granularity, pair))


def write_corpus(corpus: Corpus, schema: str) -> str:
    """Render a Corpus back to column text; exact inverse of parse_corpus."""
    ncols = _check_schema(schema)
    blocks: list[str] = []
    for sentence in corpus:
        lines = []
        for token in sentence:
            if ncols == 3:
                if token.pos is None:
                    raise CorpusError(
                        f"token {token.surface!r} lacks a POS tag "
                        "required by the 3-column schema"
                    )
                lines.append(f"{token.surface}\t{token.lang}\t{token.pos}")
            else:
                lines.append(f"{token.surface}\t{token.lang}")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
