"""Command-line interface: train, tag, eval, and features subcommands.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus as corpus_mod
from .corpus import CorpusError, merge_corpora, parse_corpus, write_corpus
from .crf import ModelFormatError, load_model, save_model
from .evaluation import EvaluationError, evaluate, format_score, render_report
from .features import (
    EMPTY_LEXICON,
    FeatureCatalogue,
    LexiconError,
    extract_attributes,
    load_lexicon,
)
from .tagging import tag_corpus
from .trainer import TrainConfig, TrainingError, train

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for data errors
    def error(self, message):
        raise _UsageError(message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"{path}: {exc.strerror or exc}") from None


def _parse_file(path: str, schema: str):
    try:
        return parse_corpus(_read_text(path), schema)
    except CorpusError as exc:
        raise CorpusError(f"{path}: {exc}") from None


def _load_lexicon_arg(path: str | None):
    if path is None:
        return EMPTY_LEXICON
    try:
        return load_lexicon(_read_text(path))
    except LexiconError as exc:
        raise LexiconError(f"{path}: {exc}") from None


def _catalogue_from_args(disabled: list[str]) -> FeatureCatalogue:
    catalogue = FeatureCatalogue()
    if disabled:
        catalogue = catalogue.without(*disabled)
    return catalogue


def cmd_train(args) -> int:
    lexicon = _load_lexicon_arg(args.lexicon)
    try:
        catalogue = _catalogue_from_args(args.disable_feature)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    parts = [_parse_file(path, corpus_mod.TRAIN3COL) for path in args.train]
    merged = merge_corpora(parts)
    if len(merged) == 0:
        raise CorpusError("training data contains no sentences")
    config = TrainConfig(
        cutoff=args.cutoff,
        l2_sigma2=args.sigma2,
        max_iterations=args.max_iter,
        tolerance=args.tol,
    )
    model, report = train(merged, lexicon, catalogue, config)
    Path(args.model).write_bytes(save_model(model))
    print(f"training sentences: {len(merged)}")
    print(f"training tokens: {merged.token_count()}")
    print(f"labels: {len(model.labels)}")
    print(f"parameters: {model.index.size}")
    print(f"iterations: {report.iterations}")
    print(f"final objective: {report.final_objective:.6f}")
    print(f"wall time: {report.wall_time:.2f}s")
    print(f"model written to {args.model}")
    return EXIT_OK


def cmd_tag(args) -> int:
    try:
        model = load_model(Path(args.model).read_bytes())
    except OSError as exc:
        raise CorpusError(f"{args.model}: {exc.strerror or exc}") from None
    source = _parse_file(args.input, corpus_mod.TEST2COL)
    tagged = tag_corpus(model, source)
    Path(args.output).write_text(
        write_corpus(tagged, corpus_mod.TRAIN3COL), encoding="utf-8"
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = _parse_file(args.gold, corpus_mod.TRAIN3COL)
    pred = _parse_file(args.pred, corpus_mod.TRAIN3COL)
    report = evaluate(gold, pred)
    print(render_report(report, args.report))
    print(format_score(100 * report.overall_f1))
    return EXIT_OK


def _parse_position(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise _UsageError(f"--position expects 's:t', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise _UsageError(f"--position expects integers, got {text!r}") from None


def cmd_features(args) -> int:
    lexicon = _load_lexicon_arg(args.lexicon)
    text = _read_text(args.input)
    try:
        corpus = parse_corpus(text, corpus_mod.TRAIN3COL)
    except CorpusError:
        corpus = parse_corpus(text, corpus_mod.TEST2COL)

    if args.position is not None:
        s, t = _parse_position(args.position)
        if not (0 <= s < len(corpus)) or not (0 <= t < len(corpus.sentences[s])):
            raise CorpusError(f"position {s}:{t} is out of range")
        targets = [(s, t)]
    else:
        targets = [
            (s, t)
            for s in range(len(corpus))
            for t in range(len(corpus.sentences[s]))
        ]

    for s, t in targets:
        sentence = corpus.sentences[s]
        print(f"# sentence {s} token {t}: {sentence[t].surface}")
        for attr in extract_attributes(sentence, t, lexicon):
            print(attr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mixtag", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a model from 3-column corpora")
    p.add_argument("--train", action="append", required=True, metavar="FILE",
                   help="training file (repeatable; files are merged)")
    p.add_argument("--lexicon", metavar="FILE", help="normalization lexicon")
    p.add_argument("--model", required=True, metavar="FILE", help="model output path")
    p.add_argument("--cutoff", type=int, default=1, help="attribute frequency cutoff")
    p.add_argument("--sigma2", type=float, default=10.0, help="L2 penalty sigma^2")
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-5,
                   help="relative objective-change stopping tolerance")
    p.add_argument("--disable-feature", action="append", default=[],
                   metavar="FAMILY",
                   help=f"disable a feature family ({', '.join(FeatureCatalogue.family_names())})")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", help="tag a 2-column file with a trained model")
    p.add_argument("--model", required=True, metavar="FILE")
    p.add_argument("--input", required=True, metavar="FILE")
    p.add_argument("--output", required=True, metavar="FILE")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", help="score predictions against gold tags")
    p.add_argument("--gold", required=True, metavar="FILE")
    p.add_argument("--pred", required=True, metavar="FILE")
    p.add_argument("--report", choices=("table", "line"), default="table")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("features", help="print extracted attributes per token")
    p.add_argument("--input", required=True, metavar="FILE")
    p.add_argument("--lexicon", metavar="FILE")
    p.add_argument("--position", metavar="S:T",
                   help="restrict output to sentence S, token T")
    p.set_defaults(func=cmd_features)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"mixtag: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"mixtag: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusError, LexiconError, EvaluationError, ModelFormatError, ValueError) as exc:
        print(f"mixtag: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (TrainingError, FloatingPointError) as exc:
        print(f"mixtag: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
