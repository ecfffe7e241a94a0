import pytest

from mixtag.evaluation import (
    EvaluationError,
    average_scores,
    evaluate,
    format_score,
    render_report,
    round_half_up,
)

from conftest import make_corpus, make_sentence


def corpus_with_tags(tags):
    return make_corpus(
        make_sentence(*[(f"w{i}", "en", tag) for i, tag in enumerate(tags)])
    )


class TestEvaluate:
    def test_manual_three_token_case(self):
        gold = corpus_with_tags(["N", "V", "N"])
        pred = corpus_with_tags(["N", "N", "N"])
        report = evaluate(gold, pred)
        n = report.per_label["N"]
        assert n.precision == pytest.approx(2 / 3)
        assert n.recall == 1.0
        assert n.f1 == pytest.approx(0.8)
        v = report.per_label["V"]
        assert v.precision == 0.0 and v.recall == 0.0 and v.f1 == 0.0
        assert report.token_accuracy == pytest.approx(2 / 3)
        assert report.overall_f1 == pytest.approx(2 / 3)

    def test_perfect_prediction(self):
        gold = corpus_with_tags(["N", "V", "D"])
        report = evaluate(gold, gold)
        assert report.token_accuracy == 1.0
        for score in report.per_label.values():
            assert score.precision == score.recall == score.f1 == 1.0

    def test_sentence_count_mismatch(self):
        gold = make_corpus(
            make_sentence(("a", "en", "N")),
            make_sentence(("b", "en", "N")),
            make_sentence(("c", "en", "N")),
        )
        pred = make_corpus(
            make_sentence(("a", "en", "N")),
            make_sentence(("b", "en", "N")),
        )
        with pytest.raises(EvaluationError, match="sentence count"):
            evaluate(gold, pred)

    def test_surface_mismatch_reports_position(self):
        gold = corpus_with_tags(["N"])
        pred = make_corpus(make_sentence(("other", "en", "N")))
        with pytest.raises(EvaluationError, match="sentence 0, token 0"):
            evaluate(gold, pred)

    def test_unlabeled_token(self):
        gold = corpus_with_tags(["N"])
        pred = make_corpus(make_sentence(("w0", "en")))
        with pytest.raises(EvaluationError, match="unlabeled"):
            evaluate(gold, pred)

    def test_swap_symmetry(self):
        gold = corpus_with_tags(["N", "V", "N", "D"])
        pred = corpus_with_tags(["N", "N", "V", "D"])
        fwd = evaluate(gold, pred)
        rev = evaluate(pred, gold)
        for label in fwd.per_label:
            assert fwd.per_label[label].precision == pytest.approx(rev.per_label[label].recall)
            assert fwd.per_label[label].recall == pytest.approx(rev.per_label[label].precision)
            assert fwd.per_label[label].f1 == pytest.approx(rev.per_label[label].f1)

    def test_correct_counts_sum_to_accuracy_times_total(self):
        gold = corpus_with_tags(["N", "V", "N", "D", "V"])
        pred = corpus_with_tags(["N", "N", "N", "D", "V"])
        report = evaluate(gold, pred)
        total_correct = sum(s.correct_count for s in report.per_label.values())
        assert total_correct == round(report.token_accuracy * report.total_tokens)


class TestAverageScores:
    def test_paper_f1_average(self):
        assert format_score(average_scores([78.13, 79.13, 82.71])) == "79.99"

    def test_paper_rank_average(self):
        assert format_score(average_scores([2, 6, 3])) == "3.67"

    def test_single_value(self):
        assert average_scores([41.5]) == 41.5

    def test_constant_sequence(self):
        assert average_scores([7.25, 7.25, 7.25]) == 7.25

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            average_scores([])


class TestRounding:
    @pytest.mark.parametrize(
        "value,expected", [(3.665, 3.67), (3.664, 3.66), (2.5, 2.5), (79.985, 79.99)]
    )
    def test_half_up(self, value, expected):
        assert round_half_up(value) == expected


class TestRendering:
    def test_line_format(self):
        gold = corpus_with_tags(["N", "V"])
        pred = corpus_with_tags(["N", "N"])
        text = render_report(evaluate(gold, pred), "line")
        lines = text.split("\n")
        assert len(lines) == 2
        label, p, r, f1, g, pr, c = lines[0].split("\t")
        assert label == "N"
        assert (g, pr, c) == ("1", "2", "1")

    def test_table_contains_labels(self):
        gold = corpus_with_tags(["N", "V"])
        text = render_report(evaluate(gold, gold), "table")
        assert "N" in text and "V" in text and "accuracy" in text
