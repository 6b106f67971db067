"""Success rates and per-text evaluation reports."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import pandas as pd

from app.corpus import Corpus, Sentence, Token, resolved_tag
from app.errors import PatternError

LOGGER = logging.getLogger(__name__)

TOTAL_ROW = "total"
REPORT_COLUMNS = ["text", "words", "ambiguity", "errors", "success"]


class AlignmentMismatch(PatternError):
    """Raised when predicted and gold corpora disagree on sentences or tokens."""

    code = "AlignmentMismatch"

    def __init__(self, sentence_id: str, position: int | None, detail: str):
        self.sentence_id = sentence_id
        self.position = position
        where = f"sentence {sentence_id!r}"
        if position is not None:
            where += f" token {position}"
        super().__init__(f"{where}: {detail}")


@dataclass(frozen=True)
class EvalSample:
    name: str
    pred: Corpus
    gold: Corpus
    source: Corpus | None = None


@dataclass(frozen=True)
class Tally:
    words: int
    correct: int
    ambiguous: int | None = None
    errors: int | None = None

    @property
    def success_rate(self) -> float:
        return self.correct / self.words if self.words else 1.0

    @property
    def ambiguity_rate(self) -> float | None:
        if self.ambiguous is None:
            return None
        return self.ambiguous / self.words if self.words else 0.0

    @property
    def error_rate(self) -> float | None:
        if self.errors is None:
            return None
        return self.errors / self.words if self.words else 0.0


@dataclass(frozen=True)
class ReportRow:
    text: str
    tally: Tally


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[ReportRow, ...]
    total: ReportRow


def _aligned_tokens(
    pred: Corpus, gold: Corpus, *, include_punct: bool
) -> Iterator[tuple[Sentence, int, Token, Sentence]]:
    if len(pred.sentences) != len(gold.sentences):
        shorter = pred if len(pred.sentences) < len(gold.sentences) else gold
        longer = gold if shorter is pred else pred
        missing = longer.sentences[len(shorter.sentences)]
        raise AlignmentMismatch(
            missing.id,
            None,
            f"{len(pred.sentences)} predicted vs {len(gold.sentences)} gold sentences",
        )
    for pred_sentence, gold_sentence in zip(pred.sentences, gold.sentences):
        if pred_sentence.id != gold_sentence.id:
            raise AlignmentMismatch(
                gold_sentence.id, None, f"predicted sentence is {pred_sentence.id!r}"
            )
        if len(pred_sentence) != len(gold_sentence):
            position = min(len(pred_sentence), len(gold_sentence))
            raise AlignmentMismatch(
                gold_sentence.id,
                position,
                f"{len(pred_sentence)} predicted vs {len(gold_sentence)} gold tokens",
            )
        for position, (pred_token, gold_token) in enumerate(
            zip(pred_sentence.tokens, gold_sentence.tokens)
        ):
            if pred_token.form != gold_token.form:
                raise AlignmentMismatch(
                    gold_sentence.id,
                    position,
                    f"word {pred_token.form!r} does not match gold {gold_token.form!r}",
                )
            if gold_token.is_punct and not include_punct:
                continue
            yield pred_sentence, position, pred_token, gold_sentence


def _tally(pred: Corpus, gold: Corpus, *, include_punct: bool = False) -> Tally:
    words = correct = 0
    for pred_sentence, position, pred_token, gold_sentence in _aligned_tokens(
        pred, gold, include_punct=include_punct
    ):
        if pred_token.is_ambiguous:
            raise AlignmentMismatch(
                pred_sentence.id, position, "predicted token is still ambiguous"
            )
        words += 1
        if pred_token.candidates[0] == resolved_tag(gold_sentence, position):
            correct += 1
    return Tally(words, correct)


def success_rate(pred: Corpus, gold: Corpus, *, include_punct: bool = False) -> float:
    """Fraction of tokens whose predicted tag equals the gold tag."""

    return _tally(pred, gold, include_punct=include_punct).success_rate


def _sample_tally(sample: EvalSample, include_punct: bool) -> Tally:
    tally = _tally(sample.pred, sample.gold, include_punct=include_punct)
    if sample.source is None:
        return tally
    # The parser input supplies the ambiguity and error columns.
    ambiguous = errors = 0
    for _, position, source_token, gold_sentence in _aligned_tokens(
        sample.source, sample.gold, include_punct=include_punct
    ):
        if source_token.is_ambiguous:
            ambiguous += 1
        if resolved_tag(gold_sentence, position) not in source_token.candidates:
            errors += 1
    return Tally(tally.words, tally.correct, ambiguous, errors)


def _sum_optional(values: Iterable[int | None]) -> int | None:
    total = 0
    for value in values:
        if value is None:
            return None
        total += value
    return total


def build_report(samples: Sequence[EvalSample], *, include_punct: bool = False) -> EvalReport:
    """One row per sample plus a micro-averaged total row."""

    rows = tuple(
        ReportRow(sample.name, _sample_tally(sample, include_punct)) for sample in samples
    )
    tallies = [row.tally for row in rows]
    total = Tally(
        words=sum(t.words for t in tallies),
        correct=sum(t.correct for t in tallies),
        ambiguous=_sum_optional(t.ambiguous for t in tallies),
        errors=_sum_optional(t.errors for t in tallies),
    )
    return EvalReport(rows, ReportRow(TOTAL_ROW, total))


def split_by_text(corpus: Corpus) -> list[tuple[str, Corpus]]:
    """Group sentences by their ``# text=`` sample, in order of first appearance."""

    groups: dict[str, list[Sentence]] = {}
    for sentence in corpus.sentences:
        groups.setdefault(sentence.text or corpus.name, []).append(sentence)
    return [
        (name, Corpus(name=name, sentences=tuple(sentences)))
        for name, sentences in groups.items()
    ]


def samples_by_text(
    pred: Corpus, gold: Corpus, source: Corpus | None = None
) -> list[EvalSample]:
    """Split aligned corpora into one sample per text of the gold corpus."""

    # Alignment errors should name the first mismatch, before any grouping.
    for _ in _aligned_tokens(pred, gold, include_punct=True):
        pass
    pred_by_id = {sentence.id: sentence for sentence in pred.sentences}
    source_by_id = (
        {sentence.id: sentence for sentence in source.sentences}
        if source is not None
        else None
    )
    samples = []
    for name, gold_part in split_by_text(gold):
        ids = [sentence.id for sentence in gold_part.sentences]
        pred_part = Corpus(name, tuple(pred_by_id[i] for i in ids))
        source_part = None
        if source_by_id is not None:
            try:
                source_part = Corpus(name, tuple(source_by_id[i] for i in ids))
            except KeyError as exc:
                raise AlignmentMismatch(exc.args[0], None, "missing from the input") from exc
        samples.append(EvalSample(name, pred_part, gold_part, source_part))
    return samples


def _percent(value: float | None) -> str:
    return "n/a" if value is None else f"{value * 100:.1f}%"


def report_frame(report: EvalReport) -> pd.DataFrame:
    records = [
        {
            "text": row.text,
            "words": row.tally.words,
            "ambiguity": _percent(row.tally.ambiguity_rate),
            "errors": _percent(row.tally.error_rate),
            "success": _percent(row.tally.success_rate),
        }
        for row in (*report.rows, report.total)
    ]
    return pd.DataFrame.from_records(records, columns=REPORT_COLUMNS)


def render_report(report: EvalReport) -> str:
    return report_frame(report).to_string(index=False) + "\n"


def render_report_csv(report: EvalReport) -> str:
    return report_frame(report).to_csv(index=False, lineterminator="\n")


class InvalidParserName(PatternError, ValueError):
    code = "InvalidParserName"


@dataclass(frozen=True)
class Comparison:
    """Reports of several parsers over the same gold corpus, row for row."""

    parsers: tuple[str, ...]
    reports: tuple[EvalReport, ...]


def compare_parsers(
    gold: Corpus,
    predictions: Sequence[tuple[str, Corpus]],
    *,
    source: Corpus | None = None,
    by_text: bool = False,
    include_punct: bool = False,
) -> Comparison:
    names = [name for name, _ in predictions]
    if not names:
        raise InvalidParserName("at least one parser output is needed")
    seen: set[str] = set()
    for name in names:
        if not name or name in REPORT_COLUMNS[:-1]:
            raise InvalidParserName(f"{name!r} cannot name a parser column")
        if name in seen:
            raise InvalidParserName(f"parser {name!r} is given twice")
        seen.add(name)

    reports = []
    for name, pred in predictions:
        if by_text:
            samples = samples_by_text(pred, gold, source)
        else:
            samples = [EvalSample(gold.name, pred, gold, source)]
        report = build_report(samples, include_punct=include_punct)
        total = report.total.tally
        LOGGER.debug("Parser %s: %d/%d correct", name, total.correct, total.words)
        reports.append(report)
    return Comparison(tuple(names), tuple(reports))


def comparison_frame(comparison: Comparison) -> pd.DataFrame:
    """The report columns with ``success`` replaced by one column per parser."""

    frame = report_frame(comparison.reports[0]).drop(columns="success")
    for name, report in zip(comparison.parsers, comparison.reports):
        frame[name] = report_frame(report)["success"]
    return frame


def render_comparison(comparison: Comparison) -> str:
    return comparison_frame(comparison).to_string(index=False) + "\n"


def render_comparison_csv(comparison: Comparison) -> str:
    return comparison_frame(comparison).to_csv(index=False, lineterminator="\n")


__all__ = [
    "AlignmentMismatch",
    "Comparison",
    "EvalReport",
    "EvalSample",
    "InvalidParserName",
    "ReportRow",
    "Tally",
    "build_report",
    "compare_parsers",
    "comparison_frame",
    "render_comparison",
    "render_comparison_csv",
    "render_report",
    "render_report_csv",
    "report_frame",
    "samples_by_text",
    "split_by_text",
    "success_rate",
]
