"""Vertical (.vrt) corpus model and I/O.

One token per line: ``form<TAB>cand1/cand2/...[<TAB>gold]``. A blank line
ends a sentence. ``# id=<string>`` names the next sentence and
``# text=<name>`` sets the sample the following sentences belong to; any
other line starting with ``#`` (and containing no TAB) is a comment.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Literal, TextIO

from app.errors import LineError, MissingGold, PatternError
from app.tagset import PUNCT, Tag, TagInventory, MalformedTag, parse_tag

LOGGER = logging.getLogger(__name__)

ReadMode = Literal["gold", "ambiguous"]

_ID_DIRECTIVE = "id="
_TEXT_DIRECTIVE = "text="


class MalformedLine(LineError, ValueError):
    code = "MalformedLine"


class EmptySentence(LineError):
    code = "EmptySentence"


class GoldModeAmbiguity(LineError):
    code = "GoldModeAmbiguity"


class UnknownTag(LineError):
    code = "UnknownTag"


class DuplicateSentenceId(LineError):
    code = "DuplicateSentenceId"


class TooManyReadings(PatternError):
    """Raised when a sentence has more readings than the configured cap."""

    code = "TooManyReadings"

    def __init__(self, product_size: int, cap: int, *, sentence_id: str | None = None):
        self.product_size = product_size
        self.cap = cap
        self.sentence_id = sentence_id
        where = f"sentence {sentence_id!r}: " if sentence_id else ""
        super().__init__(f"{where}{product_size} readings exceed the cap of {cap}")


@dataclass(frozen=True)
class Token:
    form: str
    candidates: tuple[Tag, ...]
    gold: Tag | None = None

    def __post_init__(self) -> None:
        if not self.candidates:
            raise ValueError(f"token {self.form!r} has no candidate tags")
        if len(set(self.candidates)) != len(self.candidates):
            raise ValueError(f"token {self.form!r} repeats a candidate tag")

    @property
    def is_ambiguous(self) -> bool:
        return len(self.candidates) > 1

    @property
    def is_punct(self) -> bool:
        return self.candidates == (PUNCT,)


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[Token, ...]
    text: str | None = None

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError(f"sentence {self.id!r} has no tokens")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def reading_count(self) -> int:
        return math.prod(len(token.candidates) for token in self.tokens)


@dataclass(frozen=True)
class Reading:
    """One tag per token; ``choices`` are the candidate indices picked."""

    tags: tuple[Tag, ...]
    choices: tuple[int, ...] = field(default=(), compare=False)

    def __len__(self) -> int:
        return len(self.tags)


@dataclass(frozen=True)
class Corpus:
    name: str
    sentences: tuple[Sentence, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for sentence in self.sentences:
            if sentence.id in seen:
                raise DuplicateSentenceId(f"duplicate sentence id {sentence.id!r}")
            seen.add(sentence.id)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)

    @property
    def token_count(self) -> int:
        return sum(len(sentence) for sentence in self.sentences)


@dataclass(frozen=True)
class CorpusStats:
    word_count: int
    ambiguous_count: int
    error_count: int | None
    ambiguity_rate: float
    error_rate: float | None


def resolved_tag(sentence: Sentence, position: int) -> Tag:
    """Gold tag, else the single candidate of a disambiguated token."""

    token = sentence.tokens[position]
    if token.gold is not None:
        return token.gold
    if len(token.candidates) == 1:
        return token.candidates[0]
    raise MissingGold(sentence.id, position)


def resolved_tags(sentence: Sentence) -> tuple[Tag, ...]:
    return tuple(resolved_tag(sentence, index) for index in range(len(sentence)))


def gold_reading(sentence: Sentence) -> Reading:
    """The gold tags as a reading; requires an explicit gold tag on every token."""

    tags: list[Tag] = []
    for position, token in enumerate(sentence.tokens):
        if token.gold is None:
            raise MissingGold(sentence.id, position)
        tags.append(token.gold)
    return Reading(tuple(tags))


def _parse_token_line(
    line: str,
    line_number: int,
    mode: ReadMode,
    inventory: TagInventory | None,
) -> Token:
    columns = line.split("\t")
    if len(columns) not in (2, 3):
        raise MalformedLine(
            f"expected 2 or 3 TAB-separated columns, found {len(columns)}",
            line=line_number,
        )
    form = columns[0]
    if not form.strip():
        raise MalformedLine("empty word form", line=line_number)

    try:
        candidates = tuple(parse_tag(text) for text in columns[1].split("/"))
        gold = (
            parse_tag(columns[2]) if len(columns) == 3 and columns[2].strip() else None
        )
    except MalformedTag as exc:
        raise MalformedLine(str(exc), line=line_number) from exc

    if len(set(candidates)) != len(candidates):
        raise MalformedLine("duplicate candidate tag", line=line_number)
    if inventory is not None:
        for tag in (*candidates, *((gold,) if gold else ())):
            if tag != PUNCT and tag not in inventory:
                raise UnknownTag(f"tag {tag!r} is not in the inventory", line=line_number)

    if mode == "gold":
        if len(candidates) != 1:
            raise GoldModeAmbiguity(
                f"{len(candidates)} candidates in a gold corpus", line=line_number
            )
        if gold is not None and gold != candidates[0]:
            raise MalformedLine(
                f"gold column {gold!r} disagrees with tag {candidates[0]!r}",
                line=line_number,
            )
        gold = candidates[0]
    return Token(form=form, candidates=candidates, gold=gold)


def read_corpus(
    stream: TextIO,
    mode: ReadMode = "ambiguous",
    *,
    name: str = "corpus",
    inventory: TagInventory | None = None,
) -> Corpus:
    """Parse a vertical-format corpus.

    In ``gold`` mode every token must carry exactly one tag, which also
    becomes its gold tag. In ``ambiguous`` mode the optional third column is
    the gold tag (it need not be among the candidates).
    """

    if mode not in ("gold", "ambiguous"):
        raise ValueError(f"unknown read mode {mode!r}")

    sentences: list[Sentence] = []
    seen_ids: set[str] = set()
    tokens: list[Token] = []
    pending_id: str | None = None
    pending_id_line = 0
    current_text: str | None = None
    line_number = 0

    def close_sentence() -> None:
        nonlocal tokens, pending_id
        if not tokens:
            return
        sentence_id = pending_id or f"s{len(sentences) + 1}"
        if sentence_id in seen_ids:
            raise DuplicateSentenceId(
                f"duplicate sentence id {sentence_id!r}", line=line_number
            )
        seen_ids.add(sentence_id)
        sentences.append(Sentence(id=sentence_id, tokens=tuple(tokens), text=current_text))
        tokens = []
        pending_id = None

    for line_number, raw_line in enumerate(stream, start=1):
        line = raw_line.rstrip("\r\n")
        if "\t" in line:
            tokens.append(_parse_token_line(line, line_number, mode, inventory))
            continue
        stripped = line.strip()
        if not stripped:
            close_sentence()
            continue
        if not stripped.startswith("#"):
            raise MalformedLine("token line without a TAB separator", line=line_number)
        directive = stripped[1:].strip()
        if directive.startswith(_ID_DIRECTIVE):
            close_sentence()
            if pending_id is not None:
                raise EmptySentence(
                    f"sentence {pending_id!r} has no tokens", line=pending_id_line
                )
            pending_id = directive[len(_ID_DIRECTIVE):].strip()
            pending_id_line = line_number
            if not pending_id:
                raise MalformedLine("empty sentence id", line=line_number)
        elif directive.startswith(_TEXT_DIRECTIVE):
            close_sentence()
            current_text = directive[len(_TEXT_DIRECTIVE):].strip() or None
    close_sentence()
    if pending_id is not None:
        raise EmptySentence(f"sentence {pending_id!r} has no tokens", line=pending_id_line)

    LOGGER.debug("Read %d sentences from %s", len(sentences), name)
    return Corpus(name=name, sentences=tuple(sentences))


def write_corpus(corpus: Corpus, stream: TextIO, *, include_gold: bool = False) -> None:
    """Write ``corpus`` in vertical format; the output is byte-stable."""

    current_text: str | None = None
    for sentence in corpus.sentences:
        if sentence.text != current_text:
            stream.write(f"# text={sentence.text or ''}\n")
            current_text = sentence.text
        stream.write(f"# id={sentence.id}\n")
        for token in sentence.tokens:
            columns = [token.form, "/".join(token.candidates)]
            if include_gold and token.gold is not None:
                columns.append(token.gold)
            stream.write("\t".join(columns) + "\n")
        stream.write("\n")


def enumerate_readings(sentence: Sentence, cap: int) -> Iterator[Reading]:
    """Yield every reading, leftmost token varying slowest.

    Raises :class:`TooManyReadings` before yielding anything when the
    candidate product exceeds ``cap``.
    """

    if cap < 1:
        raise ValueError("reading cap must be at least 1")
    size = sentence.reading_count
    if size > cap:
        raise TooManyReadings(size, cap, sentence_id=sentence.id)
    index_ranges = [range(len(token.candidates)) for token in sentence.tokens]
    candidates = [token.candidates for token in sentence.tokens]
    for choices in itertools.product(*index_ranges):
        yield Reading(
            tags=tuple(candidates[i][choice] for i, choice in enumerate(choices)),
            choices=choices,
        )


def reading_is_valid(sentence: Sentence, reading: Reading) -> bool:
    return len(reading.tags) == len(sentence.tokens) and all(
        tag in token.candidates for tag, token in zip(reading.tags, sentence.tokens)
    )


def apply_reading(sentence: Sentence, reading: Reading) -> Sentence:
    """Return ``sentence`` reduced to the reading's single tag per token."""

    tokens = tuple(
        replace(token, candidates=(tag,))
        for token, tag in zip(sentence.tokens, reading.tags)
    )
    return replace(sentence, tokens=tokens)


def corpus_stats(corpus: Corpus, *, include_punct: bool = False) -> CorpusStats:
    """Word count plus ambiguity and error rates.

    The error rate is ``None`` unless every counted token has a gold tag.
    """

    words = ambiguous = errors = 0
    gold_complete = True
    for token in _counted_tokens(corpus.sentences, include_punct):
        words += 1
        if token.is_ambiguous:
            ambiguous += 1
        if token.gold is None:
            gold_complete = False
        elif token.gold not in token.candidates:
            errors += 1
    ambiguity_rate = ambiguous / words if words else 0.0
    if not gold_complete:
        return CorpusStats(words, ambiguous, None, ambiguity_rate, None)
    return CorpusStats(words, ambiguous, errors, ambiguity_rate, errors / words if words else 0.0)


def _counted_tokens(sentences: Iterable[Sentence], include_punct: bool) -> Iterator[Token]:
    for sentence in sentences:
        for token in sentence.tokens:
            if include_punct or not token.is_punct:
                yield token


__all__ = [
    "Corpus",
    "CorpusStats",
    "DuplicateSentenceId",
    "EmptySentence",
    "GoldModeAmbiguity",
    "MalformedLine",
    "Reading",
    "Sentence",
    "Token",
    "TooManyReadings",
    "UnknownTag",
    "apply_reading",
    "corpus_stats",
    "enumerate_readings",
    "gold_reading",
    "read_corpus",
    "reading_is_valid",
    "resolved_tag",
    "resolved_tags",
    "write_corpus",
]
