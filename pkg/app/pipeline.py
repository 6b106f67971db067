"""Corpus-level orchestration of the disambiguator."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from app.axis import AxisDB
from app.corpus import Corpus, Sentence, TooManyReadings, apply_reading
from app.joint import JointDB
from app.parser import DisambiguationConfig, ParseResult, disambiguate, resolve_by_joints

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParseRun:
    """Structured details about a completed parse of a corpus."""

    corpus: Corpus
    results: tuple[ParseResult, ...]
    fallback_sentences: tuple[str, ...]
    words: int
    elapsed_seconds: float

    @property
    def words_per_second(self) -> float:
        return self.words / self.elapsed_seconds if self.elapsed_seconds > 0 else 0.0


def parse_sentence(
    sentence: Sentence,
    axes: AxisDB,
    joints: JointDB,
    config: DisambiguationConfig,
) -> ParseResult:
    """Disambiguate one sentence, falling back to joints only above the reading cap."""

    try:
        return disambiguate(sentence, axes, joints, config)
    except TooManyReadings as exc:
        LOGGER.warning("%s; resolving with joints only", exc)
        return resolve_by_joints(sentence, joints)


def parse_corpus(
    corpus: Corpus,
    axes: AxisDB,
    joints: JointDB,
    config: DisambiguationConfig | None = None,
    *,
    threads: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> ParseRun:
    """Parse every sentence; the output keeps the input order whatever ``threads`` is."""

    if threads < 1:
        raise ValueError("threads must be at least 1")
    config = config or DisambiguationConfig()
    started = time.perf_counter()

    def work(sentence: Sentence) -> ParseResult:
        return parse_sentence(sentence, axes, joints, config)

    results: list[ParseResult] = []
    total = len(corpus.sentences)
    with ThreadPoolExecutor(max_workers=threads) as executor:
        for result in executor.map(work, corpus.sentences):
            results.append(result)
            if progress:
                progress(len(results), total)

    sentences = tuple(
        apply_reading(sentence, result.chosen)
        for sentence, result in zip(corpus.sentences, results)
    )
    fallback = tuple(
        sentence.id
        for sentence, result in zip(corpus.sentences, results)
        if result.joints_only
    )
    elapsed = time.perf_counter() - started
    words = corpus.token_count
    if fallback:
        LOGGER.warning(
            "%d sentence(s) exceeded the reading cap and were resolved by joints only",
            len(fallback),
        )
    LOGGER.info(
        "Parsed %d sentences (%d words) in %.2fs", len(sentences), words, elapsed
    )
    return ParseRun(
        corpus=Corpus(name=corpus.name, sentences=sentences),
        results=tuple(results),
        fallback_sentences=fallback,
        words=words,
        elapsed_seconds=elapsed,
    )


__all__ = ["ParseRun", "parse_corpus", "parse_sentence"]
