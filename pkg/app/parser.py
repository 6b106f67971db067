"""Two-stage disambiguation: axis filtering, then joint ranking.

Readings are enumerated from the candidate lattice, filtered layer by layer
(strictest first, skipping a layer that accepts none of the current readings)
and the survivors are ranked by their joint score. Ties go to the reading
whose candidate indices are lexicographically smallest.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

from app.axis import (
    GAP,
    AxisDB,
    AxisElement,
    ProjectionItem,
    Sym,
    project_sentence,
    projection_keys,
    strictness_order,
)
from app.corpus import Reading, Sentence, TooManyReadings, enumerate_readings
from app.errors import PatternError
from app.joint import JointDB, context_match_length, score_reading
from app.tagset import BOS, EOS, Tag

LOGGER = logging.getLogger(__name__)

DEFAULT_READING_CAP = 100_000
ORACLE_READING_CAP = 64


class EmptyReadingSet(PatternError, ValueError):
    code = "EmptyReadingSet"

    def __init__(self) -> None:
        super().__init__("cannot rank an empty set of readings")


class InvalidDisambiguationConfig(PatternError, ValueError):
    code = "InvalidDisambiguationConfig"


@dataclass(frozen=True)
class DisambiguationConfig:
    reading_cap: int = DEFAULT_READING_CAP
    strict_gaps: bool = False
    layer_skip: bool = True

    def __post_init__(self) -> None:
        if self.reading_cap < 1:
            raise InvalidDisambiguationConfig(
                f"reading_cap must be at least 1, got {self.reading_cap}"
            )


@dataclass(frozen=True)
class AxisFilterResult:
    readings: tuple[Reading, ...]
    matched_layers: tuple[str, ...]
    fallback_depth: int


@dataclass(frozen=True)
class ParseResult:
    chosen: Reading
    survivors_after_axes: int
    matched_layers: tuple[str, ...]
    score: int
    fallback_depth: int
    joints_only: bool = False


def _tie_key(reading: Reading) -> tuple[int, ...]:
    return reading.choices


def filter_by_axes(
    sentence: Sentence, db: AxisDB, config: DisambiguationConfig | None = None
) -> AxisFilterResult:
    """Narrow the sentence's readings with every axis layer that accepts some of them."""

    config = config or DisambiguationConfig()
    readings = list(enumerate_readings(sentence, config.reading_cap))
    return _filter_readings(readings, db, config)


def _filter_readings(
    readings: list[Reading], db: AxisDB, config: DisambiguationConfig
) -> AxisFilterResult:
    current = readings
    matched: list[str] = []
    layers = strictness_order(db.layers)
    skipped = 0
    for index, layer in enumerate(layers):
        # Many readings share a projection once non-layer tags collapse into gaps.
        verdicts: dict[tuple, bool] = {}
        survivors = []
        for reading in current:
            keys = projection_keys(reading.tags, layer.symbol_map)
            verdict = verdicts.get(keys)
            if verdict is None:
                verdict = layer.accepts(keys, strict_gaps=config.strict_gaps)
                verdicts[keys] = verdict
            if verdict:
                survivors.append(reading)
        if survivors:
            current = survivors
            matched.append(layer.id)
            continue
        if not config.layer_skip:
            skipped += len(layers) - index
            break
        skipped += 1
    return AxisFilterResult(tuple(current), tuple(matched), skipped)


def rank_by_joints(readings: Iterable[Reading], db: JointDB) -> list[tuple[Reading, int]]:
    """Readings with their scores, best first."""

    scored = [(reading, score_reading(db, reading)) for reading in readings]
    if not scored:
        raise EmptyReadingSet()
    scored.sort(key=lambda item: (-item[1], _tie_key(item[0])))
    return scored


def disambiguate(
    sentence: Sentence,
    axes: AxisDB,
    joints: JointDB,
    config: DisambiguationConfig | None = None,
) -> ParseResult:
    config = config or DisambiguationConfig()
    filtered = filter_by_axes(sentence, axes, config)
    chosen, score = rank_by_joints(filtered.readings, joints)[0]
    return ParseResult(
        chosen=chosen,
        survivors_after_axes=len(filtered.readings),
        matched_layers=filtered.matched_layers,
        score=score,
        fallback_depth=filtered.fallback_depth,
    )


def _literal_match_length(db: JointDB, tags: Sequence[Tag], position: int) -> int:
    left_context = (BOS, *tags[:position])
    right_context = (*tags[position + 1 :], EOS)
    best = 0
    for joint in db.joints.get(tags[position], ()):
        if len(joint.left) > len(left_context) or len(joint.right) > len(right_context):
            continue
        if joint.left and left_context[-len(joint.left) :] != joint.left:
            continue
        if right_context[: len(joint.right)] != joint.right:
            continue
        best = max(best, joint.length)
    return best


def _brute_force_ends(
    elements: Sequence[AxisElement],
    projection: Sequence[ProjectionItem],
    start: int,
    optional_gaps: bool,
) -> set[int]:
    """Every projection index where ``elements`` can stop matching from ``start``."""

    positions = {start}
    for element in elements:
        following: set[int] = set()
        for position in positions:
            if isinstance(element, Sym) or element == GAP:
                if position < len(projection) and projection[position] == element:
                    following.add(position + 1)
                if element == GAP and optional_gaps:
                    following.add(position)
                continue
            reached: set[int] = set()
            frontier = {position}
            while frontier:
                fresh = set()
                for point in frontier:
                    for end in _brute_force_ends(element.body, projection, point, True):
                        if end not in reached:
                            reached.add(end)
                            fresh.add(end)
                frontier = fresh
            following |= reached
        positions = following
    return positions


def _brute_force_match(
    elements: Sequence[AxisElement], projection: Sequence[ProjectionItem], strict_gaps: bool
) -> bool:
    return len(projection) in _brute_force_ends(elements, projection, 0, not strict_gaps)


def oracle_disambiguate(
    sentence: Sentence,
    axes: AxisDB,
    joints: JointDB,
    config: DisambiguationConfig | None = None,
) -> ParseResult:
    """Brute-force reference for :func:`disambiguate` on small sentences.

    Every reading is tried against every axis one at a time with a
    position-set matcher of its own and scored by a linear scan over the
    stored joints.
    """

    config = config or DisambiguationConfig()
    cap = min(config.reading_cap, ORACLE_READING_CAP)
    if sentence.reading_count > cap:
        raise TooManyReadings(sentence.reading_count, cap, sentence_id=sentence.id)

    candidates = [token.candidates for token in sentence.tokens]
    current = [
        Reading(tuple(candidates[i][c] for i, c in enumerate(choices)), choices)
        for choices in itertools.product(*(range(len(c)) for c in candidates))
    ]
    matched: list[str] = []
    depth = 0
    layers = strictness_order(axes.layers)
    for index, layer in enumerate(layers):
        survivors = [
            reading
            for reading in current
            if any(
                _brute_force_match(
                    axis.elements, project_sentence(reading, layer), config.strict_gaps
                )
                for axis in layer.axes
            )
        ]
        if survivors:
            current = survivors
            matched.append(layer.id)
        elif config.layer_skip:
            depth += 1
        else:
            depth += len(layers) - index
            break

    best: tuple[Reading, int] | None = None
    for reading in current:
        score = sum(
            _literal_match_length(joints, reading.tags, position)
            for position in range(len(reading.tags))
        )
        if best is None or score > best[1] or (
            score == best[1] and reading.choices < best[0].choices
        ):
            best = (reading, score)
    assert best is not None
    return ParseResult(
        chosen=best[0],
        survivors_after_axes=len(current),
        matched_layers=tuple(matched),
        score=best[1],
        fallback_depth=depth,
    )


def _window_score(db: JointDB, tags: Sequence[Tag], position: int) -> int:
    reach = db.params.max_len
    return sum(
        context_match_length(db, tags, index)
        for index in range(max(0, position - reach), min(len(tags), position + reach + 1))
    )


def resolve_by_joints(sentence: Sentence, joints: JointDB) -> ParseResult:
    """Greedy coordinate ascent on the joint score, used above the reading cap.

    Positions are revisited left to right until no single-token change
    raises the score; equal scores prefer the earlier candidate, so the
    sweep always terminates.
    """

    tags = [token.candidates[0] for token in sentence.tokens]
    choices = [0] * len(tags)
    changed = True
    while changed:
        changed = False
        for position, token in enumerate(sentence.tokens):
            if not token.is_ambiguous:
                continue
            best_choice = choices[position]
            best_score = _window_score(joints, tags, position)
            for choice, tag in enumerate(token.candidates):
                if choice == best_choice:
                    continue
                tags[position] = tag
                score = _window_score(joints, tags, position)
                if score > best_score or (score == best_score and choice < best_choice):
                    best_choice, best_score = choice, score
            if best_choice != choices[position]:
                changed = True
                choices[position] = best_choice
            tags[position] = token.candidates[best_choice]

    chosen = Reading(tuple(tags), tuple(choices))
    return ParseResult(
        chosen=chosen,
        survivors_after_axes=sentence.reading_count,
        matched_layers=(),
        score=score_reading(joints, chosen),
        fallback_depth=0,
        joints_only=True,
    )


__all__ = [
    "AxisFilterResult",
    "DEFAULT_READING_CAP",
    "DisambiguationConfig",
    "EmptyReadingSet",
    "InvalidDisambiguationConfig",
    "ORACLE_READING_CAP",
    "ParseResult",
    "disambiguate",
    "filter_by_axes",
    "oracle_disambiguate",
    "rank_by_joints",
    "resolve_by_joints",
]
