"""Joints: frequent local tag contexts mined per syntactic tag.

A joint pairs a target tag with the tags immediately to its left and right
(``<s>``/``</s>`` at sentence edges). Contexts are kept when they are both
common enough relative to the target's occurrences (error margin) and
frequent enough in absolute terms (absolute margin). Longer matching
contexts score higher when ranking readings.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence, TextIO

from app.corpus import Corpus, Reading, resolved_tags
from app.errors import EmptyCorpus, LineError, PatternError
from app.tagset import BOS, EOS, MalformedTag, Tag, parse_tag

LOGGER = logging.getLogger(__name__)

ALGORITHMS = ("exhaustive", "incremental")
DEFAULT_ERROR_MARGIN = 0.01
DEFAULT_ABSOLUTE_MARGIN = 5
DEFAULT_MAX_LEN = 4
DEFAULT_ALGORITHM = "incremental"
# Both algorithms yield the same DB under uniform thresholds; stored DBs
# carry this name so exhaustive and incremental builds render identically.
CANONICAL_ALGORITHM = "incremental"

ContextKey = tuple[tuple[str, ...], tuple[str, ...]]


class InvalidJointParams(PatternError, ValueError):
    code = "InvalidJointParams"


class MalformedJointFile(LineError, ValueError):
    code = "MalformedJointFile"


class PrefixClosureViolation(LineError):
    code = "PrefixClosureViolation"


@dataclass(frozen=True)
class JointParams:
    error_margin: float = DEFAULT_ERROR_MARGIN
    absolute_margin: int = DEFAULT_ABSOLUTE_MARGIN
    max_len: int = DEFAULT_MAX_LEN
    algorithm: str = DEFAULT_ALGORITHM

    def __post_init__(self) -> None:
        if not 0.0 <= self.error_margin <= 1.0:
            raise InvalidJointParams(
                f"error_margin must be within [0, 1], got {self.error_margin}"
            )
        if self.absolute_margin < 1:
            raise InvalidJointParams(
                f"absolute_margin must be at least 1, got {self.absolute_margin}"
            )
        if self.max_len < 1:
            raise InvalidJointParams(f"max_len must be at least 1, got {self.max_len}")
        if self.algorithm not in ALGORITHMS:
            raise InvalidJointParams(
                f"algorithm must be one of {', '.join(ALGORITHMS)}, got {self.algorithm!r}"
            )
        object.__setattr__(self, "error_margin", float(self.error_margin))


@dataclass(frozen=True)
class TrainingEvent:
    target: Tag
    left: tuple[str, ...]
    right: tuple[str, ...]


@dataclass(frozen=True)
class Joint:
    """``left`` lists its innermost item last, ``right`` its innermost first."""

    target: Tag
    left: tuple[str, ...]
    right: tuple[str, ...]
    support: int
    freq: float

    @property
    def length(self) -> int:
        return len(self.left) + len(self.right)

    @property
    def context(self) -> ContextKey:
        return (self.left, self.right)


@dataclass(frozen=True)
class JointDB:
    params: JointParams
    joints: Mapping[Tag, tuple[Joint, ...]] = field(default_factory=dict)
    target_counts: Mapping[Tag, int] = field(default_factory=dict)

    @classmethod
    def empty(cls, params: JointParams | None = None) -> "JointDB":
        return cls(params or JointParams(algorithm=CANONICAL_ALGORITHM))

    @cached_property
    def contexts(self) -> dict[Tag, frozenset[ContextKey]]:
        return {
            target: frozenset(joint.context for joint in joints)
            for target, joints in self.joints.items()
        }

    def __len__(self) -> int:
        return sum(len(joints) for joints in self.joints.values())

    def all_joints(self) -> Iterator[Joint]:
        for target in sorted(self.joints):
            yield from self.joints[target]


def windows(
    tags: Sequence[str], position: int, max_len: int
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Up to ``max_len`` neighbours on each side, padded with ``<s>``/``</s>``."""

    tags = tuple(tags)
    if position < max_len:
        left = (BOS,) + tags[:position]
    else:
        left = tags[position - max_len : position]
    end = position + 1 + max_len
    right = tags[position + 1 : end]
    if end > len(tags):
        right += (EOS,)
    return left, right


def _contexts(
    left: tuple[str, ...], right: tuple[str, ...], length: int
) -> Iterator[ContextKey]:
    """Every (left suffix, right prefix) split of total ``length``, longest left first."""

    for left_len in range(min(length, len(left)), max(0, length - len(right)) - 1, -1):
        yield (left[len(left) - left_len :], right[: length - left_len])


def training_events(corpus: Corpus, max_len: int = DEFAULT_MAX_LEN) -> Iterator[TrainingEvent]:
    """One event per token: its tag and the neighbouring tags in a disambiguated corpus."""

    for sentence in corpus.sentences:
        tags = resolved_tags(sentence)
        for position, tag in enumerate(tags):
            left, right = windows(tags, position, max_len)
            yield TrainingEvent(tag, left, right)


def _passes(support: int, total: int, params: JointParams) -> bool:
    return support >= params.absolute_margin and support / total >= params.error_margin


def _select(
    counts: Mapping[Tag, Counter], target_counts: Mapping[Tag, int], params: JointParams
) -> dict[Tag, dict[ContextKey, int]]:
    selected: dict[Tag, dict[ContextKey, int]] = {}
    for target, contexts in counts.items():
        total = target_counts[target]
        kept = {
            context: support
            for context, support in contexts.items()
            if _passes(support, total, params)
        }
        if kept:
            selected[target] = kept
    return selected


def _assemble(
    selected: Mapping[Tag, Mapping[ContextKey, int]],
    target_counts: Mapping[Tag, int],
    params: JointParams,
) -> JointDB:
    joints: dict[Tag, tuple[Joint, ...]] = {}
    for target in sorted(selected):
        total = target_counts[target]
        ordered = sorted(
            selected[target].items(),
            key=lambda item: (len(item[0][0]) + len(item[0][1]), item[0]),
        )
        joints[target] = tuple(
            Joint(target, left, right, support, support / total)
            for (left, right), support in ordered
        )
    stored = replace(params, algorithm=CANONICAL_ALGORITHM)
    db = JointDB(stored, joints, dict(sorted(target_counts.items())))
    for target, target_joints in db.joints.items():
        LOGGER.info("Joints for %s: %d", target, len(target_joints))
    return db


def _training_set(corpus: Corpus, params: JointParams) -> tuple[list[TrainingEvent], Counter]:
    if not corpus.sentences:
        raise EmptyCorpus()
    events = list(training_events(corpus, params.max_len))
    return events, Counter(event.target for event in events)


def generate_joints_exhaustive(corpus: Corpus, params: JointParams) -> JointDB:
    """Count every realised context of every length, then filter once."""

    events, target_counts = _training_set(corpus, params)
    counts: dict[Tag, Counter] = defaultdict(Counter)
    for event in events:
        counter = counts[event.target]
        for length in range(1, params.max_len + 1):
            counter.update(_contexts(event.left, event.right, length))
    return _assemble(_select(counts, target_counts, params), target_counts, params)


def generate_joints_incremental(corpus: Corpus, params: JointParams) -> JointDB:
    """Select length-1 contexts, then lengthen the selected ones a word at a time."""

    events, target_counts = _training_set(corpus, params)
    counts: dict[Tag, Counter] = defaultdict(Counter)
    for event in events:
        counts[event.target].update(_contexts(event.left, event.right, 1))
    level = _select(counts, target_counts, params)
    selected: dict[Tag, dict[ContextKey, int]] = {
        target: dict(contexts) for target, contexts in level.items()
    }

    for length in range(2, params.max_len + 1):
        if not level:
            break
        counts = defaultdict(Counter)
        for event in events:
            parents = level.get(event.target)
            if not parents:
                continue
            for left, right in _contexts(event.left, event.right, length):
                if (left and (left[1:], right) in parents) or (
                    right and (left, right[:-1]) in parents
                ):
                    counts[event.target][(left, right)] += 1
        level = _select(counts, target_counts, params)
        for target, contexts in level.items():
            selected.setdefault(target, {}).update(contexts)

    return _assemble(selected, target_counts, params)


def generate_joints(corpus: Corpus, params: JointParams) -> JointDB:
    if params.algorithm == "exhaustive":
        return generate_joints_exhaustive(corpus, params)
    return generate_joints_incremental(corpus, params)


# --------------------------------------------------------------------------
# matching and scoring


def context_match_length(db: JointDB, tags: Sequence[str], position: int) -> int:
    contexts = db.contexts.get(tags[position])
    if not contexts:
        return 0
    left, right = windows(tags, position, db.params.max_len)
    for length in range(min(db.params.max_len, len(left) + len(right)), 0, -1):
        for context in _contexts(left, right, length):
            if context in contexts:
                return length
    return 0


def longest_context_match(db: JointDB, reading: Reading, position: int) -> int:
    """Length of the longest stored context around ``position``; 0 when none."""

    if not 0 <= position < len(reading.tags):
        raise IndexError(f"position {position} outside a reading of {len(reading.tags)} tags")
    return context_match_length(db, reading.tags, position)


def score_reading(db: JointDB, reading: Reading) -> int:
    """Sum of the longest context match over every position."""

    return sum(
        context_match_length(db, reading.tags, position)
        for position in range(len(reading.tags))
    )


# --------------------------------------------------------------------------
# invariants and text format


def _parents(joint: Joint) -> list[ContextKey]:
    parents = []
    if joint.left:
        parents.append((joint.left[1:], joint.right))
    if joint.right:
        parents.append((joint.left, joint.right[:-1]))
    return parents


def check_prefix_closure(db: JointDB) -> None:
    """Every joint longer than 1 needs a stored joint one item shorter."""

    for joint in db.all_joints():
        if joint.length < 2:
            continue
        contexts = db.contexts[joint.target]
        if not any(parent in contexts for parent in _parents(joint)):
            raise PrefixClosureViolation(
                f"joint {joint_text(joint)!r} has no stored shorter context"
            )



def joint_text(joint: Joint) -> str:
    return " ".join(
        ["JOINT", joint.target, ":", *joint.left, "_", *joint.right, "|", "COUNT", str(joint.support)]
    )


def render_joint_db(db: JointDB) -> str:
    params = db.params
    lines = [
        f"PARAMS error_margin={params.error_margin!r} absolute_margin={params.absolute_margin} "
        f"max_len={params.max_len} algorithm={params.algorithm}"
    ]
    lines.extend(f"TARGETCOUNT {tag} {count}" for tag, count in sorted(db.target_counts.items()))
    lines.extend(joint_text(joint) for joint in db.all_joints())
    return "\n".join(lines) + "\n"


def dump_joint_db(db: JointDB, stream: TextIO) -> None:
    stream.write(render_joint_db(db))


def _parse_params(words: list[str], line: int) -> JointParams:
    values: dict[str, str] = {}
    for word in words[1:]:
        key, sep, value = word.partition("=")
        if not sep:
            raise MalformedJointFile(f"expected key=value, found {word!r}", line=line)
        values[key] = value
    expected = {"error_margin", "absolute_margin", "max_len", "algorithm"}
    if set(values) != expected:
        raise MalformedJointFile(
            "PARAMS needs exactly " + ", ".join(sorted(expected)), line=line
        )
    try:
        return JointParams(
            error_margin=float(values["error_margin"]),
            absolute_margin=int(values["absolute_margin"]),
            max_len=int(values["max_len"]),
            algorithm=values["algorithm"],
        )
    except (ValueError, InvalidJointParams) as exc:
        raise MalformedJointFile(str(exc), line=line) from exc


def _parse_context_item(word: str, line: int) -> str:
    if word in (BOS, EOS):
        return word
    try:
        return parse_tag(word)
    except MalformedTag as exc:
        raise MalformedJointFile(str(exc), line=line) from exc


def _parse_joint_line(words: list[str], line: int) -> tuple[Tag, ContextKey, int]:
    try:
        target_gap = words.index("_")
        bar = words.index("|")
    except ValueError as exc:
        raise MalformedJointFile("JOINT line needs '_' and '|'", line=line) from exc
    if (
        len(words) != bar + 3
        or words[2] != ":"
        or not 3 <= target_gap < bar
        or words[bar + 1] != "COUNT"
    ):
        raise MalformedJointFile(
            "expected 'JOINT <tag> : <left> _ <right> | COUNT <n>'", line=line
        )
    target = _parse_context_item(words[1], line)
    if target in (BOS, EOS):
        raise MalformedJointFile("a boundary symbol cannot be a target", line=line)
    left = tuple(_parse_context_item(word, line) for word in words[3:target_gap])
    right = tuple(_parse_context_item(word, line) for word in words[target_gap + 1 : bar])
    if BOS in left[1:] or EOS in left or EOS in right[:-1] or BOS in right:
        raise MalformedJointFile(
            "<s> may only open the left context and </s> only close the right", line=line
        )
    try:
        support = int(words[bar + 2])
    except ValueError as exc:
        raise MalformedJointFile(f"count {words[bar + 2]!r} is not an integer", line=line) from exc
    return target, (left, right), support


def load_joint_db(stream: TextIO) -> JointDB:
    """Parse a .jdb file; frequencies are re-derived from the counts."""

    params: JointParams | None = None
    target_counts: dict[Tag, int] = {}
    parsed: list[tuple[int, Tag, ContextKey, int]] = []
    for line_number, raw_line in enumerate(stream, start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        words = line.split()
        keyword = words[0]
        if keyword == "PARAMS":
            if params is not None:
                raise MalformedJointFile("duplicate PARAMS line", line=line_number)
            params = _parse_params(words, line_number)
        elif keyword == "TARGETCOUNT":
            if len(words) != 3:
                raise MalformedJointFile("expected 'TARGETCOUNT <tag> <n>'", line=line_number)
            tag = _parse_context_item(words[1], line_number)
            if tag in target_counts:
                raise MalformedJointFile(f"duplicate TARGETCOUNT for {tag!r}", line=line_number)
            try:
                target_counts[tag] = int(words[2])
            except ValueError as exc:
                raise MalformedJointFile(f"count {words[2]!r} is not an integer", line=line_number) from exc
            if target_counts[tag] < 1:
                raise MalformedJointFile("target counts must be positive", line=line_number)
        elif keyword == "JOINT":
            parsed.append((line_number, *_parse_joint_line(words, line_number)))
        else:
            raise MalformedJointFile(f"unknown keyword {keyword!r}", line=line_number)
    if params is None:
        raise MalformedJointFile("missing PARAMS line")

    selected: dict[Tag, dict[ContextKey, int]] = defaultdict(dict)
    for line_number, target, context, support in parsed:
        total = target_counts.get(target)
        if total is None:
            raise MalformedJointFile(f"no TARGETCOUNT for {target!r}", line=line_number)
        length = len(context[0]) + len(context[1])
        if not 1 <= length <= params.max_len:
            raise MalformedJointFile(
                f"context length {length} outside 1..{params.max_len}", line=line_number
            )
        if support > total or not _passes(support, total, params):
            raise MalformedJointFile(
                f"count {support} of {total} does not meet the margins", line=line_number
            )
        if context in selected[target]:
            raise MalformedJointFile("duplicate joint", line=line_number)
        selected[target][context] = support

    joints = {
        target: tuple(
            Joint(target, left, right, support, support / target_counts[target])
            for (left, right), support in sorted(
                contexts.items(), key=lambda item: (len(item[0][0]) + len(item[0][1]), item[0])
            )
        )
        for target, contexts in sorted(selected.items())
    }
    db = JointDB(params, joints, dict(sorted(target_counts.items())))
    check_prefix_closure(db)
    return db


__all__ = [
    "ALGORITHMS",
    "CANONICAL_ALGORITHM",
    "DEFAULT_ABSOLUTE_MARGIN",
    "DEFAULT_ALGORITHM",
    "DEFAULT_ERROR_MARGIN",
    "DEFAULT_MAX_LEN",
    "InvalidJointParams",
    "Joint",
    "JointDB",
    "JointParams",
    "MalformedJointFile",
    "PrefixClosureViolation",
    "TrainingEvent",
    "check_prefix_closure",
    "context_match_length",
    "dump_joint_db",
    "generate_joints",
    "generate_joints_exhaustive",
    "generate_joints_incremental",
    "joint_text",
    "load_joint_db",
    "longest_context_match",
    "render_joint_db",
    "score_reading",
    "training_events",
    "windows",
]
