"""Sentence axes: extraction, generalisation, matching and the .adb format.

An axis lists the order in which the tags of one layer's tag subset appear in
a sentence. ``...`` (a Gap) stands for intervening tokens outside the subset
and ``[ ... ]+`` marks a group that may repeat.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence, TextIO, TypeVar, Union

from app.corpus import Corpus, Reading, Sentence, gold_reading
from app.errors import EmptyCorpus, LineError, PatternError
from app.tagset import (
    EMPTY_CLASS_MAP,
    PUNCT,
    EquivalenceClassMap,
    InvalidClassMap,
    MalformedTag,
    ReservedSymbol,
    Tag,
    TagInventory,
    build_class_map,
    check_not_reserved,
    parse_tag,
    project_symbol,
)

LOGGER = logging.getLogger(__name__)

GAP_TEXT = "..."
REPEAT_OPEN = "["
REPEAT_CLOSE = "]+"


@dataclass(frozen=True)
class Sym:
    symbol: str


@dataclass(frozen=True)
class Gap:
    pass


GAP = Gap()


@dataclass(frozen=True)
class Repeat:
    body: tuple["AxisElement", ...]


AxisElement = Union[Sym, Gap, Repeat]
ProjectionItem = Union[Sym, Gap]
# Projection in matcher form: the projected symbol, or None for a gap.
ProjectionKey = Union[str, None]


class InvalidAxis(PatternError, ValueError):
    code = "InvalidAxis"


class NoSymbolInAxis(InvalidAxis):
    code = "NoSymbolInAxis"

    def __init__(self, layer_id: str, sentence_id: str | None = None):
        self.layer_id = layer_id
        self.sentence_id = sentence_id
        where = f" for sentence {sentence_id!r}" if sentence_id else ""
        super().__init__(f"axis of layer {layer_id!r}{where} contains no tag symbol")


class InvalidLayer(PatternError, ValueError):
    code = "InvalidLayer"


class EmptyLayer(LineError):
    code = "EmptyLayer"


class MalformedAxisFile(LineError, ValueError):
    code = "MalformedAxisFile"


@dataclass(frozen=True)
class Axis:
    layer_id: str
    elements: tuple[AxisElement, ...]


@dataclass(frozen=True)
class LayerConfig:
    """How to build one axis layer."""

    id: str
    tagset: frozenset[Tag]
    eq: EquivalenceClassMap = EMPTY_CLASS_MAP
    priority: int = 0
    generalise: bool = True
    relax: bool = False

    def __post_init__(self) -> None:
        _check_layer_fields(self.id, self.tagset)


@dataclass(frozen=True)
class AxisLayer:
    id: str
    tagset: frozenset[Tag]
    eq: EquivalenceClassMap
    axes: tuple[Axis, ...]
    priority: int = 0
    generalise: bool = True
    relax: bool = False
    _matchers: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        _check_layer_fields(self.id, self.tagset)
        for axis in self.axes:
            if axis.layer_id != self.id:
                raise InvalidAxis(
                    f"axis of layer {axis.layer_id!r} stored in layer {self.id!r}"
                )

    @property
    def config(self) -> LayerConfig:
        return LayerConfig(
            self.id, self.tagset, self.eq, self.priority, self.generalise, self.relax
        )

    @cached_property
    def alphabet(self) -> frozenset[str]:
        return _alphabet(self.tagset, self.eq)

    @cached_property
    def symbol_map(self) -> dict[Tag, str]:
        return _symbol_map(self.tagset, self.eq)

    def matcher(self, *, strict_gaps: bool = False) -> "AxisMatcher":
        matcher = self._matchers.get(strict_gaps)
        if matcher is None:
            matcher = AxisMatcher(
                (axis.elements for axis in self.axes), strict_gaps=strict_gaps
            )
            self._matchers[strict_gaps] = matcher
        return matcher

    def accepts(self, keys: Sequence[ProjectionKey], *, strict_gaps: bool = False) -> bool:
        return self.matcher(strict_gaps=strict_gaps).matches(keys)


LayerLike = Union[LayerConfig, AxisLayer]
L = TypeVar("L", LayerConfig, AxisLayer)


@dataclass(frozen=True)
class AxisDB:
    """Axis layers ordered strictest first."""

    layers: tuple[AxisLayer, ...] = ()

    def __post_init__(self) -> None:
        ids = [layer.id for layer in self.layers]
        if len(set(ids)) != len(ids):
            raise InvalidLayer("layer ids must be unique")

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self) -> Iterator[AxisLayer]:
        return iter(self.layers)

    def layer(self, layer_id: str) -> AxisLayer:
        for layer in self.layers:
            if layer.id == layer_id:
                return layer
        raise KeyError(layer_id)


def _check_layer_fields(layer_id: str, tagset: frozenset[Tag]) -> None:
    if not layer_id or any(char.isspace() for char in layer_id):
        raise InvalidLayer(f"layer id {layer_id!r} must be a non-empty word")
    if not tagset:
        raise InvalidLayer(f"layer {layer_id!r} has an empty tag set")
    if PUNCT in tagset:
        raise InvalidLayer(f"layer {layer_id!r}: {PUNCT} may only fall into gaps")


def _alphabet(tagset: Iterable[Tag], eq: EquivalenceClassMap) -> frozenset[str]:
    return frozenset(project_symbol(tag, eq) for tag in tagset)


def _symbol_map(tagset: Iterable[Tag], eq: EquivalenceClassMap) -> dict[Tag, str]:
    return {tag: project_symbol(tag, eq) for tag in tagset}


def _layer_symbol_map(layer: LayerLike) -> dict[Tag, str]:
    if isinstance(layer, AxisLayer):
        return layer.symbol_map
    return _symbol_map(layer.tagset, layer.eq)


# --------------------------------------------------------------------------
# projection and extraction


def projection_keys(tags: Sequence[Tag], symbol_map: dict[Tag, str]) -> tuple[ProjectionKey, ...]:
    keys: list[ProjectionKey] = []
    in_gap = False
    for tag in tags:
        symbol = symbol_map.get(tag)
        if symbol is None:
            if not in_gap:
                keys.append(None)
                in_gap = True
        else:
            keys.append(symbol)
            in_gap = False
    return tuple(keys)


def keys_to_items(keys: Iterable[ProjectionKey]) -> tuple[ProjectionItem, ...]:
    return tuple(GAP if key is None else Sym(key) for key in keys)


def items_to_keys(items: Iterable[ProjectionItem]) -> tuple[ProjectionKey, ...]:
    return tuple(item.symbol if isinstance(item, Sym) else None for item in items)


def project_sentence(reading: Reading | Sequence[Tag], layer: LayerLike) -> tuple[ProjectionItem, ...]:
    """Project a reading onto a layer: symbols for layer tags, one Gap per run of others."""

    tags = reading.tags if isinstance(reading, Reading) else tuple(reading)
    return keys_to_items(projection_keys(tags, _layer_symbol_map(layer)))


def extract_axis(sentence: Sentence, layer: LayerLike) -> Axis:
    """The axis of one gold sentence for ``layer``."""

    projection = project_sentence(gold_reading(sentence), layer)
    if not any(isinstance(item, Sym) for item in projection):
        raise NoSymbolInAxis(layer.id, sentence.id)
    return Axis(layer.id, projection)


# --------------------------------------------------------------------------
# generalisation


def _contains_symbol(elements: Iterable[AxisElement]) -> bool:
    for element in elements:
        if isinstance(element, Sym):
            return True
        if isinstance(element, Repeat) and _contains_symbol(element.body):
            return True
    return False


def _match_copy(
    elements: tuple[AxisElement, ...], start: int, unit: tuple[AxisElement, ...]
) -> int | None:
    """End of one copy of ``unit`` at ``start``, or None.

    A Gap of the unit may be absent from the copy when the copy has two
    adjacent non-gap elements at that point (the silent extra dot).
    """

    position = start
    size = len(elements)
    for expected in unit:
        if position < size and elements[position] == expected:
            position += 1
            continue
        if (
            isinstance(expected, Gap)
            and 0 < position < size
            and not isinstance(elements[position - 1], Gap)
            and not isinstance(elements[position], Gap)
        ):
            continue
        return None
    return position if position > start else None


Tandem = tuple[int, int, tuple[AxisElement, ...]]


def _tandem_runs(elements: tuple[AxisElement, ...]) -> list[Tandem]:
    """Every run of two or more copies, extended as far right as it goes.

    Runs come in order of period, then start.
    """

    size = len(elements)
    runs: list[Tandem] = []
    for period in range(1, size):
        for start in range(0, size - period):
            unit = elements[start : start + period]
            if not _contains_symbol(unit):
                continue
            end = start + period
            copies = 1
            while (following := _match_copy(elements, end, unit)) is not None:
                end = following
                copies += 1
            if copies >= 2:
                runs.append((start, end, unit))
    return runs


def _find_tandem(elements: tuple[AxisElement, ...]) -> Tandem | None:
    """The maximal run with the shortest period, leftmost first.

    A run is maximal unless another run covers a strictly larger span around it.
    """

    runs = _tandem_runs(elements)
    if not runs:
        return None
    furthest: dict[int, int] = {}
    for start, end, _ in runs:
        furthest[start] = max(furthest.get(start, end), end)
    # reach[s]: the furthest end of any run starting before s.
    reach: dict[int, int] = {}
    best_end = -1
    for start in range(len(elements) + 1):
        reach[start] = best_end
        best_end = max(best_end, furthest.get(start, -1))
    for start, end, unit in runs:
        if reach[start] >= end or furthest[start] > end:
            continue
        return start, end, unit
    return None


def generalize_repeats(axis: Axis) -> Axis:
    """Fold every tandem repetition into ``[ body ]+`` until none remains."""

    elements = axis.elements
    while (found := _find_tandem(elements)) is not None:
        start, end, unit = found
        if len(unit) == 1 and isinstance(unit[0], Repeat):
            replacement: AxisElement = unit[0]
        else:
            replacement = Repeat(unit)
        elements = elements[:start] + (replacement,) + elements[end:]
    return Axis(axis.layer_id, elements)


def _relax(elements: tuple[AxisElement, ...]) -> tuple[AxisElement, ...]:
    relaxed: list[AxisElement] = []
    for element in elements:
        if isinstance(element, Repeat):
            element = Repeat(_relax(element.body))
        if relaxed and isinstance(element, Sym) and isinstance(relaxed[-1], Sym):
            relaxed.append(GAP)
        relaxed.append(element)
    return tuple(relaxed)


def relax_adjacency(axis: Axis) -> Axis:
    """Insert a Gap between every two adjacent symbols."""

    return Axis(axis.layer_id, _relax(axis.elements))


# --------------------------------------------------------------------------
# matching


class AxisMatcher:
    """Matches projections against the union of a set of axes.

    The axes are compiled into one Thompson NFA; state sets reached per input
    symbol are memoised, so repeated projections run as a lazily built DFA.
    A Gap consumes one projection gap, or nothing unless ``strict_gaps``.
    Gaps inside repeat groups may always consume nothing, since folding lets
    a copy omit its unit's gap.
    """

    def __init__(self, axes: Iterable[tuple[AxisElement, ...]], *, strict_gaps: bool = False):
        self.strict_gaps = strict_gaps
        self._labelled: list[list[tuple[ProjectionKey, int]]] = [[]]
        self._epsilon: list[list[int]] = [[]]
        accepts: set[int] = set()
        for elements in axes:
            entry = self._new_state()
            self._epsilon[0].append(entry)
            accepts.add(self._build(elements, entry))
        self._accepts = frozenset(accepts)
        self._start = self._closure((0,))
        self._steps: dict[tuple[frozenset[int], ProjectionKey], frozenset[int]] = {}

    def _new_state(self) -> int:
        self._labelled.append([])
        self._epsilon.append([])
        return len(self._labelled) - 1

    def _build(
        self, elements: Sequence[AxisElement], state: int, *, in_repeat: bool = False
    ) -> int:
        for element in elements:
            if isinstance(element, Sym):
                following = self._new_state()
                self._labelled[state].append((element.symbol, following))
            elif isinstance(element, Gap):
                following = self._new_state()
                self._labelled[state].append((None, following))
                if in_repeat or not self.strict_gaps:
                    self._epsilon[state].append(following)
            else:
                entry = self._new_state()
                self._epsilon[state].append(entry)
                body_end = self._build(element.body, entry, in_repeat=True)
                following = self._new_state()
                self._epsilon[body_end].extend((entry, following))
            state = following
        return state

    def _closure(self, states: Iterable[int]) -> frozenset[int]:
        stack = list(states)
        reached = set(stack)
        while stack:
            for target in self._epsilon[stack.pop()]:
                if target not in reached:
                    reached.add(target)
                    stack.append(target)
        return frozenset(reached)

    def matches(self, keys: Sequence[ProjectionKey]) -> bool:
        current = self._start
        for key in keys:
            step = self._steps.get((current, key))
            if step is None:
                step = self._closure(
                    target
                    for state in current
                    for label, target in self._labelled[state]
                    if label == key
                )
                self._steps[(current, key)] = step
            if not step:
                return False
            current = step
        return not current.isdisjoint(self._accepts)


@lru_cache(maxsize=4096)
def _single_axis_matcher(elements: tuple[AxisElement, ...], strict_gaps: bool) -> AxisMatcher:
    return AxisMatcher((elements,), strict_gaps=strict_gaps)


def axis_matches(
    axis: Axis, projection: Sequence[ProjectionItem], *, strict_gaps: bool = False
) -> bool:
    """True when ``projection`` is in the language of ``axis``."""

    return _single_axis_matcher(axis.elements, strict_gaps).matches(items_to_keys(projection))


# --------------------------------------------------------------------------
# building and ordering


def strictness_order(layers: Iterable[L]) -> list[L]:
    """Layers strictest first.

    A layer whose tag set is a proper superset of another's always comes
    before it. Among the layers whose supersets are all placed, the highest
    priority goes next, then the lowest id.
    """

    pending = list(layers)
    ids = [layer.id for layer in pending]
    if len(set(ids)) != len(ids):
        raise InvalidLayer("layer ids must be unique")
    looser: dict[str, list[L]] = {layer.id: [] for layer in pending}
    waiting = {layer.id: 0 for layer in pending}
    for a in pending:
        for b in pending:
            if a.tagset > b.tagset:
                looser[a.id].append(b)
                waiting[b.id] += 1
    ready = [(-layer.priority, layer.id, layer) for layer in pending if not waiting[layer.id]]
    heapq.heapify(ready)
    ordered: list[L] = []
    while ready:
        _, _, layer = heapq.heappop(ready)
        ordered.append(layer)
        for other in looser[layer.id]:
            waiting[other.id] -= 1
            if not waiting[other.id]:
                heapq.heappush(ready, (-other.priority, other.id, other))
    return ordered


def compare_strictness(
    a: LayerLike, b: LayerLike, among: Iterable[LayerLike] | None = None
) -> int:
    """Negative when ``a`` is stricter than ``b``, positive when ``b`` is, else 0.

    Positions come from :func:`strictness_order` over ``among`` (default: the
    two layers alone), so comparisons within one layer set are consistent.
    """

    if a.id == b.id:
        return 0
    layers = list(among) if among is not None else [a, b]
    position = {layer.id: index for index, layer in enumerate(strictness_order(layers))}
    return position[a.id] - position[b.id]


def _sorted_axes(axes: Iterable[Axis]) -> tuple[Axis, ...]:
    return tuple(sorted(set(axes), key=axis_text))


def build_layer(gold: Corpus, config: LayerConfig) -> AxisLayer:
    axes: set[Axis] = set()
    skipped = 0
    for sentence in gold.sentences:
        try:
            axis = extract_axis(sentence, config)
        except NoSymbolInAxis:
            skipped += 1
            continue
        if config.relax:
            axis = relax_adjacency(axis)
        if config.generalise:
            axis = generalize_repeats(axis)
        axes.add(axis)
    if skipped:
        LOGGER.debug(
            "Layer %s: %d sentence(s) carry no tag of the layer", config.id, skipped
        )
    if not axes:
        raise EmptyLayer(f"layer {config.id!r} produced no axes")
    return AxisLayer(
        id=config.id,
        tagset=config.tagset,
        eq=config.eq,
        axes=_sorted_axes(axes),
        priority=config.priority,
        generalise=config.generalise,
        relax=config.relax,
    )


def build_axis_db(gold: Corpus, layer_configs: Sequence[LayerConfig]) -> AxisDB:
    """Extract, generalise and deduplicate axes for every configured layer."""

    if not gold.sentences:
        raise EmptyCorpus()
    layers = [build_layer(gold, config) for config in layer_configs]
    layers = strictness_order(layers)
    for layer in layers:
        LOGGER.info("Layer %s: %d axes", layer.id, len(layer.axes))
    return AxisDB(tuple(layers))


# --------------------------------------------------------------------------
# text format


def _element_text(element: AxisElement) -> str:
    if isinstance(element, Sym):
        return element.symbol
    if isinstance(element, Gap):
        return GAP_TEXT
    return " ".join((REPEAT_OPEN, *(_element_text(item) for item in element.body), REPEAT_CLOSE))


def axis_text(axis: Axis) -> str:
    return " ".join(_element_text(element) for element in axis.elements)


def _validate_elements(elements: Sequence[AxisElement], *, nested: bool = False) -> None:
    previous: AxisElement | None = None
    for element in elements:
        if isinstance(element, Gap) and isinstance(previous, Gap):
            raise InvalidAxis("two adjacent gaps")
        if isinstance(element, Repeat):
            if not _contains_symbol(element.body):
                raise InvalidAxis("repeat group without a tag symbol")
            if len(element.body) == 1 and isinstance(element.body[0], Repeat):
                raise InvalidAxis("repeat group directly nested in another")
            _validate_elements(element.body, nested=True)
        previous = element


def _symbols(elements: Iterable[AxisElement]) -> Iterator[str]:
    for element in elements:
        if isinstance(element, Sym):
            yield element.symbol
        elif isinstance(element, Repeat):
            yield from _symbols(element.body)


def validate_axis(axis: Axis, alphabet: frozenset[str] | None = None) -> None:
    if not _contains_symbol(axis.elements):
        raise NoSymbolInAxis(axis.layer_id)
    _validate_elements(axis.elements)
    if alphabet is not None:
        foreign = sorted(set(_symbols(axis.elements)) - alphabet)
        if foreign:
            raise InvalidAxis(
                f"axis of layer {axis.layer_id!r} uses symbols outside its alphabet: "
                + ", ".join(foreign)
            )


def parse_axis_text(text: str, layer_id: str, alphabet: frozenset[str] | None = None) -> Axis:
    """Parse the one-line notation, e.g. ``SUBJ +FAUXV [ ... -FMAINV ]+ ...``."""

    stack: list[list[AxisElement]] = [[]]
    for word in text.split():
        if word == GAP_TEXT:
            stack[-1].append(GAP)
        elif word == REPEAT_OPEN:
            stack.append([])
        elif word == REPEAT_CLOSE:
            if len(stack) == 1:
                raise InvalidAxis(f"unbalanced {REPEAT_CLOSE!r}")
            body = tuple(stack.pop())
            if not body:
                raise InvalidAxis("empty repeat group")
            stack[-1].append(Repeat(body))
        else:
            stack[-1].append(Sym(word))
    if len(stack) != 1:
        raise InvalidAxis(f"unclosed {REPEAT_OPEN!r}")
    axis = Axis(layer_id, tuple(stack[0]))
    validate_axis(axis, alphabet)
    return axis


def _flag_text(value: bool) -> str:
    return "yes" if value else "no"


def _parse_flag(text: str, line: int, error: type[LineError]) -> bool:
    lowered = text.lower()
    if lowered in ("yes", "true", "1"):
        return True
    if lowered in ("no", "false", "0"):
        return False
    raise error(f"expected yes or no, found {text!r}", line=line)


def render_layer_header(layer: LayerLike) -> list[str]:
    header = f"LAYER {layer.id} PRIORITY {layer.priority} GENERALISE {_flag_text(layer.generalise)}"
    if layer.relax:
        header += " RELAX yes"
    lines = [header, "TAGS " + " ".join(sorted(layer.tagset))]
    for symbol, members in layer.eq.classes:
        lines.append(f"CLASS {symbol} = " + " ".join(sorted(members)))
    return lines


def render_axis_db(db: AxisDB) -> str:
    blocks = []
    for layer in db.layers:
        lines = render_layer_header(layer)
        lines.extend(f"AXIS {axis_text(axis)}" for axis in layer.axes)
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def dump_axis_db(db: AxisDB, stream: TextIO) -> None:
    stream.write(render_axis_db(db))


@dataclass
class LayerHeader:
    """A LAYER block being read from an .adb or .cfg file."""

    id: str
    priority: int
    generalise: bool
    relax: bool
    line: int
    tags: list[Tag] = field(default_factory=list)
    classes: list[tuple[str, list[Tag]]] = field(default_factory=list)
    axis_lines: list[tuple[int, str]] = field(default_factory=list)

    def to_config(
        self, error: type[LineError], inventory: TagInventory | None = None
    ) -> LayerConfig:
        if not self.tags:
            raise error(f"layer {self.id!r} has no TAGS line", line=self.line)
        if inventory is not None:
            unknown = sorted(tag for tag in self.tags if tag not in inventory)
            if unknown:
                raise error(
                    f"layer {self.id!r} uses tags outside the inventory: " + ", ".join(unknown),
                    line=self.line,
                )
        try:
            eq = build_class_map(self.classes, inventory=inventory)
            alphabet = _alphabet(self.tags, EMPTY_CLASS_MAP)
            clashing = sorted(set(eq.as_dict()) & alphabet)
            if clashing:
                raise InvalidClassMap(
                    "class symbols collide with layer tags: " + ", ".join(clashing)
                )
            return LayerConfig(
                id=self.id,
                tagset=frozenset(self.tags),
                eq=eq,
                priority=self.priority,
                generalise=self.generalise,
                relax=self.relax,
            )
        except (InvalidClassMap, InvalidLayer, MalformedTag, ReservedSymbol) as exc:
            raise error(str(exc), line=self.line) from exc


def parse_layer_line(words: list[str], line: int, error: type[LineError]) -> LayerHeader:
    """``LAYER <id> PRIORITY <int> GENERALISE <yes|no> [RELAX <yes|no>]``."""

    if len(words) not in (6, 8) or words[2] != "PRIORITY" or words[4] != "GENERALISE":
        raise error(
            "expected 'LAYER <id> PRIORITY <int> GENERALISE <yes|no> [RELAX <yes|no>]'",
            line=line,
        )
    try:
        priority = int(words[3])
    except ValueError as exc:
        raise error(f"priority {words[3]!r} is not an integer", line=line) from exc
    relax = False
    if len(words) == 8:
        if words[6] != "RELAX":
            raise error(f"unexpected {words[6]!r} in LAYER line", line=line)
        relax = _parse_flag(words[7], line, error)
    return LayerHeader(
        id=words[1],
        priority=priority,
        generalise=_parse_flag(words[5], line, error),
        relax=relax,
        line=line,
    )


def parse_layer_detail(
    header: LayerHeader, keyword: str, words: list[str], line: int, error: type[LineError]
) -> bool:
    """Consume a TAGS or CLASS line into ``header``; False for other keywords."""

    try:
        if keyword == "TAGS":
            if len(words) < 2:
                raise error("TAGS needs at least one tag", line=line)
            for word in words[1:]:
                tag = parse_tag(word)
                check_not_reserved(tag)
                header.tags.append(tag)
            return True
        if keyword == "CLASS":
            if len(words) < 4 or words[2] != "=":
                raise error("expected 'CLASS <symbol> = <tag> ...'", line=line)
            header.classes.append((words[1], [parse_tag(word) for word in words[3:]]))
            return True
    except (MalformedTag, ReservedSymbol) as exc:
        raise error(str(exc), line=line) from exc
    return False


def _strip_comment(raw_line: str) -> str:
    line = raw_line.strip()
    return "" if line.startswith("#") else line


def load_axis_db(stream: TextIO, *, inventory: TagInventory | None = None) -> AxisDB:
    """Parse an .adb file. Layers come back in strictness order."""

    headers: list[LayerHeader] = []
    for line_number, raw_line in enumerate(stream, start=1):
        line = _strip_comment(raw_line)
        if not line:
            continue
        words = line.split()
        keyword = words[0]
        if keyword == "LAYER":
            headers.append(parse_layer_line(words, line_number, MalformedAxisFile))
            continue
        if not headers:
            raise MalformedAxisFile(f"{keyword} before any LAYER line", line=line_number)
        header = headers[-1]
        if keyword == "AXIS":
            header.axis_lines.append((line_number, line[len("AXIS"):].strip()))
        elif not parse_layer_detail(header, keyword, words, line_number, MalformedAxisFile):
            raise MalformedAxisFile(f"unknown keyword {keyword!r}", line=line_number)

    layers: list[AxisLayer] = []
    for header in headers:
        config = header.to_config(MalformedAxisFile, inventory)
        if not header.axis_lines:
            raise EmptyLayer(f"layer {header.id!r} has no AXIS lines", line=header.line)
        alphabet = _alphabet(config.tagset, config.eq)
        axes = []
        for line_number, text in header.axis_lines:
            try:
                axes.append(parse_axis_text(text, config.id, alphabet))
            except InvalidAxis as exc:
                raise MalformedAxisFile(str(exc), line=line_number) from exc
        layers.append(
            AxisLayer(
                id=config.id,
                tagset=config.tagset,
                eq=config.eq,
                axes=_sorted_axes(axes),
                priority=config.priority,
                generalise=config.generalise,
                relax=config.relax,
            )
        )
    try:
        return AxisDB(tuple(strictness_order(layers)))
    except InvalidLayer as exc:
        raise MalformedAxisFile(str(exc)) from exc


__all__ = [
    "Axis",
    "AxisDB",
    "AxisElement",
    "AxisLayer",
    "AxisMatcher",
    "EmptyLayer",
    "GAP",
    "Gap",
    "InvalidAxis",
    "InvalidLayer",
    "LayerConfig",
    "LayerHeader",
    "MalformedAxisFile",
    "NoSymbolInAxis",
    "ProjectionItem",
    "Repeat",
    "Sym",
    "axis_matches",
    "axis_text",
    "build_axis_db",
    "build_layer",
    "compare_strictness",
    "dump_axis_db",
    "extract_axis",
    "generalize_repeats",
    "items_to_keys",
    "load_axis_db",
    "parse_axis_text",
    "parse_layer_detail",
    "parse_layer_line",
    "project_sentence",
    "projection_keys",
    "relax_adjacency",
    "render_axis_db",
    "render_layer_header",
    "strictness_order",
    "validate_axis",
]
