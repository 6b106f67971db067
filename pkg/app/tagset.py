"""Syntactic tag inventory, tag parsing and equivalence-class projection."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from typing import Iterable, Mapping, TextIO, TypeAlias

from app.errors import LineError, PatternError

LOGGER = logging.getLogger(__name__)

Tag: TypeAlias = str

PUNCT = "PUNCT"
BOS = "<s>"
EOS = "</s>"

# Symbols the .vrt/.adb/.jdb/.cfg formats use as markup.
RESERVED_SYMBOLS = frozenset({PUNCT, BOS, EOS, "...", "[", "]+", "_", ":", "|", "="})

DEFAULT_INVENTORY_RESOURCE = "engcg_tags.tsv"


class MalformedTag(LineError, ValueError):
    """Raised when text cannot be a tag symbol."""

    code = "MalformedTag"

    def __init__(self, text: str, reason: str, *, line: int | None = None):
        self.text = text
        self.reason = reason
        super().__init__(f"malformed tag {text!r}: {reason}", line=line)


class DuplicateTag(LineError):
    code = "DuplicateTag"

    def __init__(self, tag: Tag, *, line: int | None = None):
        self.tag = tag
        super().__init__(f"duplicate tag {tag!r}", line=line)


class EmptyInventory(PatternError):
    code = "EmptyInventory"

    def __init__(self):
        super().__init__("Tag inventory declares no tags")


class ReservedSymbol(LineError, ValueError):
    code = "ReservedSymbol"

    def __init__(self, symbol: str, *, line: int | None = None):
        self.symbol = symbol
        super().__init__(f"{symbol!r} is reserved by the file formats", line=line)


class InvalidClassMap(PatternError, ValueError):
    code = "InvalidClassMap"


def parse_tag(text: str, *, line: int | None = None) -> Tag:
    """Return ``text`` as a tag symbol, trimming surrounding whitespace."""

    symbol = text.strip()
    if not symbol:
        raise MalformedTag(text, "empty", line=line)
    if "/" in symbol:
        raise MalformedTag(text, "contains '/'", line=line)
    if any(char.isspace() for char in symbol):
        raise MalformedTag(text, "contains whitespace", line=line)
    return symbol


def check_not_reserved(symbol: str, *, line: int | None = None) -> None:
    if symbol in RESERVED_SYMBOLS:
        raise ReservedSymbol(symbol, line=line)


@dataclass(frozen=True)
class TagInventory:
    """Declared tags with their glosses, in declaration order."""

    entries: tuple[tuple[Tag, str], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise EmptyInventory()
        seen: set[Tag] = set()
        for tag, _ in self.entries:
            if tag in seen:
                raise DuplicateTag(tag)
            seen.add(tag)

    @cached_property
    def tags(self) -> frozenset[Tag]:
        return frozenset(tag for tag, _ in self.entries)

    @cached_property
    def descriptions(self) -> Mapping[Tag, str]:
        return dict(self.entries)

    def __contains__(self, tag: object) -> bool:
        return tag in self.tags

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return (tag for tag, _ in self.entries)


def load_inventory(stream: TextIO) -> TagInventory:
    """Read ``SYMBOL<TAB>gloss`` lines; ``#`` starts a comment line."""

    entries: list[tuple[Tag, str]] = []
    seen: set[Tag] = set()
    for line_number, raw_line in enumerate(stream, start=1):
        line = raw_line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        symbol_text, _, gloss = line.partition("\t")
        tag = parse_tag(symbol_text, line=line_number)
        check_not_reserved(tag, line=line_number)
        if tag in seen:
            raise DuplicateTag(tag, line=line_number)
        seen.add(tag)
        entries.append((tag, gloss.strip()))
    if not entries:
        raise EmptyInventory()
    return TagInventory(tuple(entries))


def dump_inventory(inventory: TagInventory, stream: TextIO) -> None:
    for tag, gloss in inventory.entries:
        stream.write(f"{tag}\t{gloss}\n" if gloss else f"{tag}\n")


def default_inventory() -> TagInventory:
    """Return the bundled ENGCG syntactic tag list."""

    resource = resources.files("app").joinpath("data", DEFAULT_INVENTORY_RESOURCE)
    with resource.open("r", encoding="utf-8") as stream:
        return load_inventory(stream)


@dataclass(frozen=True)
class EquivalenceClassMap:
    """Class symbol -> member tags. A tag belongs to at most one class."""

    classes: tuple[tuple[str, frozenset[Tag]], ...] = ()

    @cached_property
    def _index(self) -> dict[Tag, str]:
        return {
            member: symbol for symbol, members in self.classes for member in members
        }

    def as_dict(self) -> dict[str, frozenset[Tag]]:
        return dict(self.classes)

    def __bool__(self) -> bool:
        return bool(self.classes)


EMPTY_CLASS_MAP = EquivalenceClassMap()


def build_class_map(
    classes: Mapping[str, Iterable[Tag]] | Iterable[tuple[str, Iterable[Tag]]],
    *,
    inventory: TagInventory | None = None,
) -> EquivalenceClassMap:
    """Validate class definitions and return an :class:`EquivalenceClassMap`."""

    items = classes.items() if isinstance(classes, Mapping) else classes
    owner: dict[Tag, str] = {}
    cleaned: dict[str, frozenset[Tag]] = {}
    for raw_symbol, raw_members in items:
        symbol = parse_tag(raw_symbol)
        check_not_reserved(symbol)
        if symbol in cleaned:
            raise InvalidClassMap(f"class {symbol!r} declared twice")
        if inventory is not None and symbol in inventory:
            raise InvalidClassMap(
                f"class symbol {symbol!r} collides with a tag in the inventory"
            )
        members = frozenset(parse_tag(member) for member in raw_members)
        if not members:
            raise InvalidClassMap(f"class {symbol!r} has no member tags")
        for member in sorted(members):
            if member in owner:
                raise InvalidClassMap(
                    f"tag {member!r} belongs to both {owner[member]!r} and {symbol!r}"
                )
            owner[member] = symbol
        cleaned[symbol] = members
    symbols = set(cleaned)
    clashing = symbols & set(owner)
    if clashing:
        raise InvalidClassMap(
            "class symbols used as member tags: " + ", ".join(sorted(clashing))
        )
    return EquivalenceClassMap(tuple(sorted(cleaned.items())))


def project_symbol(tag: Tag, eq: EquivalenceClassMap) -> str:
    """Return the class symbol containing ``tag``, or ``tag`` itself."""

    if not eq.classes:
        return tag
    return eq._index.get(tag, tag)


__all__ = [
    "BOS",
    "DuplicateTag",
    "EMPTY_CLASS_MAP",
    "EOS",
    "EmptyInventory",
    "EquivalenceClassMap",
    "InvalidClassMap",
    "MalformedTag",
    "PUNCT",
    "RESERVED_SYMBOLS",
    "ReservedSymbol",
    "Tag",
    "TagInventory",
    "build_class_map",
    "check_not_reserved",
    "default_inventory",
    "dump_inventory",
    "load_inventory",
    "parse_tag",
    "project_symbol",
]
