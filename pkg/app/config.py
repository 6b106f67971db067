"""Centralized configuration helpers for environment-driven settings and pipeline files."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import load_dotenv

from app.axis import LayerConfig, LayerHeader, parse_layer_detail, parse_layer_line
from app.corpus import UnknownTag
from app.errors import LineError, PatternError
from app.joint import InvalidJointParams, JointParams
from app.parser import DisambiguationConfig, InvalidDisambiguationConfig
from app.storage import open_text, validate_extension
from app.tagset import TagInventory, default_inventory, load_inventory

LOGGER = logging.getLogger(__name__)

_ENV_LOADED = False

LOG_LEVEL_ENV = "SYNPAT_LOG_LEVEL"
READING_CAP_ENV = "SYNPAT_READING_CAP"
THREADS_ENV = "SYNPAT_THREADS"
_DEFAULT_LOG_LEVEL = "WARNING"
_LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class ConfigError(PatternError):
    code = "ConfigError"


class MalformedConfig(LineError, ValueError):
    code = "MalformedConfig"


class NoLayers(PatternError):
    code = "NoLayers"

    def __init__(self, path: str | Path):
        super().__init__(f"{path} defines no LAYER blocks")


def load_environment(dotenv_path: str | None = None) -> None:
    """Load environment variables from a .env file once per process."""
    global _ENV_LOADED
    if not _ENV_LOADED:
        load_dotenv(dotenv_path=dotenv_path)
        _ENV_LOADED = True


def _positive_int_env(name: str) -> int | None:
    load_environment()
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError(f"{name} must be at least 1, got {value}")
    return value


def get_log_level() -> str:
    """Return the logging level name from ``SYNPAT_LOG_LEVEL`` (default WARNING)."""

    load_environment()
    level = (os.getenv(LOG_LEVEL_ENV) or _DEFAULT_LOG_LEVEL).strip().upper()
    if level not in _LOG_LEVELS:
        raise ConfigError(
            f"{LOG_LEVEL_ENV} must be one of {', '.join(_LOG_LEVELS)}, got {level!r}"
        )
    return level


def get_reading_cap() -> int | None:
    return _positive_int_env(READING_CAP_ENV)


def get_threads() -> int:
    return _positive_int_env(THREADS_ENV) or 1


@dataclass(frozen=True)
class PipelineConfig:
    """Layers, joint parameters and parser settings read from one .cfg file."""

    inventory: TagInventory
    layers: tuple[LayerConfig, ...] = ()
    joint_params: JointParams = field(default_factory=JointParams)
    disambiguation: DisambiguationConfig = field(default_factory=DisambiguationConfig)
    path: Path | None = None

    def require_layers(self) -> tuple[LayerConfig, ...]:
        if not self.layers:
            raise NoLayers(self.path or "configuration")
        return self.layers


def _key_values(words: list[str], line: int, allowed: set[str]) -> dict[str, str]:
    values: dict[str, str] = {}
    for word in words[1:]:
        key, sep, value = word.partition("=")
        if not sep or not value:
            raise MalformedConfig(f"expected key=value, found {word!r}", line=line)
        if key not in allowed:
            raise MalformedConfig(
                f"unknown {words[0]} setting {key!r}; expected one of "
                + ", ".join(sorted(allowed)),
                line=line,
            )
        if key in values:
            raise MalformedConfig(f"{key} given twice", line=line)
        values[key] = value
    return values


def _parse_bool(text: str, line: int) -> bool:
    lowered = text.lower()
    if lowered in ("yes", "true", "1"):
        return True
    if lowered in ("no", "false", "0"):
        return False
    raise MalformedConfig(f"expected yes or no, found {text!r}", line=line)


def _parse_int(text: str, line: int) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise MalformedConfig(f"{text!r} is not an integer", line=line) from exc


def _joint_params(words: list[str], line: int) -> JointParams:
    values = _key_values(words, line, {"error_margin", "absolute_margin", "max_len", "algorithm"})
    defaults = JointParams()
    absolute_margin = defaults.absolute_margin
    max_len = defaults.max_len
    if "absolute_margin" in values:
        absolute_margin = _parse_int(values["absolute_margin"], line)
    if "max_len" in values:
        max_len = _parse_int(values["max_len"], line)
    try:
        error_margin = float(values.get("error_margin", defaults.error_margin))
        return JointParams(
            error_margin=error_margin,
            absolute_margin=absolute_margin,
            max_len=max_len,
            algorithm=values.get("algorithm", defaults.algorithm),
        )
    except (ValueError, InvalidJointParams) as exc:
        raise MalformedConfig(str(exc), line=line) from exc


def _disambiguation(words: list[str], line: int, default_cap: int) -> DisambiguationConfig:
    values = _key_values(words, line, {"reading_cap", "strict_gaps", "layer_skip"})
    try:
        return DisambiguationConfig(
            reading_cap=_parse_int(values["reading_cap"], line)
            if "reading_cap" in values
            else default_cap,
            strict_gaps=_parse_bool(values.get("strict_gaps", "no"), line),
            layer_skip=_parse_bool(values.get("layer_skip", "yes"), line),
        )
    except InvalidDisambiguationConfig as exc:
        raise MalformedConfig(str(exc), line=line) from exc


def _load_inventory_file(raw_path: str, base: Path, line: int) -> TagInventory:
    path = Path(raw_path)
    if not path.is_absolute():
        path = base / path
    validate_extension(path, "inventory")
    try:
        with open_text(path) as stream:
            return load_inventory(stream)
    except OSError as exc:
        raise MalformedConfig(f"cannot read inventory {path}: {exc.strerror}", line=line) from exc


def load_pipeline_config(path: str | Path) -> PipelineConfig:
    """Read a pipeline .cfg file.

    Layer blocks share the .adb header syntax (``LAYER``, ``TAGS``,
    ``CLASS``); ``INVENTORY``, ``JOINTS`` and ``PARSE`` lines may appear
    anywhere, at most once each.
    """

    path = Path(path)
    validate_extension(path, "config")
    default_cap = get_reading_cap() or DisambiguationConfig().reading_cap
    inventory: TagInventory | None = None
    joint_params: JointParams | None = None
    disambiguation: DisambiguationConfig | None = None
    headers: list[LayerHeader] = []

    with open_text(path) as stream:
        for line_number, raw_line in enumerate(stream, start=1):
            line = raw_line.strip()
            if not line or line.startswith("#"):
                continue
            words = line.split()
            keyword = words[0]
            if keyword == "INVENTORY":
                if inventory is not None or len(words) != 2:
                    raise MalformedConfig("expected one 'INVENTORY <path>' line", line=line_number)
                inventory = _load_inventory_file(words[1], path.parent, line_number)
            elif keyword == "JOINTS":
                if joint_params is not None:
                    raise MalformedConfig("duplicate JOINTS line", line=line_number)
                joint_params = _joint_params(words, line_number)
            elif keyword == "PARSE":
                if disambiguation is not None:
                    raise MalformedConfig("duplicate PARSE line", line=line_number)
                disambiguation = _disambiguation(words, line_number, default_cap)
            elif keyword == "LAYER":
                headers.append(parse_layer_line(words, line_number, MalformedConfig))
            elif not headers:
                raise MalformedConfig(f"{keyword} before any LAYER line", line=line_number)
            elif not parse_layer_detail(headers[-1], keyword, words, line_number, MalformedConfig):
                raise MalformedConfig(f"unknown keyword {keyword!r}", line=line_number)

    inventory = inventory or default_inventory()
    layers: list[LayerConfig] = []
    for header in headers:
        unknown = sorted({tag for tag in header.tags if tag not in inventory})
        if unknown:
            raise UnknownTag(
                f"layer {header.id!r} uses tags outside the inventory: " + ", ".join(unknown),
                line=header.line,
            )
        layers.append(header.to_config(MalformedConfig, inventory))
    ids = [layer.id for layer in layers]
    duplicates = sorted({layer_id for layer_id in ids if ids.count(layer_id) > 1})
    if duplicates:
        raise MalformedConfig("duplicate layer ids: " + ", ".join(duplicates))

    LOGGER.debug("Loaded %d layer(s) from %s", len(layers), path)
    return PipelineConfig(
        inventory=inventory,
        layers=tuple(layers),
        joint_params=joint_params or JointParams(),
        disambiguation=disambiguation or DisambiguationConfig(reading_cap=default_cap),
        path=path,
    )


__all__ = [
    "ConfigError",
    "MalformedConfig",
    "NoLayers",
    "PipelineConfig",
    "get_log_level",
    "get_reading_cap",
    "get_threads",
    "load_environment",
    "load_pipeline_config",
]
