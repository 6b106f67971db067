"""Helpers for checking input file types and writing outputs safely."""

from __future__ import annotations

import io
import os
import uuid
from pathlib import Path

from app.errors import LineError, PatternError

ALLOWED_EXTENSIONS: dict[str, frozenset[str]] = {
    "corpus": frozenset({".vrt"}),
    "axes": frozenset({".adb"}),
    "joints": frozenset({".jdb"}),
    "config": frozenset({".cfg"}),
    "inventory": frozenset({".tsv", ".txt"}),
}


class UnsupportedFileType(PatternError, ValueError):
    code = "UnsupportedFileType"

    def __init__(self, path: str | Path, kind: str, allowed: frozenset[str]):
        self.path = str(path)
        self.kind = kind
        suffix = Path(path).suffix.lower()
        super().__init__(
            f"Unsupported file type for {kind}: {suffix or '<none>'}. "
            f"Allowed extensions: {', '.join(sorted(allowed))}"
        )


class EncodingError(LineError, ValueError):
    code = "EncodingError"

    def __init__(self, path: str | Path, line: int):
        self.path = str(path)
        super().__init__(f"{path} is not valid UTF-8", line=line)


def validate_extension(path: str | Path, kind: str) -> None:
    """Raise :class:`UnsupportedFileType` if ``path`` does not suit ``kind``."""

    allowed = ALLOWED_EXTENSIONS[kind]
    if Path(path).suffix.lower() not in allowed:
        raise UnsupportedFileType(path, kind, allowed)


def open_text(path: str | Path) -> io.StringIO:
    """Read a UTF-8 file into memory; undecodable bytes raise :class:`EncodingError`."""

    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(path, data.count(b"\n", 0, exc.start) + 1) from exc
    return io.StringIO(text, newline=None)


def write_text_atomic(path: str | Path, text: str) -> Path:
    """Write ``text`` beside ``path`` under a unique name, then rename it into place."""

    target = Path(path)
    temporary = target.with_name(f".{uuid.uuid4().hex}__{target.name}")
    try:
        with temporary.open("w", encoding="utf-8", newline="\n") as stream:
            stream.write(text)
        os.replace(temporary, target)
    finally:
        if temporary.exists():
            temporary.unlink()
    return target


__all__ = [
    "ALLOWED_EXTENSIONS",
    "EncodingError",
    "UnsupportedFileType",
    "open_text",
    "validate_extension",
    "write_text_atomic",
]
