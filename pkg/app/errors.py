"""Shared error base for the pattern parser."""

from __future__ import annotations


class PatternError(RuntimeError):
    """Base class for every error raised by the ``app`` modules.

    ``code`` is the stable, greppable name printed by the CLI as
    ``error[<code>]: <message>``.
    """

    code = "PatternError"


class LineError(PatternError):
    """An error tied to a line of an input file."""

    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingGold(PatternError):
    """Raised when a token has neither a gold tag nor a single candidate."""

    code = "MissingGold"

    def __init__(self, sentence_id: str, position: int):
        self.sentence_id = sentence_id
        self.position = position
        super().__init__(
            f"sentence {sentence_id!r} token {position} has no gold tag"
        )


class EmptyCorpus(PatternError):
    """Raised when an operation needs at least one sentence."""

    code = "EmptyCorpus"

    def __init__(self, message: str = "Corpus contains no sentences"):
        super().__init__(message)


__all__ = ["EmptyCorpus", "LineError", "MissingGold", "PatternError"]
