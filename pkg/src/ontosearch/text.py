"""Low-level text helpers shared by the knowledge base and the annotators."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Letter/digit runs; an apostrophe or period survives only between two such runs.
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’.][^\W_]+)*")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int

    @property
    def norm(self) -> str:
        return self.text.casefold()


def tokenize(text: str) -> list[Token]:
    """Split ``text`` into word tokens with character offsets.

    >>> [t.text for t in tokenize("U.S. $17.4bn")]
    ['U.S', '17.4bn']
    """
    return [Token(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


def normalize_name(name: str) -> str:
    """Case-fold, trim and collapse whitespace runs to one space."""
    return _WS_RE.sub(" ", name.strip()).casefold()


def name_key(name: str) -> str:
    """Token-level name form used inside triple keys: ``General  Motors`` -> ``general_motors``."""
    return "_".join(t.norm for t in tokenize(name))
