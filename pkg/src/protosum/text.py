"""Deterministic text primitives: tokenization and sentence splitting.

One tokenizer is shared by phrase ranking, summary-size accounting, and
ROUGE evaluation so that all lexical comparisons agree on what a token is.
"""

from __future__ import annotations

import re

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# A sentence boundary is sentence-final punctuation followed by whitespace
# and an uppercase letter (or end of text).
_SPLIT_RE = re.compile(r"(?<=[.?!])\s+(?=[A-Z])")


def tokenize(text: str) -> list[str]:
    """Lowercase `text`, split on non-alphanumeric runs, drop tokens shorter
    than 2 characters."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= 2]


def split_sentences(text: str) -> list[str]:
    """Split `text` into sentences.

    Boundaries are a period, question mark, or exclamation mark followed by
    whitespace and an uppercase letter; the end of the text always closes the
    final sentence. Empty fragments are dropped.
    """
    parts = (p.strip() for p in _SPLIT_RE.split(text))
    return [p for p in parts if p]
