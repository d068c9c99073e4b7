"""Tokenization shared by the parsers and the mention-based metric."""

from __future__ import annotations

import string


class EmptyDescription(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip surrounding punctuation.

    Internal hyphens survive, so compass compounds like "north-west" and
    "anti-clockwise" stay single tokens.
    """
    tokens = []
    for raw in text.lower().split():
        tok = raw.strip(string.punctuation)
        if tok:
            tokens.append(tok)
    if not tokens:
        raise EmptyDescription("empty description")
    return tokens


def tokenize_or_empty(text: str) -> list[str]:
    try:
        return tokenize(text)
    except EmptyDescription:
        return []
