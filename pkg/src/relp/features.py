"""Tokenization and n-gram count features shared by every method."""
from __future__ import annotations

import string
from collections import Counter
from typing import Iterable, Sequence

FeatureVector = Counter  # n-gram -> count

_PUNCT = string.punctuation
_PREFIXES = "#@"
_URL_PREFIXES = ("http://", "https://")


def tokenize(text: str) -> list[str]:
    """Lowercase, drop URLs, split on whitespace and trim punctuation.

    A leading ``#`` or ``@`` survives trimming so hashtags and mentions stay
    distinct from plain words.
    """
    tokens = []
    for raw in text.lower().split():
        if raw.lstrip(_PUNCT).startswith(_URL_PREFIXES):
            continue
        if raw[0] in _PREFIXES:
            core = raw[1:].strip(_PUNCT)
            tok = raw[0] + core if core else ""
        else:
            tok = raw.strip(_PUNCT)
        if tok:
            tokens.append(tok)
    return tokens


def extract_ngrams(tokens: Sequence[str], n_min: int = 1, n_max: int = 3) -> FeatureVector:
    if not 1 <= n_min <= n_max:
        raise ValueError("need 1 <= n_min <= n_max")
    counts: FeatureVector = Counter()
    for n in range(n_min, n_max + 1):
        for start in range(len(tokens) - n + 1):
            counts[" ".join(tokens[start:start + n])] += 1
    return counts


def featurize(text: str, drop: Iterable[str] = ()) -> FeatureVector:
    """Features of ``text``; tokens listed in ``drop`` are removed first."""
    tokens = tokenize(text)
    drop = set(drop)
    if drop:
        tokens = [t for t in tokens if t not in drop]
    return extract_ngrams(tokens)
