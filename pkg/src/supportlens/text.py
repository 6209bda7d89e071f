"""Shared tokenizer for indexing, vectorization, and topic modeling.

Scheme (frozen for reproducibility): lowercase, split on runs of
non-alphanumeric characters, drop tokens shorter than 2 characters, drop
stopwords from the fixed list shipped in ``data/stopwords.txt``.
"""
from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_MIN_TOKEN_LEN = 2


@lru_cache(maxsize=1)
def stopwords() -> frozenset[str]:
    """Load the fixed stopword list shipped with the package."""
    raw = resources.files("supportlens.data").joinpath("stopwords.txt").read_text("utf-8")
    words = set()
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def tokenize(text: str) -> list[str]:
    """Tokenize free text into normalized index terms."""
    stop = stopwords()
    return [
        tok
        for tok in _TOKEN_RE.findall(text.lower())
        if len(tok) >= _MIN_TOKEN_LEN and tok not in stop
    ]
