"""Document vectors and the similar-post pair set.

Two posts are "similar" when the cosine of their vectors reaches the
threshold (0.6 by default). Pairs are computed once over the whole corpus
at index time by brute force; the O(n^2) sweep is batch work even at the
full-corpus scale and is instant on desk corpora. Render time only
intersects a post's precomputed neighbors with the cluster in view.

The builtin vectorizer is TF-IDF over the shared tokenizer with
tf = 1 + ln(count) and idf = 1 + ln(N / df). The +1 keeps terms that
occur in every document from zeroing out, which would make tiny corpora
degenerate. An external HTTP provider can supply embeddings instead:
POST a JSON list of {id, text} to EMBED_URL and get {id, vector} back.
"""
from __future__ import annotations

import json
import math
import os
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Protocol

import numpy as np

from .errors import NotFoundError, ProviderError, ValidationError
from .text import tokenize

DEFAULT_THRESHOLD = 0.6
PAIRS_FILENAME = "pairs.json"
PAIRS_VERSION = 1


@dataclass(frozen=True)
class DocVector:
    post_id: str
    vector: np.ndarray
    norm: float

    @property
    def embeddable(self) -> bool:
        return self.norm > 0.0


@dataclass(frozen=True)
class SimilarPair:
    post_a: str
    post_b: str
    similarity: float

    def __post_init__(self):
        if not self.post_a < self.post_b:
            raise ValidationError(f"pair not ordered: {self.post_a!r}, {self.post_b!r}")


class EmbeddingProvider(Protocol):
    name: str

    def embed_all(self, docs: list[tuple[str, str]]) -> list[DocVector]: ...


def _as_docvector(post_id: str, values) -> DocVector:
    vector = np.asarray(values, dtype=np.float64)
    return DocVector(post_id, vector, float(np.linalg.norm(vector)))


class TfidfVectorizer:
    """Deterministic in-repo embedding provider."""

    name = "builtin-tfidf-vector"

    def __init__(self, vocab: list[str], idf: np.ndarray):
        self._vocab = {term: i for i, term in enumerate(vocab)}
        self._idf = idf

    @classmethod
    def fit(cls, texts: Iterable[str]) -> "TfidfVectorizer":
        df: Counter[str] = Counter()
        n_docs = 0
        for text in texts:
            n_docs += 1
            df.update(set(tokenize(text)))
        vocab = sorted(df)
        idf = np.array(
            [1.0 + math.log(n_docs / df[term]) for term in vocab], dtype=np.float64
        )
        return cls(vocab, idf)

    @property
    def dimension(self) -> int:
        return len(self._vocab)

    def embed(self, post_id: str, text: str) -> DocVector:
        vector = np.zeros(len(self._vocab), dtype=np.float64)
        for term, count in Counter(tokenize(text)).items():
            idx = self._vocab.get(term)
            if idx is not None:
                vector[idx] = (1.0 + math.log(count)) * self._idf[idx]
        return DocVector(post_id, vector, float(np.linalg.norm(vector)))

    def embed_all(self, docs: list[tuple[str, str]]) -> list[DocVector]:
        return [self.embed(post_id, text) for post_id, text in docs]


class ExternalHttpProvider:
    """Embedding service client; endpoint comes from EMBED_URL."""

    name = "external-http"

    def __init__(self, url: str | None = None, timeout: float = 30.0):
        self._url = url or os.environ.get("EMBED_URL", "")
        if not self._url:
            raise ValidationError("external embedding provider needs EMBED_URL")
        self._timeout = timeout

    def embed_all(self, docs: list[tuple[str, str]]) -> list[DocVector]:
        import httpx

        payload = [{"id": post_id, "text": text} for post_id, text in docs]
        try:
            response = httpx.post(self._url, json=payload, timeout=self._timeout)
            response.raise_for_status()
            rows = response.json()
        except httpx.HTTPError as exc:
            raise ProviderError(self.name, str(exc)) from exc
        vectors = {row["id"]: row["vector"] for row in rows}
        missing = [post_id for post_id, _ in docs if post_id not in vectors]
        if missing:
            raise ProviderError(self.name, f"no vectors for ids {missing[:5]}")
        return [_as_docvector(post_id, vectors[post_id]) for post_id, _ in docs]


def embed(post_id: str, text: str, provider: EmbeddingProvider) -> DocVector:
    return provider.embed_all([(post_id, text)])[0]


def cosine(a: DocVector, b: DocVector) -> float:
    if a.norm == 0.0 or b.norm == 0.0:
        return 0.0
    return float(np.dot(a.vector, b.vector) / (a.norm * b.norm))


def similar_pairs(vectors: list[DocVector],
                  threshold: float = DEFAULT_THRESHOLD) -> list[SimilarPair]:
    """All unordered pairs at or above the cosine threshold, brute force."""
    if not 0.0 < threshold <= 1.0:
        raise ValidationError(f"threshold must be in (0, 1], got {threshold}")
    usable = sorted(
        (v for v in vectors if v.embeddable), key=lambda v: v.post_id
    )
    pairs = []
    for i, left in enumerate(usable):
        for right in usable[i + 1:]:
            sim = cosine(left, right)
            if sim >= threshold:
                pairs.append(SimilarPair(left.post_id, right.post_id, sim))
    return pairs


class PairSet:
    """Immutable similar-pair lookup over a fixed set of posts."""

    def __init__(self, post_ids: Iterable[str], pairs: list[SimilarPair],
                 threshold: float = DEFAULT_THRESHOLD, provider: str = ""):
        self._post_ids = frozenset(post_ids)
        self._pairs = list(pairs)
        self._adjacent: dict[str, set[str]] = {}
        for pair in self._pairs:
            self._adjacent.setdefault(pair.post_a, set()).add(pair.post_b)
            self._adjacent.setdefault(pair.post_b, set()).add(pair.post_a)
        self.threshold = threshold
        self.provider = provider

    @property
    def pairs(self) -> list[SimilarPair]:
        return list(self._pairs)

    def knows(self, post_id: str) -> bool:
        return post_id in self._post_ids

    def neighbors(self, post_id: str, cluster_scope: Iterable[str]) -> set[str]:
        if post_id not in self._post_ids:
            raise NotFoundError(f"unknown post id: {post_id!r}")
        return self._adjacent.get(post_id, set()) & set(cluster_scope)

    def save(self, store_dir: str | Path) -> Path:
        path = Path(store_dir) / PAIRS_FILENAME
        payload = {
            "version": PAIRS_VERSION,
            "threshold": self.threshold,
            "provider": self.provider,
            "post_ids": sorted(self._post_ids),
            "pairs": [
                {"a": p.post_a, "b": p.post_b, "similarity": p.similarity}
                for p in self._pairs
            ],
        }
        path.write_text(
            json.dumps(payload, sort_keys=True, separators=(",", ":"),
                       ensure_ascii=False) + "\n",
            "utf-8",
        )
        return path

    @classmethod
    def load(cls, store_dir: str | Path) -> "PairSet":
        raw = json.loads((Path(store_dir) / PAIRS_FILENAME).read_text("utf-8"))
        if raw.get("version") != PAIRS_VERSION:
            raise ValidationError(f"unsupported pairs version {raw.get('version')!r}")
        pairs = [
            SimilarPair(row["a"], row["b"], row["similarity"]) for row in raw["pairs"]
        ]
        return cls(raw["post_ids"], pairs, raw["threshold"], raw.get("provider", ""))


def compute_pairs(store, provider: EmbeddingProvider | None = None,
                  threshold: float = DEFAULT_THRESHOLD) -> PairSet:
    """Embed every post and pair them; the default provider is the builtin
    vectorizer fit on the same corpus."""
    posts = list(store.iter_posts())
    if provider is None:
        provider = TfidfVectorizer.fit(p.text for p in posts)
    vectors = provider.embed_all([(p.id, p.text) for p in posts])
    return PairSet(
        (p.id for p in posts),
        similar_pairs(vectors, threshold),
        threshold,
        provider.name,
    )
