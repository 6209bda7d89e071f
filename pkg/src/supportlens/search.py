"""Inverted index with TF-IDF ranking over posts.

Scoring: ``score(q, d) = sum over query tokens t of tf(t, d) * idf(t)`` with
``tf = 1 + ln(term_count)`` and ``idf = ln(N / df(t))``. Every document
containing at least one query token is a candidate; ties are broken by
ascending post id and at most ``n_top`` results are returned.

Index file layout (``index.bin``, little-endian):

    magic       4 bytes   b"SLIX"
    version     u32       currently 1
    n_docs      u32       number of posts in the corpus at build time
    doc table   n_docs *  [u16 id_len][id utf-8 bytes]        (ids sorted)
    n_terms     u32
    term table  n_terms * [u16 term_len][term utf-8 bytes][u32 df]
                          [df * (u32 doc_ordinal, u32 term_frequency)]
                          (terms sorted; postings sorted by ordinal)

Doc ordinals refer to positions in the sorted doc table, so identical
corpora always serialize to identical bytes.
"""
from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CorpusStore
from .text import tokenize

INDEX_FILENAME = "index.bin"
INDEX_MAGIC = b"SLIX"
INDEX_VERSION = 1

DEFAULT_N_TOP = 150


@dataclass(frozen=True)
class SearchResult:
    post_id: str
    score: float
    rank: int


@dataclass(frozen=True)
class SearchConfig:
    n_top: int = DEFAULT_N_TOP

    def __post_init__(self):
        if self.n_top < 1:
            raise ValueError(f"n_top must be >= 1, got {self.n_top}")


@dataclass
class SearchResponse:
    """Ranked results plus a flag distinguishing an empty-after-tokenize query."""

    results: list[SearchResult] = field(default_factory=list)
    empty_query: bool = False


class SearchIndex:
    """Immutable inverted index: term -> [(post_id, term_frequency), ...]."""

    def __init__(self, doc_ids: list[str], postings: dict[str, list[tuple[str, int]]]):
        self._doc_ids = doc_ids
        self._postings = postings

    @property
    def n_docs(self) -> int:
        return len(self._doc_ids)

    @property
    def doc_ids(self) -> list[str]:
        return list(self._doc_ids)

    def posting_list(self, term: str) -> list[tuple[str, int]]:
        return self._postings.get(term, [])

    def search(self, query: str, config: SearchConfig | None = None) -> SearchResponse:
        config = config or SearchConfig()
        tokens = tokenize(query)
        if not tokens:
            return SearchResponse(results=[], empty_query=True)
        n = self.n_docs
        scores: dict[str, float] = {}
        for token in tokens:
            entries = self._postings.get(token)
            if not entries:
                continue
            idf = math.log(n / len(entries))
            for post_id, tf_count in entries:
                scores[post_id] = scores.get(post_id, 0.0) + (1.0 + math.log(tf_count)) * idf
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))[: config.n_top]
        return SearchResponse(
            results=[
                SearchResult(post_id=pid, score=score, rank=i + 1)
                for i, (pid, score) in enumerate(ranked)
            ]
        )

    # -- serialization ----------------------------------------------------

    def to_bytes(self) -> bytes:
        ordinal = {pid: i for i, pid in enumerate(self._doc_ids)}
        out = bytearray()
        out += INDEX_MAGIC
        out += struct.pack("<II", INDEX_VERSION, len(self._doc_ids))
        for pid in self._doc_ids:
            raw = pid.encode("utf-8")
            out += struct.pack("<H", len(raw)) + raw
        terms = sorted(self._postings)
        out += struct.pack("<I", len(terms))
        for term in terms:
            raw = term.encode("utf-8")
            entries = self._postings[term]
            out += struct.pack("<H", len(raw)) + raw
            out += struct.pack("<I", len(entries))
            for pid, tf_count in entries:
                out += struct.pack("<II", ordinal[pid], tf_count)
        return bytes(out)

    def save(self, index_dir: str | Path) -> Path:
        index_dir = Path(index_dir)
        index_dir.mkdir(parents=True, exist_ok=True)
        path = index_dir / INDEX_FILENAME
        path.write_bytes(self.to_bytes())
        return path

    @classmethod
    def from_bytes(cls, data: bytes) -> "SearchIndex":
        if data[:4] != INDEX_MAGIC:
            raise ValueError("not an index file (bad magic)")
        version, n_docs = struct.unpack_from("<II", data, 4)
        if version != INDEX_VERSION:
            raise ValueError(f"unsupported index version {version}")
        pos = 12
        doc_ids: list[str] = []
        for _ in range(n_docs):
            (id_len,) = struct.unpack_from("<H", data, pos)
            pos += 2
            doc_ids.append(data[pos : pos + id_len].decode("utf-8"))
            pos += id_len
        (n_terms,) = struct.unpack_from("<I", data, pos)
        pos += 4
        postings: dict[str, list[tuple[str, int]]] = {}
        for _ in range(n_terms):
            (term_len,) = struct.unpack_from("<H", data, pos)
            pos += 2
            term = data[pos : pos + term_len].decode("utf-8")
            pos += term_len
            (df,) = struct.unpack_from("<I", data, pos)
            pos += 4
            entries = []
            for _ in range(df):
                ord_, tf_count = struct.unpack_from("<II", data, pos)
                pos += 8
                entries.append((doc_ids[ord_], tf_count))
            postings[term] = entries
        return cls(doc_ids, postings)

    @classmethod
    def load(cls, index_dir: str | Path) -> "SearchIndex":
        path = Path(index_dir) / INDEX_FILENAME
        if not path.exists():
            raise FileNotFoundError(
                f"no search index at {path}; run `supportlens index` first"
            )
        return cls.from_bytes(path.read_bytes())


def build_index(store: CorpusStore) -> SearchIndex:
    """Build an index over title+body of every post. Empty corpus is valid."""
    doc_ids = sorted(store.post_ids)
    postings: dict[str, list[tuple[str, int]]] = {}
    for pid in doc_ids:
        post, _ = store.get_post(pid)
        for term, count in Counter(tokenize(post.text)).items():
            postings.setdefault(term, []).append((pid, count))
    # doc_ids were visited in sorted order, so each posting list already is.
    return SearchIndex(doc_ids, postings)
