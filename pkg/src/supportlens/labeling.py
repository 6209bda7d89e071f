"""Social-support labeling of posts (seeking) and comments (providing).

Labels are (direction, kind, level) with direction fixed by record type:
posts carry ``seeking`` labels, comments ``providing`` labels, one level per
kind (emotional / informational).

The default provider is a transparent lexicon-and-threshold scorer: the
score of a text for one (direction, kind) is the density of lexicon marker
phrases per word, and fixed thresholds map the density onto high / medium /
low. Marker lists and thresholds live in ``data/lexicons.json`` so they can
be replaced without code changes. Externally produced labels can be layered
on top via :func:`import_labels`; ids missing from the table fall back to
the heuristic.
"""
from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus import Comment, CorpusStore, Post
from .errors import ValidationError

DIRECTIONS = ("seeking", "providing")
KINDS = ("emotional", "informational")
LEVELS = ("high", "medium", "low")

_NORM_RE = re.compile(r"[^a-z0-9]+")


@dataclass(frozen=True)
class SupportLabel:
    direction: str
    kind: str
    level: str

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ValidationError(f"bad direction {self.direction!r}")
        if self.kind not in KINDS:
            raise ValidationError(f"bad kind {self.kind!r}")
        if self.level not in LEVELS:
            raise ValidationError(f"bad level {self.level!r}")


@dataclass(frozen=True)
class PostSupport:
    seeking_emotional: str
    seeking_informational: str

    def level_for(self, kind: str) -> str:
        return self.seeking_emotional if kind == "emotional" else self.seeking_informational


@dataclass(frozen=True)
class CommentSupport:
    providing_emotional: str
    providing_informational: str

    def level_for(self, kind: str) -> str:
        return self.providing_emotional if kind == "emotional" else self.providing_informational


def _normalize(text: str) -> str:
    return _NORM_RE.sub(" ", text.lower()).strip()


def marker_density(text: str, markers: list[str]) -> float:
    """Count non-overlapping word-boundary marker hits per word of text."""
    norm = f" {_normalize(text)} "
    n_words = len(norm.split())
    if n_words == 0:
        return 0.0
    hits = 0
    for marker in markers:
        hits += norm.count(f" {marker} ")
    return hits / n_words


@lru_cache(maxsize=1)
def _default_lexicons() -> dict:
    raw = resources.files("supportlens.data").joinpath("lexicons.json").read_text("utf-8")
    return json.loads(raw)


class HeuristicProvider:
    """Deterministic lexicon scorer; same text always yields the same labels."""

    name = "heuristic"
    kind = "heuristic"

    def __init__(self, lexicons: dict | None = None):
        self._lex = lexicons if lexicons is not None else _default_lexicons()
        # Markers are stored normalized so matching is insensitive to
        # punctuation and case in both the lexicon and the text.
        self._markers = {
            (direction, k): [_normalize(m) for m in self._lex[direction][k]["markers"]]
            for direction in DIRECTIONS
            for k in KINDS
        }

    def score(self, text: str, direction: str, kind: str) -> float:
        return marker_density(text, self._markers[(direction, kind)])

    def _level(self, text: str, direction: str, kind: str) -> str:
        thresholds = self._lex[direction][kind]["thresholds"]
        score = self.score(text, direction, kind)
        if score >= thresholds["high"]:
            return "high"
        if score >= thresholds["medium"]:
            return "medium"
        return "low"

    def label_post(self, post: Post) -> PostSupport:
        text = post.text
        return PostSupport(
            seeking_emotional=self._level(text, "seeking", "emotional"),
            seeking_informational=self._level(text, "seeking", "informational"),
        )

    def label_comment(self, comment: Comment) -> CommentSupport:
        return CommentSupport(
            providing_emotional=self._level(comment.body, "providing", "emotional"),
            providing_informational=self._level(comment.body, "providing", "informational"),
        )


class ImportedProvider:
    """Labels answered from an imported table, heuristic for missing ids."""

    name = "imported"
    kind = "imported"

    def __init__(self, table: dict[tuple[str, str, str], str],
                 fallback: HeuristicProvider | None = None):
        self._table = table
        self._fallback = fallback or HeuristicProvider()

    def _lookup(self, rec_id: str, direction: str, kind: str) -> str | None:
        return self._table.get((rec_id, direction, kind))

    def label_post(self, post: Post) -> PostSupport:
        base = self._fallback.label_post(post)
        emo = self._lookup(post.id, "seeking", "emotional") or base.seeking_emotional
        info = self._lookup(post.id, "seeking", "informational") or base.seeking_informational
        return PostSupport(seeking_emotional=emo, seeking_informational=info)

    def label_comment(self, comment: Comment) -> CommentSupport:
        base = self._fallback.label_comment(comment)
        emo = self._lookup(comment.id, "providing", "emotional") or base.providing_emotional
        info = self._lookup(comment.id, "providing", "informational") or base.providing_informational
        return CommentSupport(providing_emotional=emo, providing_informational=info)


LabelProvider = HeuristicProvider | ImportedProvider


def import_labels(label_file: str | Path,
                  fallback: HeuristicProvider | None = None) -> ImportedProvider:
    """Build a provider from a CSV of (id, direction, kind, level) rows.

    Level tokens are case-insensitive. A malformed row or an unknown token
    is rejected with its line number; a header row reading
    ``id,direction,kind,level`` is allowed and skipped.
    """
    table: dict[tuple[str, str, str], str] = {}
    with Path(label_file).open("r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if lineno == 1 and [c.strip().lower() for c in row] == ["id", "direction", "kind", "level"]:
                continue
            if len(row) != 4:
                raise ValidationError(
                    f"{label_file}:{lineno}: expected 4 columns, got {len(row)}"
                )
            rec_id, direction, kind, level = (c.strip() for c in row)
            direction = direction.lower()
            kind = kind.lower()
            level = level.lower()
            if not rec_id:
                raise ValidationError(f"{label_file}:{lineno}: empty id")
            if direction not in DIRECTIONS:
                raise ValidationError(
                    f"{label_file}:{lineno}: unknown direction {direction!r}"
                )
            if kind not in KINDS:
                raise ValidationError(f"{label_file}:{lineno}: unknown kind {kind!r}")
            if level not in LEVELS:
                raise ValidationError(f"{label_file}:{lineno}: unknown level {level!r}")
            table[(rec_id, direction, kind)] = level
    return ImportedProvider(table, fallback=fallback)


LABELS_FILENAME = "labels.json"


class LabelStore:
    """Labels for every post and comment of a corpus, persisted as JSON."""

    def __init__(self, posts: dict[str, PostSupport],
                 comments: dict[str, CommentSupport], provider_name: str):
        self.posts = posts
        self.comments = comments
        self.provider_name = provider_name

    def post_labels(self, post_id: str) -> PostSupport:
        return self.posts[post_id]

    def comment_labels(self, comment_id: str) -> CommentSupport:
        return self.comments[comment_id]

    def save(self, store_dir: str | Path) -> Path:
        payload = {
            "version": 1,
            "provider": self.provider_name,
            "posts": {
                pid: {"emotional": s.seeking_emotional, "informational": s.seeking_informational}
                for pid, s in self.posts.items()
            },
            "comments": {
                cid: {"emotional": s.providing_emotional, "informational": s.providing_informational}
                for cid, s in self.comments.items()
            },
        }
        path = Path(store_dir) / LABELS_FILENAME
        data = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        path.write_bytes(data.encode("utf-8"))
        return path

    @classmethod
    def load(cls, store_dir: str | Path) -> "LabelStore":
        path = Path(store_dir) / LABELS_FILENAME
        if not path.exists():
            raise FileNotFoundError(
                f"no labels at {path}; run `supportlens label` first"
            )
        raw = json.loads(path.read_text("utf-8"))
        posts = {
            pid: PostSupport(
                seeking_emotional=v["emotional"],
                seeking_informational=v["informational"],
            )
            for pid, v in raw["posts"].items()
        }
        comments = {
            cid: CommentSupport(
                providing_emotional=v["emotional"],
                providing_informational=v["informational"],
            )
            for cid, v in raw["comments"].items()
        }
        return cls(posts, comments, raw.get("provider", "unknown"))


def label_all(store: CorpusStore, provider: LabelProvider) -> LabelStore:
    """Label every post and comment in the corpus with one provider."""
    posts = {post.id: provider.label_post(post) for post in store.iter_posts()}
    comments = {c.id: provider.label_comment(c) for c in store.iter_comments()}
    return LabelStore(posts, comments, provider.name)
