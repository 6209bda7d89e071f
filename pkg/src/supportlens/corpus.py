"""Dump ingestion and the canonical post/comment store.

Input is a newline-delimited dump of JSON records with fields ``id``,
``parent_id`` (absent for posts), ``title``, ``body``, ``created_utc``.
Two tombstone filters are applied: records whose id is "[deleted]" or
"[removed]" and records whose body is one of those markers. Comments whose
parent chain does not resolve to a surviving post are dropped transitively.

The store is a single canonical JSON file plus a sidecar stats file.
Serialization is byte-deterministic, so re-ingesting the same dump yields
an identical store.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

from .errors import NotFoundError

TOMBSTONES = frozenset({"[deleted]", "[removed]"})

STORE_FILENAME = "corpus.json"
STATS_FILENAME = "stats.json"
STORE_VERSION = 1


@dataclass(frozen=True)
class Post:
    id: str
    title: str
    body: str
    created_utc: int
    comment_ids: tuple[str, ...] = ()

    @property
    def text(self) -> str:
        return f"{self.title} {self.body}".strip()


@dataclass(frozen=True)
class Comment:
    id: str
    post_id: str
    body: str
    created_utc: int
    depth: int = 0


@dataclass
class CorpusStats:
    n_posts: int = 0
    n_comments: int = 0
    n_dropped_tombstone_id: int = 0
    n_dropped_tombstone_body: int = 0
    n_dropped_orphan: int = 0
    n_dropped_empty: int = 0
    n_malformed: int = 0
    n_raw: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class _RawRecord:
    id: str
    parent_id: str | None
    title: str
    body: str
    created_utc: int

    @property
    def is_comment(self) -> bool:
        return self.parent_id is not None


def _normalize_text(value: object) -> str:
    if not isinstance(value, str):
        return ""
    return value.replace("\r\n", "\n").replace("\r", "\n").strip()


def _parse_line(line: str) -> _RawRecord | None:
    """Parse one dump line; None means the line is malformed."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        return None
    if not isinstance(obj, dict):
        return None
    rec_id = obj.get("id")
    if not isinstance(rec_id, str) or not rec_id:
        return None
    parent_id = obj.get("parent_id")
    if parent_id is not None and not isinstance(parent_id, str):
        return None
    try:
        created = int(obj.get("created_utc", 0))
    except (TypeError, ValueError):
        return None
    return _RawRecord(
        id=rec_id,
        parent_id=parent_id,
        title=_normalize_text(obj.get("title")),
        body=_normalize_text(obj.get("body")),
        created_utc=created,
    )


def _strip_kind_prefix(ref: str) -> str:
    # Reddit fullnames prefix ids with t1_ (comment) / t3_ (post).
    if len(ref) > 3 and ref[:3] in ("t1_", "t3_") :
        return ref[3:]
    return ref


def ingest(dump_path: str | Path, store_dir: str | Path) -> CorpusStats:
    """Ingest a dump file into ``store_dir``, replacing any previous store.

    Malformed lines are skipped and counted; an unreadable dump file raises
    OSError carrying the path.
    """
    dump_path = Path(dump_path)
    stats = CorpusStats()
    records: list[_RawRecord] = []

    with dump_path.open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            stats.n_raw += 1
            rec = _parse_line(line)
            if rec is None:
                stats.n_malformed += 1
                continue
            if rec.id in TOMBSTONES:
                stats.n_dropped_tombstone_id += 1
                continue
            if rec.body in TOMBSTONES:
                stats.n_dropped_tombstone_body += 1
                continue
            records.append(rec)

    posts: dict[str, dict] = {}
    post_order: list[str] = []
    comment_recs: list[_RawRecord] = []
    for rec in records:
        if rec.is_comment:
            comment_recs.append(rec)
        else:
            if not (rec.title or rec.body):
                stats.n_dropped_empty += 1
                continue
            if rec.id not in posts:
                posts[rec.id] = {
                    "id": rec.id,
                    "title": rec.title,
                    "body": rec.body,
                    "created_utc": rec.created_utc,
                    "comment_ids": [],
                }
                post_order.append(rec.id)

    # Duplicate ids keep their first occurrence, mirroring post handling;
    # a comment id shadowing a post id is dropped outright.
    seen_ids: set[str] = set(posts)
    unique_recs = []
    for rec in comment_recs:
        if rec.id in seen_ids:
            continue
        seen_ids.add(rec.id)
        unique_recs.append(rec)
    comment_recs = unique_recs

    # Resolve comment parents transitively: a comment survives iff its
    # parent chain ends at a surviving post.
    by_id = {rec.id: rec for rec in comment_recs}
    children: dict[str, list[str]] = {}
    for rec in comment_recs:
        if not rec.body:
            stats.n_dropped_empty += 1
            continue
        parent = rec.parent_id or ""
        resolved = parent if parent in posts or parent in by_id else _strip_kind_prefix(parent)
        children.setdefault(resolved, []).append(rec.id)

    comments: dict[str, dict] = {}
    dropped_orphans = 0

    for post_id in post_order:
        # Depth-first pre-order flattens the reply tree into the order the
        # post-detail view renders.
        stack = [(cid, 0) for cid in reversed(children.get(post_id, []))]
        while stack:
            comment_id, depth = stack.pop()
            rec = by_id[comment_id]
            comments[comment_id] = {
                "id": rec.id,
                "post_id": post_id,
                "body": rec.body,
                "created_utc": rec.created_utc,
                "depth": depth,
            }
            posts[post_id]["comment_ids"].append(comment_id)
            stack.extend(
                (child_id, depth + 1)
                for child_id in reversed(children.get(comment_id, []))
            )

    dropped_orphans = sum(
        1 for rec in comment_recs if rec.body and rec.id not in comments
    )
    stats.n_dropped_orphan = dropped_orphans
    stats.n_posts = len(posts)
    stats.n_comments = len(comments)

    store_dir = Path(store_dir)
    store_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "version": STORE_VERSION,
        "posts": posts,
        "comments": comments,
        "post_order": post_order,
    }
    _write_canonical(store_dir / STORE_FILENAME, payload)
    _write_canonical(store_dir / STATS_FILENAME, stats.to_dict())
    return stats


def _write_canonical(path: Path, obj: dict) -> None:
    data = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    path.write_bytes(data.encode("utf-8"))


class CorpusStore:
    """Read-only view over an ingested corpus."""

    def __init__(self, posts: dict[str, Post], comments: dict[str, Comment],
                 post_order: list[str]):
        self._posts = posts
        self._comments = comments
        self._post_order = post_order

    @classmethod
    def load(cls, store_dir: str | Path) -> "CorpusStore":
        path = Path(store_dir) / STORE_FILENAME
        if not path.exists():
            raise FileNotFoundError(
                f"no corpus store at {path}; run `supportlens ingest` first"
            )
        raw = json.loads(path.read_text("utf-8"))
        posts = {
            pid: Post(
                id=p["id"],
                title=p["title"],
                body=p["body"],
                created_utc=p["created_utc"],
                comment_ids=tuple(p["comment_ids"]),
            )
            for pid, p in raw["posts"].items()
        }
        comments = {
            cid: Comment(
                id=c["id"],
                post_id=c["post_id"],
                body=c["body"],
                created_utc=c["created_utc"],
                depth=c["depth"],
            )
            for cid, c in raw["comments"].items()
        }
        return cls(posts, comments, list(raw["post_order"]))

    def __len__(self) -> int:
        return len(self._posts)

    @property
    def post_ids(self) -> list[str]:
        return list(self._post_order)

    def has_post(self, post_id: str) -> bool:
        return post_id in self._posts

    def get_post(self, post_id: str) -> tuple[Post, list[Comment]]:
        """Return a post and its comments in stored order."""
        if post_id not in self._posts:
            raise NotFoundError(f"unknown post id: {post_id!r}")
        post = self._posts[post_id]
        return post, [self._comments[cid] for cid in post.comment_ids]

    def get_comment(self, comment_id: str) -> Comment:
        if comment_id not in self._comments:
            raise NotFoundError(f"unknown comment id: {comment_id!r}")
        return self._comments[comment_id]

    def has_comment(self, comment_id: str) -> bool:
        return comment_id in self._comments

    def iter_posts(self):
        for pid in self._post_order:
            yield self._posts[pid]

    def iter_comments(self):
        for post in self.iter_posts():
            for cid in post.comment_ids:
                yield self._comments[cid]


def load_stats(store_dir: str | Path) -> CorpusStats:
    raw = json.loads((Path(store_dir) / STATS_FILENAME).read_text("utf-8"))
    return CorpusStats(**raw)
