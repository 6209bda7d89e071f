"""Anchored multi-color highlighting and color-keyed folders.

Anchors are character offsets into the body of one post or comment, so a
span can always be re-resolved and navigated back to. Source bodies are
immutable, which makes ``body[start:end] == exact_text`` hold for the
lifetime of a highlight. Highlights of one color on one target are kept
in normal form: spans that overlap or touch are merged into a single
spanning highlight. Different colors never merge (they carry different
meaning, e.g. agree vs could-try vs disagree).
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Iterable

from .errors import NotFoundError, ValidationError

DEFAULT_PALETTE = ("yellow", "green", "red")
MAX_PALETTE = 8


@dataclass(frozen=True)
class Anchor:
    target: str
    char_start: int
    char_end: int
    exact_text: str

    def __post_init__(self):
        if self.char_start < 0 or self.char_start >= self.char_end:
            raise ValidationError(
                f"bad span [{self.char_start}, {self.char_end}) on {self.target!r}"
            )

    def validate_against(self, body: str) -> None:
        if self.char_end > len(body):
            raise ValidationError(
                f"span [{self.char_start}, {self.char_end}) exceeds body length "
                f"{len(body)} on {self.target!r}"
            )
        found = body[self.char_start:self.char_end]
        if found != self.exact_text:
            raise ValidationError(
                f"anchor text mismatch on {self.target!r}"
                f"[{self.char_start}:{self.char_end}]: "
                f"expected {self.exact_text!r}, found {found!r}"
            )


@dataclass(frozen=True)
class Highlight:
    id: str
    anchor: Anchor
    color: str
    created_at: float
    seq: int
    edited_text: str | None = None

    @property
    def text(self) -> str:
        """What the folder entry displays."""
        return self.edited_text if self.edited_text is not None else self.anchor.exact_text


@dataclass(frozen=True)
class Folder:
    color: str
    entries: tuple[str, ...]


class NoteStore:
    """Per-session highlight state with folder views.

    ``resolve_body`` maps a target id (post or comment) to its body text
    and must raise NotFoundError for unknown ids.
    """

    def __init__(self, resolve_body: Callable[[str], str],
                 palette: Iterable[str] = DEFAULT_PALETTE):
        colors = tuple(palette)
        if not 1 <= len(colors) <= MAX_PALETTE:
            raise ValidationError(
                f"palette must have 1..{MAX_PALETTE} colors, got {len(colors)}"
            )
        if len(set(colors)) != len(colors):
            raise ValidationError("palette colors must be unique")
        self.palette = colors
        self._resolve_body = resolve_body
        self._highlights: dict[str, Highlight] = {}
        self._next_seq = 1
        self._revisions = {color: 0 for color in colors}

    # -- reads ------------------------------------------------------------

    def get(self, highlight_id: str) -> Highlight:
        if highlight_id not in self._highlights:
            raise NotFoundError(f"unknown highlight id: {highlight_id!r}")
        return self._highlights[highlight_id]

    def all_highlights(self) -> list[Highlight]:
        return sorted(self._highlights.values(), key=lambda h: h.seq)

    def folder(self, color: str) -> Folder:
        self._check_color(color)
        entries = tuple(
            h.id for h in self.all_highlights() if h.color == color
        )
        return Folder(color=color, entries=entries)

    def folders(self) -> list[Folder]:
        return [self.folder(color) for color in self.palette]

    def folder_texts(self, color: str) -> list[str]:
        return [self.get(hid).text for hid in self.folder(color).entries]

    def overlays(self, target: str) -> list[Highlight]:
        """Highlights on one post or comment, in span order."""
        return sorted(
            (h for h in self._highlights.values() if h.anchor.target == target),
            key=lambda h: (h.anchor.char_start, h.seq),
        )

    def revision(self, color: str) -> int:
        """Bumped on every mutation touching the color; lets callers tell
        whether a summary generated earlier is stale."""
        self._check_color(color)
        return self._revisions[color]

    def navigate(self, highlight_id: str) -> Anchor:
        return self.get(highlight_id).anchor

    # -- writes -----------------------------------------------------------

    def add_highlight(self, anchor: Anchor, color: str) -> Highlight:
        self._check_color(color)
        anchor.validate_against(self._resolve_body(anchor.target))
        highlight = Highlight(
            id=f"h{self._next_seq}",
            anchor=anchor,
            color=color,
            created_at=time.time(),
            seq=self._next_seq,
        )
        self._next_seq += 1
        self._highlights[highlight.id] = highlight
        self._merge(color, anchor.target)
        self._revisions[color] += 1
        return self._covering(color, anchor.target, anchor.char_start)

    def recolor(self, highlight_id: str, new_color: str) -> Highlight:
        self._check_color(new_color)
        highlight = self.get(highlight_id)
        if highlight.color == new_color:
            return highlight
        old_color = highlight.color
        self._highlights[highlight_id] = replace(highlight, color=new_color)
        self._merge(new_color, highlight.anchor.target)
        self._revisions[old_color] += 1
        self._revisions[new_color] += 1
        return self._covering(new_color, highlight.anchor.target,
                              highlight.anchor.char_start)

    def clear(self, highlight_id: str) -> None:
        highlight = self.get(highlight_id)
        del self._highlights[highlight_id]
        self._revisions[highlight.color] += 1

    def edit_entry(self, highlight_id: str, new_text: str) -> Highlight:
        highlight = self.get(highlight_id)
        self._highlights[highlight_id] = replace(highlight, edited_text=new_text)
        self._revisions[highlight.color] += 1
        return self._highlights[highlight_id]

    # -- internals --------------------------------------------------------

    def _check_color(self, color: str) -> None:
        if color not in self.palette:
            raise ValidationError(
                f"color {color!r} not in palette {list(self.palette)}"
            )

    def _merge(self, color: str, target: str) -> None:
        """Collapse overlapping-or-touching same-color spans on one target.

        A merged highlight keeps the earliest id and creation time; an
        edited_text survives only when nothing actually merged, since the
        edit referred to the old narrower span.
        """
        group = sorted(
            (h for h in self._highlights.values()
             if h.color == color and h.anchor.target == target),
            key=lambda h: (h.anchor.char_start, h.anchor.char_end),
        )
        if len(group) < 2:
            return
        body = self._resolve_body(target)
        run: list[Highlight] = [group[0]]
        run_end = group[0].anchor.char_end
        for highlight in group[1:]:
            if highlight.anchor.char_start <= run_end:
                run.append(highlight)
                run_end = max(run_end, highlight.anchor.char_end)
            else:
                self._collapse_run(run, body)
                run = [highlight]
                run_end = highlight.anchor.char_end
        self._collapse_run(run, body)

    def _collapse_run(self, run: list[Highlight], body: str) -> None:
        if len(run) < 2:
            return
        start = min(h.anchor.char_start for h in run)
        end = max(h.anchor.char_end for h in run)
        keeper = min(run, key=lambda h: h.seq)
        merged = replace(
            keeper,
            anchor=Anchor(keeper.anchor.target, start, end, body[start:end]),
            edited_text=None,
        )
        for highlight in run:
            del self._highlights[highlight.id]
        self._highlights[merged.id] = merged

    def _covering(self, color: str, target: str, pos: int) -> Highlight:
        """The unique post-merge highlight whose span covers pos."""
        for highlight in self._highlights.values():
            anchor = highlight.anchor
            if (highlight.color == color and anchor.target == target
                    and anchor.char_start <= pos < anchor.char_end):
                return highlight
        raise NotFoundError(f"no {color} highlight covers {target!r}@{pos}")

    # -- persistence ------------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "palette": list(self.palette),
            "next_seq": self._next_seq,
            "revisions": dict(self._revisions),
            "highlights": [
                {
                    "id": h.id,
                    "target": h.anchor.target,
                    "char_start": h.anchor.char_start,
                    "char_end": h.anchor.char_end,
                    "exact_text": h.anchor.exact_text,
                    "color": h.color,
                    "created_at": h.created_at,
                    "seq": h.seq,
                    "edited_text": h.edited_text,
                }
                for h in self.all_highlights()
            ],
        }

    @classmethod
    def from_payload(cls, payload: dict,
                     resolve_body: Callable[[str], str]) -> "NoteStore":
        store = cls(resolve_body, payload.get("palette", DEFAULT_PALETTE))
        for row in payload["highlights"]:
            anchor = Anchor(
                row["target"], row["char_start"], row["char_end"], row["exact_text"]
            )
            anchor.validate_against(resolve_body(anchor.target))
            highlight = Highlight(
                id=row["id"],
                anchor=anchor,
                color=row["color"],
                created_at=row["created_at"],
                seq=row["seq"],
                edited_text=row.get("edited_text"),
            )
            store._highlights[highlight.id] = highlight
        store._next_seq = payload.get(
            "next_seq",
            1 + max((h.seq for h in store._highlights.values()), default=0),
        )
        for color, rev in payload.get("revisions", {}).items():
            if color in store._revisions:
                store._revisions[color] = rev
        return store
