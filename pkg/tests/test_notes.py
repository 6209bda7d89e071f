"""Highlight anchoring, same-color merging, folders, and persistence."""
from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supportlens.errors import NotFoundError, ValidationError
from supportlens.notes import Anchor, NoteStore

BODIES = {
    "t1": "I cannot sleep before my exams. Any advice would help me a lot.",
    "c1": "Try chamomile tea and no screens after ten in the evening.",
    "c2": "Seconding this, it helped me through finals week last year.",
}


def resolve(target: str) -> str:
    if target not in BODIES:
        raise NotFoundError(f"unknown target: {target!r}")
    return BODIES[target]


def make_store(palette=("yellow", "green", "red")) -> NoteStore:
    return NoteStore(resolve, palette)


def anchor(target: str, start: int, end: int) -> Anchor:
    return Anchor(target, start, end, BODIES[target][start:end])


# -- anchors ---------------------------------------------------------------


def test_anchor_rejects_bad_spans():
    with pytest.raises(ValidationError, match="bad span"):
        Anchor("t1", -1, 3, "abc")
    with pytest.raises(ValidationError, match="bad span"):
        Anchor("t1", 5, 5, "")
    with pytest.raises(ValidationError, match="bad span"):
        Anchor("t1", 7, 3, "x")


def test_anchor_validate_against_body():
    good = anchor("t1", 9, 14)
    good.validate_against(BODIES["t1"])
    past_end = Anchor("t1", 0, 10_000, "x" * 10_000)
    with pytest.raises(ValidationError, match="exceeds body length"):
        past_end.validate_against(BODIES["t1"])
    drifted = Anchor("t1", 9, 14, "wrong")
    with pytest.raises(ValidationError, match="anchor text mismatch"):
        drifted.validate_against(BODIES["t1"])


def test_add_and_navigate_round_trip():
    store = make_store()
    added = store.add_highlight(anchor("t1", 9, 14), "yellow")
    assert added.anchor.exact_text == "sleep"
    back = store.navigate(added.id)
    assert BODIES[back.target][back.char_start:back.char_end] == "sleep"
    assert store.get(added.id) == added


def test_add_rejects_unknown_target_and_color():
    store = make_store()
    with pytest.raises(NotFoundError, match="unknown target"):
        store.add_highlight(Anchor("zz", 0, 3, "abc"), "yellow")
    with pytest.raises(ValidationError, match="not in palette"):
        store.add_highlight(anchor("t1", 0, 3), "mauve")


def test_add_rejects_drifted_anchor():
    store = make_store()
    with pytest.raises(ValidationError, match="anchor text mismatch"):
        store.add_highlight(Anchor("t1", 0, 3, "zzz"), "yellow")


@settings(max_examples=60, deadline=None)
@given(
    target=st.sampled_from(sorted(BODIES)),
    start=st.integers(min_value=0, max_value=50),
    length=st.integers(min_value=1, max_value=12),
)
def test_random_anchors_resolve_exact_text(target, start, length):
    body = BODIES[target]
    end = min(start + length, len(body))
    if start >= end:
        return
    store = make_store()
    h = store.add_highlight(Anchor(target, start, end, body[start:end]), "green")
    resolved = store.navigate(h.id)
    assert body[resolved.char_start:resolved.char_end] == resolved.exact_text


# -- same-color merging ----------------------------------------------------


def interval_union(spans: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Oracle: merge overlapping-or-touching [start, end) intervals."""
    merged: list[tuple[int, int]] = []
    for start, end in sorted(spans):
        if merged and start <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


def test_overlapping_spans_merge_to_keeper():
    store = make_store()
    first = store.add_highlight(anchor("t1", 0, 5), "yellow")
    merged = store.add_highlight(anchor("t1", 3, 9), "yellow")
    assert merged.id == first.id  # earliest seq wins
    assert (merged.anchor.char_start, merged.anchor.char_end) == (0, 9)
    assert merged.anchor.exact_text == BODIES["t1"][0:9]
    assert len(store.all_highlights()) == 1


def test_touching_spans_merge_disjoint_spans_do_not():
    store = make_store()
    store.add_highlight(anchor("t1", 0, 5), "yellow")
    touched = store.add_highlight(anchor("t1", 5, 9), "yellow")
    assert (touched.anchor.char_start, touched.anchor.char_end) == (0, 9)
    store.add_highlight(anchor("t1", 20, 25), "yellow")
    spans = [(h.anchor.char_start, h.anchor.char_end) for h in store.overlays("t1")]
    assert spans == [(0, 9), (20, 25)]


def test_merge_drops_edited_text_of_merged_entries():
    store = make_store()
    first = store.add_highlight(anchor("t1", 0, 5), "yellow")
    store.edit_entry(first.id, "my own words")
    assert store.get(first.id).text == "my own words"
    merged = store.add_highlight(anchor("t1", 4, 9), "yellow")
    # The edit referred to the narrower span, so the merge discards it.
    assert merged.id == first.id
    assert merged.edited_text is None
    assert merged.text == BODIES["t1"][0:9]


def test_disjoint_add_preserves_existing_edit():
    store = make_store()
    first = store.add_highlight(anchor("t1", 0, 5), "yellow")
    store.edit_entry(first.id, "kept")
    store.add_highlight(anchor("t1", 30, 36), "yellow")
    assert store.get(first.id).text == "kept"


def test_different_colors_never_merge():
    store = make_store()
    store.add_highlight(anchor("t1", 0, 5), "yellow")
    store.add_highlight(anchor("t1", 3, 9), "green")
    overlays = store.overlays("t1")
    assert len(overlays) == 2
    assert {h.color for h in overlays} == {"yellow", "green"}


def test_different_targets_never_merge():
    store = make_store()
    store.add_highlight(anchor("t1", 0, 5), "yellow")
    store.add_highlight(anchor("c1", 0, 5), "yellow")
    assert len(store.all_highlights()) == 2


@settings(max_examples=80, deadline=None)
@given(
    spans=st.lists(
        st.tuples(st.integers(min_value=0, max_value=55),
                  st.integers(min_value=1, max_value=12)),
        min_size=1, max_size=15,
    )
)
def test_merge_matches_interval_union_oracle(spans):
    body = BODIES["t1"]
    store = make_store()
    clipped = []
    for start, length in spans:
        end = min(start + length, len(body))
        clipped.append((start, end))
        store.add_highlight(Anchor("t1", start, end, body[start:end]), "red")
    got = [(h.anchor.char_start, h.anchor.char_end) for h in store.overlays("t1")]
    assert got == interval_union(clipped)
    for h in store.overlays("t1"):
        assert h.anchor.exact_text == body[h.anchor.char_start:h.anchor.char_end]


# -- folders and mutation ops ---------------------------------------------


def test_folders_partition_by_color():
    store = make_store()
    y = store.add_highlight(anchor("t1", 0, 5), "yellow")
    g = store.add_highlight(anchor("c1", 0, 3), "green")
    y2 = store.add_highlight(anchor("c2", 0, 9), "yellow")
    folders = {f.color: f.entries for f in store.folders()}
    assert folders["yellow"] == (y.id, y2.id)  # seq order
    assert folders["green"] == (g.id,)
    assert folders["red"] == ()
    assert store.folder_texts("yellow") == [y.text, y2.text]
    with pytest.raises(ValidationError, match="not in palette"):
        store.folder("mauve")


def test_recolor_moves_folders_and_can_merge():
    store = make_store()
    y = store.add_highlight(anchor("t1", 0, 5), "yellow")
    g = store.add_highlight(anchor("t1", 3, 9), "green")
    moved = store.recolor(g.id, "yellow")
    # Lands in yellow and merges with the overlapping yellow span.
    assert moved.id == y.id
    assert (moved.anchor.char_start, moved.anchor.char_end) == (0, 9)
    assert store.folder("green").entries == ()
    assert store.folder("yellow").entries == (y.id,)


def test_recolor_same_color_is_noop():
    store = make_store()
    h = store.add_highlight(anchor("t1", 0, 5), "yellow")
    before = store.revision("yellow")
    assert store.recolor(h.id, "yellow") == h
    assert store.revision("yellow") == before


def test_clear_removes_highlight():
    store = make_store()
    h = store.add_highlight(anchor("t1", 0, 5), "yellow")
    store.clear(h.id)
    assert store.all_highlights() == []
    with pytest.raises(NotFoundError, match="unknown highlight"):
        store.get(h.id)
    with pytest.raises(NotFoundError):
        store.clear(h.id)


def test_revision_counters_track_mutations():
    store = make_store()
    assert store.revision("yellow") == 0
    h = store.add_highlight(anchor("t1", 0, 5), "yellow")
    assert store.revision("yellow") == 1
    store.edit_entry(h.id, "edited")
    assert store.revision("yellow") == 2
    store.recolor(h.id, "green")
    assert store.revision("yellow") == 3
    assert store.revision("green") == 1
    store.clear(h.id)
    assert store.revision("green") == 2
    with pytest.raises(ValidationError):
        store.revision("mauve")


def test_random_ops_keep_folder_partition_invariant():
    rng = random.Random(9)
    store = make_store()
    palette = store.palette
    targets = sorted(BODIES)
    for _ in range(200):
        ids = [h.id for h in store.all_highlights()]
        roll = rng.random()
        if roll < 0.5 or not ids:
            target = rng.choice(targets)
            body = BODIES[target]
            start = rng.randrange(0, len(body) - 1)
            end = rng.randrange(start + 1, min(len(body), start + 15) + 1)
            store.add_highlight(
                Anchor(target, start, end, body[start:end]), rng.choice(palette)
            )
        elif roll < 0.7:
            store.recolor(rng.choice(ids), rng.choice(palette))
        elif roll < 0.85:
            store.clear(rng.choice(ids))
        else:
            store.edit_entry(rng.choice(ids), "edited note")
        # Partition: every highlight in exactly one folder.
        folder_ids = [hid for f in store.folders() for hid in f.entries]
        assert sorted(folder_ids) == sorted(h.id for h in store.all_highlights())
        assert len(folder_ids) == len(set(folder_ids))
        # Normal form: same-color overlays on a target never touch.
        for target in targets:
            for color in palette:
                spans = [
                    (h.anchor.char_start, h.anchor.char_end)
                    for h in store.overlays(target) if h.color == color
                ]
                for (s1, e1), (s2, e2) in zip(spans, spans[1:]):
                    assert s2 > e1
        for h in store.all_highlights():
            assert h.anchor.exact_text == BODIES[h.anchor.target][
                h.anchor.char_start:h.anchor.char_end
            ]


# -- palette validation ----------------------------------------------------


def test_palette_validation():
    with pytest.raises(ValidationError, match="1..8"):
        NoteStore(resolve, ())
    with pytest.raises(ValidationError, match="1..8"):
        NoteStore(resolve, tuple(f"c{i}" for i in range(9)))
    with pytest.raises(ValidationError, match="unique"):
        NoteStore(resolve, ("blue", "blue"))
    wide = NoteStore(resolve, tuple(f"c{i}" for i in range(8)))
    assert len(wide.palette) == 8


# -- persistence -----------------------------------------------------------


def test_payload_round_trip():
    store = make_store()
    a = store.add_highlight(anchor("t1", 0, 5), "yellow")
    store.edit_entry(a.id, "edited words")
    store.add_highlight(anchor("c1", 4, 13), "green")
    payload = store.to_payload()
    reloaded = NoteStore.from_payload(payload, resolve)
    assert reloaded.palette == store.palette
    assert reloaded.all_highlights() == store.all_highlights()
    assert reloaded.revision("yellow") == store.revision("yellow")
    fresh = reloaded.add_highlight(anchor("c2", 0, 9), "red")
    assert fresh.seq == store._next_seq  # ids keep advancing, no collisions


def test_from_payload_validates_anchors():
    store = make_store()
    store.add_highlight(anchor("t1", 0, 5), "yellow")
    payload = store.to_payload()
    payload["highlights"][0]["exact_text"] = "corrupted"
    with pytest.raises(ValidationError, match="anchor text mismatch"):
        NoteStore.from_payload(payload, resolve)
