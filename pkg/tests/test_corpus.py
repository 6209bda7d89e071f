"""Ingest pipeline: tombstones, orphans, ordering, canonical storage."""
from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from supportlens import corpus as corpus_mod
from supportlens.corpus import TOMBSTONES, CorpusStore, load_stats

from conftest import SIX_RECORDS, write_dump


def test_six_record_counts(six_record_dump, tmp_path):
    stats = corpus_mod.ingest(six_record_dump, tmp_path / "store")
    assert stats.n_raw == 6
    assert stats.n_posts == 2
    assert stats.n_comments == 2
    assert stats.n_dropped_tombstone_id == 1
    assert stats.n_dropped_tombstone_body == 1
    assert stats.n_dropped_orphan == 0
    assert stats.n_malformed == 0


def test_no_tombstone_bodies_survive(six_record_dump, tmp_path):
    corpus_mod.ingest(six_record_dump, tmp_path / "store")
    store = CorpusStore.load(tmp_path / "store")
    for post in store.iter_posts():
        assert post.body not in TOMBSTONES
        assert post.id not in TOMBSTONES
    for comment in store.iter_comments():
        assert comment.body not in TOMBSTONES
        assert comment.id not in TOMBSTONES


def test_orphan_comments_dropped_transitively(tmp_path):
    records = [
        {"id": "p1", "title": "t", "body": "alive", "created_utc": 1},
        # c1's parent post never exists; c2 hangs off c1, so both drop.
        {"id": "c1", "parent_id": "ghost", "body": "one", "created_utc": 2},
        {"id": "c2", "parent_id": "c1", "body": "two", "created_utc": 3},
        {"id": "c3", "parent_id": "p1", "body": "kept", "created_utc": 4},
    ]
    dump = write_dump(tmp_path / "d.jsonl", records)
    stats = corpus_mod.ingest(dump, tmp_path / "store")
    assert stats.n_posts == 1
    assert stats.n_comments == 1
    assert stats.n_dropped_orphan == 2
    store = CorpusStore.load(tmp_path / "store")
    assert [c.id for c in store.iter_comments()] == ["c3"]


def test_orphans_under_tombstoned_post_dropped(tmp_path):
    records = [
        {"id": "p1", "title": "t", "body": "[removed]", "created_utc": 1},
        {"id": "c1", "parent_id": "p1", "body": "stranded", "created_utc": 2},
    ]
    dump = write_dump(tmp_path / "d.jsonl", records)
    stats = corpus_mod.ingest(dump, tmp_path / "store")
    assert stats.n_posts == 0
    assert stats.n_comments == 0
    assert stats.n_dropped_tombstone_body == 1
    assert stats.n_dropped_orphan == 1


def test_dfs_preorder_and_depth(tmp_path):
    records = [
        {"id": "p1", "title": "t", "body": "root", "created_utc": 1},
        {"id": "a", "parent_id": "p1", "body": "first", "created_utc": 2},
        {"id": "b", "parent_id": "a", "body": "reply to first", "created_utc": 3},
        {"id": "c", "parent_id": "b", "body": "deep reply", "created_utc": 4},
        {"id": "d", "parent_id": "p1", "body": "second", "created_utc": 5},
        {"id": "e", "parent_id": "d", "body": "reply to second", "created_utc": 6},
    ]
    dump = write_dump(tmp_path / "d.jsonl", records)
    corpus_mod.ingest(dump, tmp_path / "store")
    store = CorpusStore.load(tmp_path / "store")
    post, comments = store.get_post("p1")
    assert [c.id for c in comments] == ["a", "b", "c", "d", "e"]
    assert [c.depth for c in comments] == [0, 1, 2, 0, 1]
    assert post.comment_ids == ("a", "b", "c", "d", "e")


def test_fullname_parent_prefixes_resolve(tmp_path):
    records = [
        {"id": "p1", "title": "t", "body": "root", "created_utc": 1},
        {"id": "a", "parent_id": "t3_p1", "body": "via post prefix", "created_utc": 2},
        {"id": "b", "parent_id": "t1_a", "body": "via comment prefix", "created_utc": 3},
    ]
    dump = write_dump(tmp_path / "d.jsonl", records)
    stats = corpus_mod.ingest(dump, tmp_path / "store")
    assert stats.n_comments == 2
    store = CorpusStore.load(tmp_path / "store")
    assert store.get_comment("b").depth == 1


def test_reingest_is_byte_identical(six_record_dump, tmp_path):
    store_a = tmp_path / "a"
    store_b = tmp_path / "b"
    corpus_mod.ingest(six_record_dump, store_a)
    corpus_mod.ingest(six_record_dump, store_b)
    for name in ("corpus.json", "stats.json"):
        assert (store_a / name).read_bytes() == (store_b / name).read_bytes()


def test_malformed_lines_skipped_and_counted(tmp_path):
    dump = tmp_path / "d.jsonl"
    lines = [
        json.dumps({"id": "p1", "title": "t", "body": "ok", "created_utc": 1}),
        "{not json",
        json.dumps(["a", "list"]),
        json.dumps({"title": "no id", "body": "x"}),
        json.dumps({"id": "p2", "title": "t2", "body": "fine", "created_utc": "soon"}),
    ]
    dump.write_text("\n".join(lines) + "\n", "utf-8")
    stats = corpus_mod.ingest(dump, tmp_path / "store")
    assert stats.n_malformed == 4
    assert stats.n_posts == 1


def test_empty_records_dropped(tmp_path):
    records = [
        {"id": "p1", "title": "", "body": "", "created_utc": 1},
        {"id": "p2", "title": "kept", "body": "", "created_utc": 2},
        {"id": "c1", "parent_id": "p2", "body": "", "created_utc": 3},
    ]
    dump = write_dump(tmp_path / "d.jsonl", records)
    stats = corpus_mod.ingest(dump, tmp_path / "store")
    assert stats.n_posts == 1
    assert stats.n_comments == 0
    assert stats.n_dropped_empty == 2


def test_store_lookup_api(six_record_dump, tmp_path):
    corpus_mod.ingest(six_record_dump, tmp_path / "store")
    store = CorpusStore.load(tmp_path / "store")
    assert len(store) == 2
    assert store.post_ids == ["p1", "p2"]
    assert store.has_post("p1") and not store.has_post("c1")
    assert store.has_comment("c1") and not store.has_comment("p1")
    post, comments = store.get_post("p1")
    assert post.title == "Sleepless before exams"
    assert [c.id for c in comments] == ["c1", "c2"]
    assert comments[1].depth == 1
    with pytest.raises(LookupError):
        store.get_post("nope")
    with pytest.raises(LookupError):
        store.get_comment("nope")


def test_post_text_joins_title_and_body(thread_store):
    post, _ = thread_store.get_post("t1")
    assert post.text.startswith(post.title)
    assert post.body in post.text


def test_stats_round_trip(six_record_dump, tmp_path):
    written = corpus_mod.ingest(six_record_dump, tmp_path / "store")
    loaded = load_stats(tmp_path / "store")
    assert loaded.to_dict() == written.to_dict()


def test_missing_store_raises_actionable_error(tmp_path):
    with pytest.raises(FileNotFoundError, match="supportlens ingest"):
        CorpusStore.load(tmp_path / "nowhere")


_record = st.fixed_dictionaries({
    "id": st.one_of(st.text(alphabet="abcdef123", min_size=1, max_size=4),
                    st.just("[deleted]")),
    "body": st.one_of(st.text(alphabet="xyz ", max_size=12),
                      st.sampled_from(["[deleted]", "[removed]"])),
    "created_utc": st.integers(min_value=0, max_value=10**9),
}).flatmap(
    lambda base: st.one_of(
        st.just(base | {"title": "t"}),
        st.just(base | {"parent_id": "p0"}),
    )
)


@settings(max_examples=40, deadline=None)
@given(records=st.lists(_record, max_size=30))
def test_no_tombstones_survive_any_input(records, tmp_path_factory):
    tmp = tmp_path_factory.mktemp("prop")
    dump = write_dump(tmp / "d.jsonl", [
        {"id": "p0", "title": "seed", "body": "seed post", "created_utc": 0},
        *records,
    ])
    corpus_mod.ingest(dump, tmp / "store")
    store = CorpusStore.load(tmp / "store")
    bodies = [p.body for p in store.iter_posts()]
    bodies += [c.body for c in store.iter_comments()]
    assert not any(b in TOMBSTONES for b in bodies)
    ids = [p.id for p in store.iter_posts()] + [c.id for c in store.iter_comments()]
    assert not any(i in TOMBSTONES for i in ids)
