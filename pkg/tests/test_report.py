"""Batch report output: CSV tables and rendered figure files."""
from __future__ import annotations

import csv

import pytest

from supportlens.config import AppConfig
from supportlens.labeling import LEVELS
from supportlens.report import generate_report

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def read_csv(path):
    with path.open(newline="", encoding="utf-8") as handle:
        return list(csv.reader(handle))


@pytest.fixture(scope="module")
def fast_config():
    return AppConfig(k=2, iterations=60, lda_seed=7, keywords_per_topic=3)


def test_corpus_report_files(thread_store_dir, tmp_path):
    written = generate_report(thread_store_dir, tmp_path / "out")
    assert [p.name for p in written] == [
        "posts.csv", "support_levels.png", "comment_counts.png",
    ]
    for path in written:
        assert path.exists() and path.stat().st_size > 0
    for path in written[1:]:
        assert path.read_bytes()[:8] == PNG_MAGIC


def test_posts_table_contents(thread_store_dir, tmp_path):
    generate_report(thread_store_dir, tmp_path)
    rows = read_csv(tmp_path / "posts.csv")
    assert rows[0] == ["post_id", "title", "n_comments",
                       "seeking_emotional", "seeking_informational"]
    by_id = {r[0]: r for r in rows[1:]}
    assert set(by_id) == {"t1", "t2", "t3"}
    assert by_id["t1"][2] == "3"
    assert by_id["t2"][2] == "1"
    assert by_id["t3"][2] == "0"
    for row in by_id.values():
        assert row[3] in LEVELS and row[4] in LEVELS


def test_query_report_adds_topic_outputs(thread_store_dir, tmp_path,
                                         fast_config, warm_lda):
    written = generate_report(thread_store_dir, tmp_path, query="exam",
                              config=fast_config)
    assert [p.name for p in written] == [
        "posts.csv", "support_levels.png", "comment_counts.png",
        "topics.csv", "topic_sizes.png",
    ]
    rows = read_csv(tmp_path / "posts.csv")
    assert rows[0][-3:] == ["rank", "score", "topic"]
    by_id = {r[0]: r for r in rows[1:]}
    for pid in ("t1", "t2"):
        rank, score, topic = by_id[pid][5:]
        assert int(rank) in (1, 2)
        assert float(score) > 0.0
        assert topic in ("0", "1")
    assert by_id["t3"][5:] == ["", "", ""]  # not matched by the query

    topic_rows = read_csv(tmp_path / "topics.csv")
    assert topic_rows[0] == ["topic_id", "n_posts", "keywords"]
    assert sum(int(r[1]) for r in topic_rows[1:]) == 2
    assert (tmp_path / "topic_sizes.png").read_bytes()[:8] == PNG_MAGIC


def test_query_without_hits_skips_topic_outputs(thread_store_dir, tmp_path,
                                                fast_config):
    written = generate_report(thread_store_dir, tmp_path, query="zzzzunseen",
                              config=fast_config)
    assert [p.name for p in written] == [
        "posts.csv", "support_levels.png", "comment_counts.png",
    ]
    rows = read_csv(tmp_path / "posts.csv")
    assert rows[0][-3:] == ["rank", "score", "topic"]
    assert all(r[5:] == ["", "", ""] for r in rows[1:])


def test_out_dir_is_created(thread_store_dir, tmp_path):
    nested = tmp_path / "a" / "b" / "reports"
    written = generate_report(thread_store_dir, nested)
    assert written[0].parent == nested
    assert nested.is_dir()


def test_tables_are_deterministic(thread_store_dir, tmp_path, fast_config,
                                  warm_lda):
    generate_report(thread_store_dir, tmp_path / "one", query="exam",
                    config=fast_config)
    generate_report(thread_store_dir, tmp_path / "two", query="exam",
                    config=fast_config)
    for name in ("posts.csv", "topics.csv"):
        assert (tmp_path / "one" / name).read_bytes() == \
            (tmp_path / "two" / name).read_bytes()
