"""Batch report: CSV tables plus matplotlib figures rendered to files.

Corpus-wide mode writes a per-post table, the support-level distribution
chart, and the comments-per-post histogram. With a query, the report also
runs the search -> clustering pipeline and adds per-topic tables and a
topic-size chart, so a run can be inspected without starting the server.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .config import AppConfig
from .corpus import CorpusStore
from .labeling import KINDS, LabelStore, LEVELS
from .search import SearchConfig, SearchIndex
from .topics import assign_topics, fit_lda, topic_keywords

_LEVEL_COLORS = {"high": "#2b6cb0", "medium": "#63a0d4", "low": "#c4dcf0"}


def _support_level_figure(store: CorpusStore, labels: LabelStore,
                          out_path: Path) -> None:
    groups = [
        ("posts seeking", [labels.post_labels(p.id) for p in store.iter_posts()]),
        ("comments providing", [labels.comment_labels(c.id) for c in store.iter_comments()]),
    ]
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, (title, rows) in zip(axes, groups):
        positions = range(len(KINDS))
        width = 0.25
        for offset, level in enumerate(LEVELS):
            counts = [
                sum(1 for r in rows if r.level_for(kind) == level)
                for kind in KINDS
            ]
            ax.bar(
                [p + (offset - 1) * width for p in positions],
                counts,
                width=width,
                label=level,
                color=_LEVEL_COLORS[level],
            )
        ax.set_xticks(list(positions))
        ax.set_xticklabels(KINDS)
        ax.set_title(title)
    axes[0].set_ylabel("count")
    axes[0].legend(title="level")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def _comment_count_figure(store: CorpusStore, out_path: Path) -> None:
    counts = [len(p.comment_ids) for p in store.iter_posts()]
    fig, ax = plt.subplots(figsize=(6, 4))
    upper = max(counts, default=0) + 1
    ax.hist(counts, bins=range(0, upper + 1), color="#2b6cb0", edgecolor="white")
    ax.set_xlabel("comments per post")
    ax.set_ylabel("posts")
    ax.set_title("Comment volume")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def _topic_size_figure(sizes: dict[int, int], keywords: dict[int, tuple[str, ...]],
                       out_path: Path) -> None:
    topics = sorted(sizes)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([str(t) for t in topics], [sizes[t] for t in topics], color="#2b6cb0")
    for i, t in enumerate(topics):
        ax.text(i, sizes[t], " ".join(keywords.get(t, ())[:3]),
                ha="center", va="bottom", fontsize=8, rotation=20)
    ax.set_xlabel("topic")
    ax.set_ylabel("posts")
    ax.set_title("Topic sizes")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def generate_report(store_dir: str | Path, out_dir: str | Path,
                    query: str = "", config: AppConfig | None = None) -> list[Path]:
    cfg = config or AppConfig()
    store = CorpusStore.load(Path(store_dir))
    labels = LabelStore.load(Path(store_dir))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    ranked: dict[str, tuple[int, float]] = {}
    topic_of: dict[str, int] = {}
    sizes: dict[int, int] = {}
    keywords: dict[int, tuple[str, ...]] = {}
    if query:
        index = SearchIndex.load(Path(store_dir))
        results = index.search(query, SearchConfig(n_top=cfg.n_top)).results
        ranked = {r.post_id: (r.rank, r.score) for r in results}
        docs = [(r.post_id, store.get_post(r.post_id)[0].text) for r in results]
        if docs:
            model = fit_lda(docs, k=min(cfg.k, len(docs)), seed=cfg.lda_seed,
                            iterations=cfg.iterations)
            topic_of = {
                a.post_id: a.topic_id for a in assign_topics(model, docs)
            }
            for topic in topic_of.values():
                sizes[topic] = sizes.get(topic, 0) + 1
            keywords = {
                ks.topic_id: ks.keywords
                for ks in topic_keywords(model, m=cfg.keywords_per_topic)
            }

    posts_csv = out / "posts.csv"
    with posts_csv.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        header = ["post_id", "title", "n_comments",
                  "seeking_emotional", "seeking_informational"]
        if query:
            header += ["rank", "score", "topic"]
        writer.writerow(header)
        for post in store.iter_posts():
            support = labels.post_labels(post.id)
            row = [
                post.id,
                post.title,
                len(post.comment_ids),
                support.level_for("emotional"),
                support.level_for("informational"),
            ]
            if query:
                rank, score = ranked.get(post.id, ("", ""))
                row += [rank, score, topic_of.get(post.id, "")]
            writer.writerow(row)
    written.append(posts_csv)

    figure = out / "support_levels.png"
    _support_level_figure(store, labels, figure)
    written.append(figure)

    figure = out / "comment_counts.png"
    _comment_count_figure(store, figure)
    written.append(figure)

    if query and sizes:
        topics_csv = out / "topics.csv"
        with topics_csv.open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["topic_id", "n_posts", "keywords"])
            for topic in sorted(sizes):
                writer.writerow(
                    [topic, sizes[topic], "|".join(keywords.get(topic, ()))]
                )
        written.append(topics_csv)

        figure = out / "topic_sizes.png"
        _topic_size_figure(sizes, keywords, figure)
        written.append(figure)

    return written
