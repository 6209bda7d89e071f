"""Shared fixtures: canned dumps, a small thread corpus, and the larger
generated "desk" corpus used by server and end-to-end tests."""
from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from supportlens import corpus as corpus_mod
from supportlens.corpus import CorpusStore
from supportlens.labeling import HeuristicProvider, label_all
from supportlens.search import build_index
from supportlens.similarity import compute_pairs
from supportlens.topics import fit_lda

FIXTURES = Path(__file__).parent / "fixtures"

# 6 records: 2 posts, 3 comments (one with a tombstone body), and one
# record whose id is itself a tombstone. Expected surviving counts: 2 + 2.
SIX_RECORDS = [
    {"id": "p1", "title": "Sleepless before exams",
     "body": "I cannot sleep before my exams. Any advice?", "created_utc": 100},
    {"id": "p2", "title": "Morning panic",
     "body": "Panic every morning lately and it will not ease.", "created_utc": 101},
    {"id": "c1", "parent_id": "p1",
     "body": "Try chamomile tea and no screens after ten.", "created_utc": 102},
    {"id": "c2", "parent_id": "c1",
     "body": "Seconding this, it helped me a lot.", "created_utc": 103},
    {"id": "c3", "parent_id": "p2", "body": "[deleted]", "created_utc": 104},
    {"id": "[deleted]", "parent_id": "p2", "body": "gone", "created_utc": 105},
]


def write_dump(path: Path, records: list[dict]) -> Path:
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return path


@pytest.fixture
def six_record_dump(tmp_path) -> Path:
    return write_dump(tmp_path / "dump.jsonl", SIX_RECORDS)


# A hand-sized thread corpus: t1 carries three comments (one nested), only
# t1 and t2 mention "exam", t3 shares no topical vocabulary with them.
THREAD_RECORDS = [
    {"id": "t1", "title": "Struggling to sleep before the exam",
     "body": "The exam is on Monday and I cannot sleep at all. My brain "
             "replays every mistake. How do I calm down enough to rest?",
     "created_utc": 10},
    {"id": "t2", "title": "Exam stress is eating my evenings",
     "body": "Every evening disappears into dread about the exam results. "
             "Any advice for switching off?",
     "created_utc": 11},
    {"id": "t3", "title": "Sunday walks helped my mood",
     "body": "Started taking long Sunday walks around the park and my mood "
             "lifted noticeably. Highly recommend the habit.",
     "created_utc": 12},
    {"id": "c1", "parent_id": "t1",
     "body": "Try a fixed wind-down hour: no screens, dim lights, and slow "
             "breathing. It helped me before finals.",
     "created_utc": 13},
    {"id": "c2", "parent_id": "c1",
     "body": "Seconding the breathing part. Practice it during the day too.",
     "created_utc": 14},
    {"id": "c3", "parent_id": "t1",
     "body": "I'm sorry you are going through this. You are not alone; exam "
             "season wrecks my sleep as well. Hang in there.",
     "created_utc": 15},
    {"id": "c4", "parent_id": "t2",
     "body": "Take a proper break after dinner and write down tomorrow's "
             "worries. It works for me.",
     "created_utc": 16},
]


@pytest.fixture(scope="session")
def thread_store_dir(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("thread")
    dump = write_dump(root / "dump.jsonl", THREAD_RECORDS)
    store_dir = root / "store"
    corpus_mod.ingest(dump, store_dir)
    store = CorpusStore.load(store_dir)
    build_index(store).save(store_dir)
    label_all(store, HeuristicProvider()).save(store_dir)
    # 0.1 keeps the exam threads (cosine ~0.15) as a similar pair.
    compute_pairs(store, threshold=0.1).save(store_dir)
    return store_dir


@pytest.fixture(scope="session")
def thread_store(thread_store_dir) -> CorpusStore:
    return CorpusStore.load(thread_store_dir)


# -- generated desk corpus ------------------------------------------------

_THEMES = {
    "sleep": ["sleep", "insomnia", "melatonin", "bedtime", "caffeine",
              "nights", "restless", "dreams", "pillow", "snoring"],
    "exam": ["exam", "studying", "grades", "revision", "finals",
             "deadline", "lectures", "campus", "notes", "quiz"],
    "work": ["work", "manager", "meetings", "burnout", "office",
             "shift", "email", "coworkers", "projects", "review"],
    "social": ["friends", "crowds", "parties", "smalltalk", "dating",
               "family", "neighbors", "gatherings", "texting", "visits"],
}

_SEEK_EMO = [
    "I feel overwhelmed and anxious about {a} and {b} lately.",
    "I am so scared of {a}; some nights I end up crying about {b}.",
    "Honestly exhausted and worried sick about {a} and {b}.",
    "The {a} situation leaves me hopeless and I am so tired of {b}.",
]
_SEEK_INFO = [
    "How do I handle {a} without losing my mind over {b}? Any advice?",
    "What should I change about {a}? Has anyone fixed their {b}?",
    "Any tips for {a}? I need advice about {b} too.",
    "Does anyone know whether {a} affects {b}? Recommendations welcome.",
]
_NEUTRAL = [
    "Mostly writing this down so I remember how the {a} phase went.",
    "An update on {a}: nothing dramatic, just tracking the {b} pattern.",
    "Sharing a small note about {a} and {b} for anyone curious.",
]
_COMMENT_INFO = [
    "Try building a routine around {a}; take breaks and practice breathing.",
    "Consider cutting {a} for two weeks and write down how {b} responds.",
    "Start small: avoid {a} after lunch and drink water instead.",
    "Talk to someone qualified about {a}; therapy helped me with {b}.",
]
_COMMENT_EMO = [
    "I'm sorry {a} is weighing on you. You are not alone in this.",
    "Been there with {a}; hang in there, it gets better.",
    "Sending hugs. Stay strong about {a}, you've got this.",
    "I understand how heavy {a} feels; thinking of you.",
]
_COMMENT_PLAIN = [
    "Following this thread because my {a} looks similar.",
    "Interesting point about {a}; had not considered the {b} angle.",
]


def generate_desk_records(n_posts: int = 200, seed: int = 42) -> list[dict]:
    """Deterministic themed corpus: titles carry theme words so searches
    like "exam sleep" select a stable subset."""
    rng = random.Random(seed)
    records = []
    theme_names = list(_THEMES)
    for i in range(n_posts):
        theme = theme_names[i % len(theme_names)]
        words = _THEMES[theme]
        a, b = rng.sample(words, 2)
        kind = rng.random()
        if kind < 0.4:
            body_tpl = rng.choice(_SEEK_EMO)
        elif kind < 0.8:
            body_tpl = rng.choice(_SEEK_INFO)
        else:
            body_tpl = rng.choice(_NEUTRAL)
        sentences = [body_tpl.format(a=a, b=b)]
        for _ in range(rng.randint(1, 3)):
            extra = rng.choice(_SEEK_EMO + _SEEK_INFO + _NEUTRAL)
            c, d = rng.sample(words, 2)
            sentences.append(extra.format(a=c, b=d))
        post_id = f"d{i:03d}"
        records.append({
            "id": post_id,
            "title": f"{theme} thread {i}: {a} and {b}",
            "body": " ".join(sentences),
            "created_utc": 1_000_000 + i,
        })
        for j in range(rng.randint(1, 4)):
            roll = rng.random()
            if roll < 0.45:
                tpl = rng.choice(_COMMENT_INFO)
            elif roll < 0.85:
                tpl = rng.choice(_COMMENT_EMO)
            else:
                tpl = rng.choice(_COMMENT_PLAIN)
            c, d = rng.sample(words, 2)
            parent = post_id if j == 0 or rng.random() < 0.7 else f"{post_id}c0"
            records.append({
                "id": f"{post_id}c{j}",
                "parent_id": parent,
                "body": tpl.format(a=c, b=d),
                "created_utc": 1_000_000 + i * 10 + j,
            })
    return records


@pytest.fixture(scope="session")
def desk_dump(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("desk")
    return write_dump(root / "dump.jsonl", generate_desk_records())


@pytest.fixture(scope="session")
def desk_store_dir(desk_dump) -> Path:
    store_dir = desk_dump.parent / "store"
    corpus_mod.ingest(desk_dump, store_dir)
    store = CorpusStore.load(store_dir)
    build_index(store).save(store_dir)
    label_all(store, HeuristicProvider()).save(store_dir)
    compute_pairs(store).save(store_dir)
    return store_dir


@pytest.fixture(scope="session")
def warm_lda():
    """Compile the numba kernels once so timed tests measure the algorithm,
    not the JIT."""
    docs = [("w1", "alpha beta gamma delta"), ("w2", "epsilon zeta eta theta")]
    model = fit_lda(docs, k=2, seed=0, iterations=10)
    from supportlens.topics import assign_topics

    assign_topics(model, docs + [("w3", "alpha epsilon")])
    return True


@pytest.fixture(scope="session")
def calibration_rows() -> list[dict]:
    rows = []
    with (FIXTURES / "calibration.jsonl").open("r", encoding="utf-8") as fh:
        for line in fh:
            rows.append(json.loads(line))
    return rows
