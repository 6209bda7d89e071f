"""Topic clustering of a search working set via collapsed Gibbs LDA.

Defaults follow common practice: ``alpha = 50 / k``, ``beta = 0.01``, 500
Gibbs sweeps. The sampler is deterministic given (corpus, k, seed,
iterations). The serving path fits one model per query over the top-ranked
hits with k = 4; :func:`sweep_k` reports UMass coherence for other k.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ValidationError
from .text import tokenize

DEFAULT_K = 4
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 500
DEFAULT_KEYWORDS = 5
_FOLD_IN_SWEEPS = 50


@dataclass(frozen=True)
class TopicAssignment:
    post_id: str
    topic_id: int
    proportion: float
    empty: bool = False


@dataclass(frozen=True)
class KeywordSet:
    topic_id: int
    keywords: tuple[str, ...]


@dataclass
class TopicModel:
    k: int
    alpha: float
    beta: float
    seed: int
    iterations: int
    vocab: list[str]
    topic_word_counts: np.ndarray  # (k, V) integer counts
    doc_topic_counts: np.ndarray  # (D, k) integer counts for training docs
    doc_ids: list[str]
    _vocab_index: dict[str, int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._vocab_index:
            self._vocab_index = {w: i for i, w in enumerate(self.vocab)}

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def phi(self) -> np.ndarray:
        """Topic-word distributions, each row summing to 1."""
        counts = self.topic_word_counts.astype(np.float64) + self.beta
        return counts / counts.sum(axis=1, keepdims=True)

    def theta_for(self, doc_index: int) -> np.ndarray:
        row = self.doc_topic_counts[doc_index].astype(np.float64) + self.alpha
        return row / row.sum()


@njit(cache=True)
def _gibbs(doc_of_token, word_of_token, n_docs, vocab_size, k,
           alpha, beta, iterations, seed):  # pragma: no cover - jitted
    np.random.seed(seed)
    n_tokens = doc_of_token.shape[0]
    z = np.empty(n_tokens, np.int64)
    nkw = np.zeros((k, vocab_size), np.int64)
    nk = np.zeros(k, np.int64)
    ndk = np.zeros((n_docs, k), np.int64)
    for i in range(n_tokens):
        t = np.random.randint(0, k)
        z[i] = t
        nkw[t, word_of_token[i]] += 1
        nk[t] += 1
        ndk[doc_of_token[i], t] += 1
    probs = np.empty(k, np.float64)
    v_beta = vocab_size * beta
    for _ in range(iterations):
        for i in range(n_tokens):
            w = word_of_token[i]
            d = doc_of_token[i]
            t = z[i]
            nkw[t, w] -= 1
            nk[t] -= 1
            ndk[d, t] -= 1
            total = 0.0
            for j in range(k):
                # Doc-length denominator dropped: constant across topics.
                p = (nkw[j, w] + beta) / (nk[j] + v_beta) * (ndk[d, j] + alpha)
                probs[j] = p
                total += p
            r = np.random.random() * total
            acc = 0.0
            t_new = k - 1
            for j in range(k):
                acc += probs[j]
                if r < acc:
                    t_new = j
                    break
            z[i] = t_new
            nkw[t_new, w] += 1
            nk[t_new] += 1
            ndk[d, t_new] += 1
    return z, nkw, ndk


@njit(cache=True)
def _fold_in(word_ids, nkw, nk, k, alpha, beta, sweeps, seed):  # pragma: no cover
    np.random.seed(seed)
    vocab_size = nkw.shape[1]
    v_beta = vocab_size * beta
    n_tokens = word_ids.shape[0]
    z = np.empty(n_tokens, np.int64)
    dk = np.zeros(k, np.int64)
    for i in range(n_tokens):
        t = np.random.randint(0, k)
        z[i] = t
        dk[t] += 1
    probs = np.empty(k, np.float64)
    for _ in range(sweeps):
        for i in range(n_tokens):
            w = word_ids[i]
            t = z[i]
            dk[t] -= 1
            total = 0.0
            for j in range(k):
                p = (nkw[j, w] + beta) / (nk[j] + v_beta) * (dk[j] + alpha)
                probs[j] = p
                total += p
            r = np.random.random() * total
            acc = 0.0
            t_new = k - 1
            for j in range(k):
                acc += probs[j]
                if r < acc:
                    t_new = j
                    break
            z[i] = t_new
            dk[t_new] += 1
    return dk


def fit_lda(docs: list[tuple[str, str]], k: int = DEFAULT_K, seed: int = 0,
            iterations: int = DEFAULT_ITERATIONS, alpha: float | None = None,
            beta: float = DEFAULT_BETA) -> TopicModel:
    """Fit an LDA model over (doc_id, text) pairs.

    Documents that tokenize to nothing are kept out of the token stream but
    remain addressable; at least ``k`` non-empty documents are required.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if alpha is None:
        alpha = 50.0 / k
    tokenized = [(doc_id, tokenize(text)) for doc_id, text in docs]
    n_nonempty = sum(1 for _, toks in tokenized if toks)
    if n_nonempty < k:
        raise ValidationError(
            f"only {n_nonempty} non-empty documents after tokenization; "
            f"lower k (currently {k})"
        )
    vocab = sorted({tok for _, toks in tokenized for tok in toks})
    vocab_index = {w: i for i, w in enumerate(vocab)}
    doc_ids = [doc_id for doc_id, _ in tokenized]
    doc_of_token: list[int] = []
    word_of_token: list[int] = []
    for d, (_, toks) in enumerate(tokenized):
        for tok in toks:
            doc_of_token.append(d)
            word_of_token.append(vocab_index[tok])
    _, nkw, ndk = _gibbs(
        np.asarray(doc_of_token, dtype=np.int64),
        np.asarray(word_of_token, dtype=np.int64),
        len(doc_ids),
        len(vocab),
        k,
        float(alpha),
        float(beta),
        int(iterations),
        int(seed),
    )
    return TopicModel(
        k=k, alpha=float(alpha), beta=float(beta), seed=int(seed),
        iterations=int(iterations), vocab=vocab,
        topic_word_counts=np.asarray(nkw), doc_topic_counts=np.asarray(ndk),
        doc_ids=list(doc_ids),
    )


def assign_topics(model: TopicModel, docs: list[tuple[str, str]]) -> list[TopicAssignment]:
    """Assign each document its argmax topic.

    Training documents reuse their fitted counts; unseen documents are
    folded in with a short seeded Gibbs pass against the frozen model.
    Documents with no known tokens get topic 0 at proportion 1/k, flagged.
    """
    train_index = {doc_id: i for i, doc_id in enumerate(model.doc_ids)}
    nk = model.topic_word_counts.sum(axis=1)
    assignments = []
    for doc_id, text in docs:
        if doc_id in train_index:
            theta = model.theta_for(train_index[doc_id])
            if model.doc_topic_counts[train_index[doc_id]].sum() == 0:
                assignments.append(TopicAssignment(doc_id, 0, 1.0 / model.k, empty=True))
                continue
        else:
            word_ids = np.asarray(
                [model._vocab_index[t] for t in tokenize(text) if t in model._vocab_index],
                dtype=np.int64,
            )
            if word_ids.size == 0:
                assignments.append(TopicAssignment(doc_id, 0, 1.0 / model.k, empty=True))
                continue
            dk = _fold_in(
                word_ids, model.topic_word_counts, nk, model.k,
                model.alpha, model.beta, _FOLD_IN_SWEEPS, model.seed,
            )
            theta = (dk.astype(np.float64) + model.alpha)
            theta = theta / theta.sum()
        topic = int(np.argmax(theta))
        assignments.append(TopicAssignment(doc_id, topic, float(theta[topic])))
    return assignments


def topic_keywords(model: TopicModel, m: int = DEFAULT_KEYWORDS) -> list[KeywordSet]:
    """Top-m terms per topic by word probability, ties broken lexicographically."""
    if m <= 0:
        return [KeywordSet(t, ()) for t in range(model.k)]
    phi = model.phi()
    sets = []
    for t in range(model.k):
        ranked = sorted(zip(phi[t], model.vocab), key=lambda pv: (-pv[0], pv[1]))
        sets.append(KeywordSet(t, tuple(term for _, term in ranked[:m])))
    return sets


def umass_coherence(model: TopicModel, docs: list[tuple[str, str]], top_n: int = 10) -> float:
    """Mean UMass coherence of the model's topics over the given documents."""
    doc_terms = [set(tokenize(text)) for _, text in docs]
    keyword_sets = topic_keywords(model, m=top_n)

    def doc_freq(*terms: str) -> int:
        return sum(1 for terms_in_doc in doc_terms if all(t in terms_in_doc for t in terms))

    scores = []
    for ks in keyword_sets:
        words = list(ks.keywords)
        total = 0.0
        for i in range(1, len(words)):
            for j in range(i):
                denom = doc_freq(words[j])
                if denom == 0:
                    continue
                total += np.log((doc_freq(words[i], words[j]) + 1) / denom)
        scores.append(total)
    return float(np.mean(scores)) if scores else 0.0


def sweep_k(docs: list[tuple[str, str]], k_values: list[int], seed: int = 0,
            iterations: int = DEFAULT_ITERATIONS) -> list[tuple[int, float]]:
    """Fit one model per k and report (k, UMass coherence)."""
    out = []
    for k in k_values:
        model = fit_lda(docs, k=k, seed=seed, iterations=iterations)
        out.append((k, umass_coherence(model, docs)))
    return out
