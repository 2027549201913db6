"""Latent topic model (collapsed Gibbs) and Hellinger similarity.

Training is sequential and fully seeded so the same corpus and seed give
bitwise-identical models. Document order is canonicalized before a seeded
shuffle, so shuffling the input corpus does not change the result.
"""
from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass

from .textkit import TokenizedText, stopwords

TOPIC_FORMAT_VERSION = 1

INFER_SWEEPS = 50


@dataclass
class TopicModel:
    K: int
    vocabulary: list[str]
    phi: list[list[float]]   # K rows of V word probabilities
    alpha: float
    beta: float
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {"version": TOPIC_FORMAT_VERSION, "K": self.K,
             "vocabulary": self.vocabulary, "phi": self.phi,
             "alpha": self.alpha, "beta": self.beta, "seed": self.seed},
            sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "TopicModel":
        obj = json.loads(text)
        if obj.get("version") != TOPIC_FORMAT_VERSION:
            raise ValueError(f"unsupported topic model format: {obj.get('version')!r}")
        return TopicModel(obj["K"], obj["vocabulary"], obj["phi"],
                          obj["alpha"], obj["beta"], obj["seed"])


def topic_words(doc: TokenizedText) -> list[str]:
    """Lowercased alphabetic tokens with bundled stopwords removed."""
    stops = stopwords()
    out = []
    for tok in doc.tokens:
        w = tok.lower
        if w not in stops and w.replace("'", "").replace("’", "").isalpha():
            out.append(w)
    return out


def _doc_key(words: list[int]) -> tuple:
    return (len(words), tuple(words))


def train_lda(docs: list[TokenizedText], K: int = 20, alpha: float | None = None,
              beta: float = 0.01, iterations: int = 500, seed: int = 0) -> TopicModel:
    if K < 2:
        raise ValueError("K must be at least 2")
    if not docs:
        raise ValueError("no documents")
    if alpha is None:
        alpha = 50.0 / K

    word_docs = [topic_words(d) for d in docs]
    vocab = sorted({w for ws in word_docs for w in ws})
    if not vocab:
        raise ValueError("empty vocabulary after stopword removal")
    index = {w: i for i, w in enumerate(vocab)}
    id_docs = [[index[w] for w in ws] for ws in word_docs]

    # canonical order plus a seeded shuffle keeps training order-independent
    id_docs.sort(key=_doc_key)
    rng = random.Random(seed)
    rng.shuffle(id_docs)

    V = len(vocab)
    v_beta = V * beta
    n_dk = [[0] * K for _ in id_docs]
    n_kw = [[0] * V for _ in range(K)]
    n_k = [0] * K
    assign = []
    for d, words in enumerate(id_docs):
        topics = []
        for w in words:
            k = rng.randrange(K)
            topics.append(k)
            n_dk[d][k] += 1
            n_kw[k][w] += 1
            n_k[k] += 1
        assign.append(topics)

    for _ in range(iterations):
        for d, words in enumerate(id_docs):
            dk = n_dk[d]
            topics = assign[d]
            for i, w in enumerate(words):
                k = topics[i]
                dk[k] -= 1
                n_kw[k][w] -= 1
                n_k[k] -= 1
                total = 0.0
                cum = []
                for k2 in range(K):
                    total += (dk[k2] + alpha) * (n_kw[k2][w] + beta) / (n_k[k2] + v_beta)
                    cum.append(total)
                r = rng.random() * total
                k = 0
                while k < K - 1 and cum[k] <= r:
                    k += 1
                topics[i] = k
                dk[k] += 1
                n_kw[k][w] += 1
                n_k[k] += 1

    phi = [[(n_kw[k][w] + beta) / (n_k[k] + v_beta) for w in range(V)]
           for k in range(K)]
    return TopicModel(K, vocab, phi, alpha, beta, seed)


def _stable_doc_hash(words: list[str]) -> int:
    digest = hashlib.sha256("\x00".join(words).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def infer_topics(model: TopicModel, doc: TokenizedText) -> list[float]:
    """Topic mixture for one document: fixed-sweep Gibbs against frozen
    topic-word probabilities. Empty or out-of-vocabulary docs get the
    uniform vector."""
    K = model.K
    words = topic_words(doc)
    index = {w: i for i, w in enumerate(model.vocabulary)}
    ids = [index[w] for w in words if w in index]
    if not ids:
        return [1.0 / K] * K

    rng = random.Random(_stable_doc_hash(words) ^ model.seed)
    counts = [0] * K
    topics = []
    for _ in ids:
        k = rng.randrange(K)
        topics.append(k)
        counts[k] += 1
    phi = model.phi
    alpha = model.alpha
    for _ in range(INFER_SWEEPS):
        for i, w in enumerate(ids):
            k = topics[i]
            counts[k] -= 1
            total = 0.0
            cum = []
            for k2 in range(K):
                total += (counts[k2] + alpha) * phi[k2][w]
                cum.append(total)
            r = rng.random() * total
            k = 0
            while k < K - 1 and cum[k] <= r:
                k += 1
            topics[i] = k
            counts[k] += 1
    denom = len(ids) + K * alpha
    return [(counts[k] + alpha) / denom for k in range(K)]


def hellinger_similarity(p, q) -> float:
    """1 minus the Hellinger distance between two distributions."""
    p = list(p)
    q = list(q)
    if len(p) != len(q):
        raise ValueError("length mismatch")
    if p == q:
        return 1.0
    s = sum(math.sqrt(a * b) for a, b in zip(p, q))
    inner = max(0.0, 1.0 - s)
    return min(1.0, max(0.0, 1.0 - math.sqrt(inner)))
