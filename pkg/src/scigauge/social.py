"""Audience-side indicators: reach of an article's postings and the
stance of the crowd toward them.

Stance is a four-way forest classifier whose labels collapse to a
binary agree/disagree signal; article-level scores are engagement-
weighted means of that signal.
"""
from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass

from .corpus import Posting, Reply
from .learn import Forest, predict_proba, train_forest
from .textkit import (
    EmbeddingTable,
    analyze,
    cosine,
    doc_vector,
    negation_words,
    negative_words,
    positive_words,
    sentiment,
)

STANCE_CLASSES = ("commenting", "contradicting", "questioning", "supporting")
NOT_RELATED = "not-related"
_AGREEING = {"supporting", "commenting"}

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)


@dataclass
class ReachIndicators:
    n_postings: int
    n_likes: int
    n_retweets: int
    n_replies: int
    sum_followers: int
    sum_followees: int
    n_countries: int
    shelf_life_hours: float


def _nearest_rank(sorted_values, pct: float):
    # 1-based nearest-rank percentile on presorted data
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100.0 * n))
    return sorted_values[rank - 1]


def reach(postings: list[Posting], replies: list[Reply]) -> ReachIndicators:
    """Engagement sums over the postings linked to one article."""
    countries = {p.country for p in postings if p.country}
    shelf = 0.0
    if len(postings) >= 2:
        stamps = sorted(p.timestamp for p in postings)
        lo = _nearest_rank(stamps, 5.0)
        hi = _nearest_rank(stamps, 95.0)
        shelf = max(0.0, (hi - lo) / 3600.0)
    return ReachIndicators(
        n_postings=len(postings),
        n_likes=sum(p.likes for p in postings),
        n_retweets=sum(p.retweets for p in postings),
        n_replies=len(replies),
        sum_followers=sum(p.followers for p in postings),
        sum_followees=sum(p.followees for p in postings),
        n_countries=len(countries),
        shelf_life_hours=shelf,
    )


@dataclass
class StanceFeatures:
    n_words: int
    n_positive: int
    n_negative: int
    n_negations: int
    n_urls: int
    n_question_marks: int
    n_exclamation_marks: int
    sim_to_parent: float
    reply_polarity: float
    parent_polarity: float

    def values(self) -> list[float]:
        return [
            float(self.n_words), float(self.n_positive),
            float(self.n_negative), float(self.n_negations),
            float(self.n_urls), float(self.n_question_marks),
            float(self.n_exclamation_marks), self.sim_to_parent,
            self.reply_polarity, self.parent_polarity,
        ]


def stance_features(reply_text: str, parent_text: str,
                    table: EmbeddingTable) -> StanceFeatures:
    rt = analyze(reply_text)
    pt = analyze(parent_text)
    pos_set = positive_words()
    neg_set = negative_words()
    negations = negation_words()
    n_pos = sum(1 for tok in rt.tokens if tok.lower in pos_set)
    n_neg = sum(1 for tok in rt.tokens if tok.lower in neg_set)
    n_not = sum(1 for tok in rt.tokens
                if tok.lower in negations or tok.lower.endswith("n't"))
    return StanceFeatures(
        n_words=sum(1 for tok in rt.tokens if tok.pos != "PUNCT"),
        n_positive=n_pos,
        n_negative=n_neg,
        n_negations=n_not,
        n_urls=len(_URL_RE.findall(reply_text)),
        n_question_marks=reply_text.count("?"),
        n_exclamation_marks=reply_text.count("!"),
        sim_to_parent=cosine(doc_vector(rt, table), doc_vector(pt, table)),
        reply_polarity=sentiment(rt).polarity,
        parent_polarity=sentiment(pt).polarity,
    )


@dataclass
class StanceLabel:
    four_class: str
    binary: int

    def __post_init__(self):
        if self.four_class not in STANCE_CLASSES:
            raise ValueError(f"unknown stance {self.four_class!r}")
        expected = 1 if self.four_class in _AGREEING else -1
        if self.binary != expected:
            raise ValueError("binary label inconsistent with four-class")


def binary_stance(four_class: str) -> int:
    return 1 if four_class in _AGREEING else -1


@dataclass
class StanceModel:
    forest: Forest
    table: EmbeddingTable


def train_stance(examples: list[tuple[str, str, str]], table: EmbeddingTable,
                 n_trees: int = 100, seed: int = 0) -> StanceModel:
    """Fit the four-class forest on (reply_text, parent_text, label)
    rows; not-related rows are dropped here."""
    kept = [(r, p, lab) for r, p, lab in examples if lab != NOT_RELATED]
    for cls in STANCE_CLASSES:
        if sum(1 for _, _, lab in kept if lab == cls) < 4:
            raise ValueError(f"need at least 4 examples of {cls!r}")
    X = [stance_features(r, p, table).values() for r, p, _ in kept]
    y = [lab for _, _, lab in kept]
    return StanceModel(train_forest(X, y, n_trees=n_trees, seed=seed), table)


def classify(model: StanceModel, reply_text: str,
             parent_text: str) -> StanceLabel:
    feats = stance_features(reply_text, parent_text, model.table)
    probs = predict_proba(model.forest, feats.values())
    best = max(sorted(probs), key=lambda c: probs[c])
    return StanceLabel(best, binary_stance(best))


def weighted_mean(values: list[float], weights: list[float]) -> float:
    total = sum(weights)
    if total <= 0:
        return 0.0
    return sum(v * w for v, w in zip(values, weights)) / total


def aggregate_stance(article_title: str, postings: list[Posting],
                     replies: list[tuple[Reply, str]],
                     model: StanceModel) -> tuple[float, float]:
    """(posting-level, reply-level) weighted mean binary stance.

    Postings are judged against the article title; each reply against
    its own parent text, supplied alongside it.  Weight is
    1 + likes + retweets so silent items still count.
    """
    post_vals = []
    post_weights = []
    for p in postings:
        label = classify(model, p.text, article_title)
        post_vals.append(float(label.binary))
        post_weights.append(1.0 + p.likes + p.retweets)
    reply_vals = []
    reply_weights = []
    for r, parent_text in replies:
        label = classify(model, r.text, parent_text)
        reply_vals.append(float(label.binary))
        reply_weights.append(1.0 + r.likes + r.retweets)
    return (weighted_mean(post_vals, post_weights),
            weighted_mean(reply_vals, reply_weights))


def load_stance_labels(path) -> dict[str, str]:
    """TSV of reply_id, label; not-related rows are kept for the caller
    to filter."""
    allowed = set(STANCE_CLASSES) | {NOT_RELATED}
    out: dict[str, str] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 2:
                raise ValueError(f"malformed stance row: {row!r}")
            reply_id, label = row[0].strip(), row[1].strip()
            if label not in allowed:
                raise ValueError(f"unknown stance label {label!r}")
            if reply_id in out:
                raise ValueError(f"duplicate reply id {reply_id!r}")
            out[reply_id] = label
    return out
