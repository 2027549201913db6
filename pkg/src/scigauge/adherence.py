"""Similarity between a news article and the papers it cites.

Twenty-one features: seven metrics (entity Jaccards, embedding cosine,
topic-distribution similarity, relative length difference) computed at
document, paragraph, and sentence granularity.  Pair labels for training
come straight from the diffusion graph, so no manual annotation is
needed.
"""
from __future__ import annotations

import csv
import random
from dataclasses import dataclass

from .diffusion import ARTICLE, PAPER, DiffusionGraph
from .learn import Forest, predict_proba, train_forest
from .textkit import (
    EmbeddingTable,
    TokenizedText,
    cosine,
    doc_vector,
    extract_entities,
    paragraph_view,
    sentence_view,
)
from .topics import TopicModel, hellinger_similarity, infer_topics

_METRIC_NAMES = [
    "jaccard_persons_orgs",
    "jaccard_dates",
    "jaccard_numbers",
    "jaccard_percentages",
    "embedding_cosine",
    "hellinger_topic",
    "relative_length_difference",
]
_LEVELS = ["document", "paragraph", "sentence"]

# cross-document passage pairs are capped to bound cost on long inputs
_MAX_PASSAGES_PER_SIDE = 200
_SUBSAMPLE_SEED = 0

POSITIVE = "positive"
NEGATIVE = "negative"


def feature_names() -> list[str]:
    return [f"{level}_{metric}" for level in _LEVELS
            for metric in _METRIC_NAMES]


@dataclass
class STSFeatures:
    values: list[float]

    def __post_init__(self):
        if len(self.values) != 21:
            raise ValueError("expected 21 feature values")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(feature_names(), self.values))


@dataclass
class _Passage:
    words: int
    persons_orgs: frozenset
    dates: frozenset
    numbers: frozenset
    percentages: frozenset
    vector: object
    topics: list[float]


def _passage_profile(view: TokenizedText, model: TopicModel,
                     table: EmbeddingTable) -> _Passage:
    ents = extract_entities(view)
    words = sum(1 for tok in view.tokens if tok.pos != "PUNCT")
    return _Passage(
        words=words,
        persons_orgs=frozenset(ents.persons | ents.organizations),
        dates=frozenset(ents.dates),
        numbers=frozenset(ents.numbers),
        percentages=frozenset(ents.percentages),
        vector=doc_vector(view, table),
        topics=infer_topics(model, view),
    )


@dataclass
class DocumentProfile:
    """Per-granularity passage summaries, computed once per document."""
    levels: dict

    @classmethod
    def build(cls, t: TokenizedText, model: TopicModel,
              table: EmbeddingTable) -> "DocumentProfile":
        if not t.tokens:
            raise ValueError("empty document")
        doc = [_passage_profile(t, model, table)]
        paras = [_passage_profile(paragraph_view(t, p), model, table)
                 for p in range(len(t.paragraphs))]
        sents = [_passage_profile(sentence_view(t, s), model, table)
                 for s in range(len(t.sentences))]
        return cls({"document": doc, "paragraph": paras, "sentence": sents})


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    union = a | b
    return len(a & b) / len(union)


def _pair_metrics(a: _Passage, b: _Passage) -> list[float]:
    if a.words == 0 and b.words == 0:
        rld = 0.0
    else:
        rld = abs(a.words - b.words) / max(a.words, b.words)
    return [
        _jaccard(a.persons_orgs, b.persons_orgs),
        _jaccard(a.dates, b.dates),
        _jaccard(a.numbers, b.numbers),
        _jaccard(a.percentages, b.percentages),
        cosine(a.vector, b.vector),
        hellinger_similarity(a.topics, b.topics),
        rld,
    ]


def _level_means(side_a: list[_Passage], side_b: list[_Passage]) -> list[float]:
    if not side_a or not side_b:
        return [0.0] * 6 + [1.0]
    if len(side_a) > _MAX_PASSAGES_PER_SIDE or len(side_b) > _MAX_PASSAGES_PER_SIDE:
        rng = random.Random(_SUBSAMPLE_SEED)
        if len(side_a) > _MAX_PASSAGES_PER_SIDE:
            side_a = [side_a[i] for i in sorted(
                rng.sample(range(len(side_a)), _MAX_PASSAGES_PER_SIDE))]
        if len(side_b) > _MAX_PASSAGES_PER_SIDE:
            side_b = [side_b[i] for i in sorted(
                rng.sample(range(len(side_b)), _MAX_PASSAGES_PER_SIDE))]
    totals = [0.0] * 7
    count = 0
    for pa in side_a:
        for pb in side_b:
            for k, v in enumerate(_pair_metrics(pa, pb)):
                totals[k] += v
            count += 1
    return [v / count for v in totals]


def sts_features(article: TokenizedText, paper: TokenizedText,
                 model: TopicModel, table: EmbeddingTable,
                 profiles: dict | None = None) -> STSFeatures:
    """The 21-value similarity profile of an (article, paper) pair.

    ``profiles`` is an optional cache keyed by id(document); callers
    scoring many pairs reuse per-document passage work through it.
    """
    values = []
    for doc in (article, paper):
        if profiles is not None and id(doc) in profiles:
            continue
        profile = DocumentProfile.build(doc, model, table)
        if profiles is not None:
            profiles[id(doc)] = profile
    pa = profiles[id(article)] if profiles is not None \
        else DocumentProfile.build(article, model, table)
    pb = profiles[id(paper)] if profiles is not None \
        else DocumentProfile.build(paper, model, table)
    for level in _LEVELS:
        values.extend(_level_means(pa.levels[level], pb.levels[level]))
    return STSFeatures(values)


@dataclass
class TrainingPair:
    article_id: str
    paper_id: str
    label: str
    features: STSFeatures


def single_link_articles(graph: DiffusionGraph) -> list[tuple[str, str]]:
    out = graph.out_adjacency()
    pairs = []
    for node_id in sorted(graph.nodes):
        if graph.nodes[node_id] != ARTICLE:
            continue
        papers = [d for d in out.get(node_id, [])
                  if graph.nodes.get(d) == PAPER]
        if len(papers) == 1:
            pairs.append((node_id, papers[0]))
    return pairs


def build_pairs(graph: DiffusionGraph, articles: dict, papers: dict,
                model: TopicModel, table: EmbeddingTable,
                seed: int = 0) -> list[TrainingPair]:
    """Positives from single-citation articles; equally many seeded
    random non-linked (article, paper) pairs as negatives."""
    positives = single_link_articles(graph)
    if not positives:
        raise ValueError("no articles with exactly one paper link")
    linked = {(src, dst) for src, dst in graph.edges
              if graph.nodes.get(dst) == PAPER}
    article_ids = sorted(a for a in articles if a in graph.nodes)
    paper_ids = sorted(p for p in papers if p in graph.nodes)
    candidates = [(a, p) for a in article_ids for p in paper_ids
                  if (a, p) not in linked]
    if len(candidates) < len(positives):
        raise ValueError("not enough unlinked pairs for negatives")
    rng = random.Random(seed)
    negatives = sorted(rng.sample(candidates, len(positives)))

    profiles: dict = {}
    out = []
    for label, pair_list in ((POSITIVE, positives), (NEGATIVE, negatives)):
        for article_id, paper_id in pair_list:
            feats = sts_features(articles[article_id], papers[paper_id],
                                 model, table, profiles)
            out.append(TrainingPair(article_id, paper_id, label, feats))
    return out


@dataclass
class STSModel:
    forest: Forest
    topic_model: TopicModel
    table: EmbeddingTable


def train_sts(pairs: list[TrainingPair], model: TopicModel,
              table: EmbeddingTable, n_trees: int = 100,
              seed: int = 0) -> STSModel:
    labels = [p.label for p in pairs]
    for cls in (POSITIVE, NEGATIVE):
        if labels.count(cls) < 2:
            raise ValueError(f"need at least 2 {cls} pairs")
    X = [p.features.values for p in pairs]
    forest = train_forest(X, labels, n_trees=n_trees, seed=seed)
    return STSModel(forest, model, table)


def sts_score(model: STSModel, article: TokenizedText,
              paper: TokenizedText, profiles: dict | None = None) -> float:
    feats = sts_features(article, paper, model.topic_model, model.table,
                         profiles)
    return predict_proba(model.forest, feats.values).get(POSITIVE, 0.0)


def source_adherence(article: TokenizedText, linked_papers: list[TokenizedText],
                     model: STSModel,
                     profiles: dict | None = None) -> float | None:
    """Best similarity against any cited paper; None when nothing is
    cited."""
    if not linked_papers:
        return None
    return max(sts_score(model, article, paper, profiles)
               for paper in linked_papers)


def export_pairs_csv(path, pairs: list[TrainingPair]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["article_id", "paper_id", "label"] + feature_names())
        for p in pairs:
            writer.writerow([p.article_id, p.paper_id, p.label]
                            + [f"{v:.6f}" for v in p.features.values])
