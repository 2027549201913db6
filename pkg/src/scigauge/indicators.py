"""Per-article indicator assembly, weak supervision from outlet tiers,
feature discrimination, star rendering, and the evaluation report.

The indicator inventory is fixed; every field names the module that
produces it, and the numeric encoding used for learning mirrors that
inventory so models and reports stay aligned.
"""
from __future__ import annotations

import csv
import math
import statistics
from dataclasses import dataclass

from .corpus import Article, Posting, Reply
from .diffusion import CentralityScores, DiffusionGraph
from .learn import (
    Forest,
    MedianImputer,
    anova_f,
    predict_proba,
    rmse,
    significance_stars,
    train_forest,
)
from .quotes import QuoteStats
from .social import ReachIndicators, StanceModel, aggregate_stance
from .social import reach as engagement_reach
from .textkit import (
    HeadlineModel,
    TokenizedText,
    analyze,
    clickbait_score,
    flesch_reading_ease,
    sentiment,
)

CONDITION_WITH = "with_indicators"
CONDITION_WITHOUT = "without_indicators"

TIER_MIN, TIER_MAX = 1, 5


@dataclass
class IndicatorVector:
    title_clickbait: float
    title_subjectivity: float
    title_polarity: float
    readability: float
    word_count: int
    bylined: bool
    n_total_quotes: int
    n_person_quotes: int
    n_scientific_mentions: int
    n_weasel_quotes: int
    source_adherence: float | None
    pagerank: float
    betweenness: float
    in_degree: int
    out_degree: int
    alexa_rank: int | None
    reach: ReachIndicators
    tweet_stance: float
    reply_stance: float
    tweet_subjectivity: float
    tweet_polarity: float
    reply_subjectivity: float
    reply_polarity: float


NUMERIC_FIELDS = [
    "title_clickbait", "title_subjectivity", "title_polarity",
    "readability", "word_count", "bylined",
    "n_total_quotes", "n_person_quotes", "n_scientific_mentions",
    "n_weasel_quotes", "source_adherence",
    "pagerank", "betweenness", "in_degree", "out_degree", "alexa_rank",
    "n_postings", "n_likes", "n_retweets", "n_replies",
    "sum_followers", "sum_followees", "n_countries", "shelf_life_hours",
    "tweet_stance", "reply_stance",
    "tweet_subjectivity", "tweet_polarity",
    "reply_subjectivity", "reply_polarity",
]

_REACH_FIELDS = {
    "n_postings", "n_likes", "n_retweets", "n_replies",
    "sum_followers", "sum_followees", "n_countries", "shelf_life_hours",
}


def numeric_encoding(vector: IndicatorVector) -> list[float | None]:
    """Flat row in NUMERIC_FIELDS order; optional fields stay None so an
    imputer can flag them."""
    row: list[float | None] = []
    for name in NUMERIC_FIELDS:
        if name in _REACH_FIELDS:
            value = getattr(vector.reach, name)
        elif name == "bylined":
            value = 1.0 if vector.bylined else 0.0
        else:
            value = getattr(vector, name)
        row.append(None if value is None else float(value))
    return row


@dataclass
class OutletInfo:
    tier: int
    alexa_rank: int | None


def load_outlet_metadata(path) -> dict[str, OutletInfo]:
    """TSV of domain, tier 1..5, alexa rank (blank allowed)."""
    out: dict[str, OutletInfo] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.reader(fh, delimiter="\t"):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise ValueError(f"malformed outlet row: {row!r}")
            domain, tier_s, alexa_s = (c.strip() for c in row)
            tier = int(tier_s)
            if not TIER_MIN <= tier <= TIER_MAX:
                raise ValueError(f"tier out of range for {domain!r}")
            alexa = int(alexa_s) if alexa_s else None
            if alexa is not None and alexa <= 0:
                raise ValueError(f"alexa rank must be positive for {domain!r}")
            key = domain.lower()
            if key in out:
                raise ValueError(f"duplicate outlet {domain!r}")
            out[key] = OutletInfo(tier, alexa)
    return out


@dataclass
class ArticleContext:
    """Everything upstream modules already computed for one article."""
    article: Article
    body: TokenizedText
    graph: DiffusionGraph
    centrality: CentralityScores
    quote_stats: QuoteStats
    adherence_score: float | None
    postings: list[Posting]
    replies: list[tuple[Reply, str]]
    stance_model: StanceModel | None
    headline_model: HeadlineModel
    alexa_rank: int | None


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def compute_indicators(ctx: ArticleContext) -> IndicatorVector:
    article = ctx.article
    if article.id not in ctx.graph.nodes:
        raise ValueError(f"article {article.id!r} not in pruned graph")
    title_sent = sentiment(analyze(article.title))
    reach_ind = engagement_reach(ctx.postings, [r for r, _ in ctx.replies])
    if ctx.stance_model is not None and (ctx.postings or ctx.replies):
        tweet_stance, reply_stance = aggregate_stance(
            article.title, ctx.postings, ctx.replies, ctx.stance_model)
    else:
        tweet_stance, reply_stance = 0.0, 0.0
    post_sents = [sentiment(analyze(p.text)) for p in ctx.postings]
    reply_sents = [sentiment(analyze(r.text)) for r, _ in ctx.replies]
    return IndicatorVector(
        title_clickbait=clickbait_score(article.title, ctx.headline_model),
        title_subjectivity=title_sent.subjectivity,
        title_polarity=title_sent.polarity,
        readability=flesch_reading_ease(ctx.body),
        word_count=sum(1 for tok in ctx.body.tokens if tok.pos != "PUNCT"),
        bylined=article.byline is not None,
        n_total_quotes=ctx.quote_stats.total_quotes,
        n_person_quotes=ctx.quote_stats.person_quotes,
        n_scientific_mentions=ctx.quote_stats.scientific_mentions,
        n_weasel_quotes=ctx.quote_stats.weasel_quotes,
        source_adherence=ctx.adherence_score,
        pagerank=ctx.centrality.pagerank.get(article.id, 0.0),
        betweenness=ctx.centrality.betweenness.get(article.id, 0.0),
        in_degree=ctx.centrality.in_degree.get(article.id, 0),
        out_degree=ctx.centrality.out_degree.get(article.id, 0),
        alexa_rank=ctx.alexa_rank,
        reach=reach_ind,
        tweet_stance=tweet_stance,
        reply_stance=reply_stance,
        tweet_subjectivity=_mean([s.subjectivity for s in post_sents]),
        tweet_polarity=_mean([s.polarity for s in post_sents]),
        reply_subjectivity=_mean([s.subjectivity for s in reply_sents]),
        reply_polarity=_mean([s.polarity for s in reply_sents]),
    )


@dataclass
class WeakLabels:
    labels: dict[str, int]
    excluded: int


def weak_labels(articles: dict[str, Article],
                tiers: dict[str, int]) -> WeakLabels:
    """Every article inherits its outlet's reputability tier."""
    labels: dict[str, int] = {}
    excluded = 0
    for article_id in sorted(articles):
        tier = tiers.get(articles[article_id].outlet)
        if tier is None:
            excluded += 1
            continue
        labels[article_id] = tier
    if not labels:
        raise ValueError("no article outlet appears in the tier map")
    return WeakLabels(labels, excluded)


@dataclass
class QualityModel:
    forest: Forest
    imputer: MedianImputer


def train_quality(vectors: dict[str, IndicatorVector],
                  labels: dict[str, int], n_trees: int = 100,
                  seed: int = 0) -> QualityModel:
    ids = sorted(set(vectors) & set(labels))
    if not ids:
        raise ValueError("no labeled indicator vectors")
    y = [labels[i] for i in ids]
    if len(set(y)) < 2:
        raise ValueError("need at least 2 distinct tiers")
    imputer = MedianImputer()
    X = imputer.fit_transform([numeric_encoding(vectors[i]) for i in ids])
    forest = train_forest(X, y, n_trees=n_trees, seed=seed)
    return QualityModel(forest, imputer)


def quality_score(model: QualityModel, vector: IndicatorVector) -> float:
    """Probability-weighted mean tier, to one decimal."""
    row = model.imputer.transform(numeric_encoding(vector))
    probs = predict_proba(model.forest, row)
    expected = sum(int(tier) * p for tier, p in probs.items())
    return round(expected, 1)


def discriminate(vectors: list[IndicatorVector],
                 groups: list) -> list[tuple[str, float, float, str]]:
    """ANOVA per numeric indicator across the given group assignment,
    most discriminating first."""
    if len(vectors) != len(groups):
        raise ValueError("group assignment length mismatch")
    keys = sorted(set(groups))
    if len(keys) < 2:
        raise ValueError("need at least 2 groups")
    rows = [numeric_encoding(v) for v in vectors]
    results = []
    for j, name in enumerate(NUMERIC_FIELDS):
        samples = []
        for key in keys:
            samples.append([rows[i][j] for i in range(len(rows))
                            if groups[i] == key and rows[i][j] is not None])
        if any(len(s) < 2 for s in samples):
            results.append((name, 0.0, 1.0, ""))
            continue
        res = anova_f(samples)
        results.append((name, res.f_statistic, res.p_value,
                        significance_stars(res.p_value)))
    results.sort(key=lambda r: (r[2], -r[1], r[0]))
    return results


def quintile_stars(value: float, reference: list[float]) -> int:
    """Which empirical quintile of the reference the value falls in."""
    if not reference:
        raise ValueError("empty reference distribution")
    ordered = sorted(reference)
    n = len(ordered)
    stars = 1
    for pct in (20, 40, 60, 80):
        rank = max(1, math.ceil(pct / 100.0 * n))
        if value > ordered[rank - 1]:
            stars += 1
    return stars


@dataclass
class RatingRecord:
    article_id: str
    rater_id: str
    condition: str
    score: int
    timestamp: int

    def __post_init__(self):
        if self.condition not in (CONDITION_WITH, CONDITION_WITHOUT):
            raise ValueError(f"unknown condition {self.condition!r}")
        if not isinstance(self.score, int) or not 1 <= self.score <= 5:
            raise ValueError("score must be an integer in 1..5")


_BUCKETS = ("strong", "weak", "disagreement")


def _bucket_of(e1: int, e2: int) -> str:
    gap = abs(e1 - e2)
    if gap == 0:
        return "strong"
    if gap == 1:
        return "weak"
    return "disagreement"


@dataclass
class BucketReport:
    bucket: str
    n_articles: int
    rmse_with: float | None
    rmse_without: float | None
    rmse_automated: float | None


def _drop_outlier_raters(ratings: list[RatingRecord]) -> list[RatingRecord]:
    by_article: dict[str, list[int]] = {}
    for r in ratings:
        by_article.setdefault(r.article_id, []).append(r.score)
    crowd = {aid: _mean(scores) for aid, scores in by_article.items()}
    by_rater: dict[str, list[float]] = {}
    for r in ratings:
        by_rater.setdefault(r.rater_id, []).append(
            abs(r.score - crowd[r.article_id]))
    deviations = {rid: _mean(devs) for rid, devs in by_rater.items()}
    cutoff = 2.0 * statistics.median(sorted(deviations.values()))
    kept = {rid for rid, dev in deviations.items() if dev <= cutoff}
    return [r for r in ratings if r.rater_id in kept]


def rmse_report(ratings: list[RatingRecord],
                expert_labels: dict[str, tuple[int, int]],
                automated_scores: dict[str, float] | None = None
                ) -> list[BucketReport]:
    """Table of crowd-vs-expert agreement, bucketed by how far the two
    experts were apart, one RMSE column per condition plus the
    automated score."""
    for r in ratings:
        if r.article_id not in expert_labels:
            raise ValueError(f"no expert labels for {r.article_id!r}")
    kept = _drop_outlier_raters(ratings) if ratings else []
    expert_mean = {aid: (e1 + e2) / 2.0
                   for aid, (e1, e2) in expert_labels.items()}
    buckets = {b: sorted(aid for aid, (e1, e2) in expert_labels.items()
                         if _bucket_of(e1, e2) == b) for b in _BUCKETS}

    def crowd_means(condition: str) -> dict[str, float]:
        per: dict[str, list[int]] = {}
        for r in kept:
            if r.condition == condition:
                per.setdefault(r.article_id, []).append(r.score)
        return {aid: _mean(scores) for aid, scores in per.items()}

    with_means = crowd_means(CONDITION_WITH)
    without_means = crowd_means(CONDITION_WITHOUT)

    def bucket_rmse(article_ids, means) -> float | None:
        pairs = [(means[a], expert_mean[a]) for a in article_ids
                 if a in means]
        if not pairs:
            return None
        return rmse([p[0] for p in pairs], [p[1] for p in pairs])

    out = []
    for b in _BUCKETS:
        ids = buckets[b]
        auto = None
        if automated_scores is not None:
            auto = bucket_rmse(ids, {a: automated_scores[a] for a in ids
                                     if a in automated_scores})
        out.append(BucketReport(
            bucket=b,
            n_articles=len(ids),
            rmse_with=bucket_rmse(ids, with_means),
            rmse_without=bucket_rmse(ids, without_means),
            rmse_automated=auto,
        ))
    return out


def write_report_csv(path, report: list[BucketReport]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bucket", "n_articles", "rmse_with_indicators",
                         "rmse_without_indicators", "rmse_automated"])
        for row in report:
            writer.writerow([
                row.bucket, row.n_articles,
                "" if row.rmse_with is None else f"{row.rmse_with:.4f}",
                "" if row.rmse_without is None else f"{row.rmse_without:.4f}",
                "" if row.rmse_automated is None else f"{row.rmse_automated:.4f}",
            ])
