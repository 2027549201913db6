"""HTTP API for the assisted review experiment.

Serves articles with or without the seven-indicator panel, stores the
1..5 ratings append-only with an idempotency key per rater and article,
and reports crowd-vs-expert agreement. The built review UI is hosted
statically from the same process.
"""
from __future__ import annotations

import hashlib
import json
import random
import threading
import time
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import indicators, pipeline
from .corpus import ingest
from .indicators import CONDITION_WITH, CONDITION_WITHOUT, IndicatorVector

PANEL_LABELS = {
    "site_visitors": "Daily visitors to this outlet's website",
    "scientific_mentions": "Mentions of scientific sources in the article",
    "article_length": "Length of the article",
    "quote_count": "Quotes from people and institutions",
    "reply_count": "Replies to postings that shared this article",
    "has_byline": "Article names its author",
    "title_sentiment": "Emotional tone of the headline",
}


def sentiment_face(polarity: float) -> str:
    if polarity >= 0.5:
        return "++"
    if polarity >= 0.1:
        return "+"
    if polarity > -0.1:
        return "0"
    if polarity > -0.5:
        return "-"
    return "--"


def rater_condition(rater_id: str) -> str:
    digest = hashlib.sha256(rater_id.encode("utf-8")).hexdigest()
    return CONDITION_WITH if int(digest, 16) % 2 == 0 else CONDITION_WITHOUT


def _stars_row(name: str, value, reference: list[float]) -> dict:
    stars = (indicators.quintile_stars(value, reference)
             if value is not None and reference else None)
    return {"name": name, "label": PANEL_LABELS[name], "kind": "stars",
            "value": stars}


def indicator_panel(vec: IndicatorVector,
                    population: list[IndicatorVector]) -> list[dict]:
    """The seven rows shown to raters in the with-indicators condition."""
    visitors_ref = [-v.alexa_rank for v in population
                    if v.alexa_rank is not None]
    visitors = -vec.alexa_rank if vec.alexa_rank is not None else None
    return [
        _stars_row("site_visitors", visitors, visitors_ref),
        _stars_row("scientific_mentions", vec.n_scientific_mentions,
                   [v.n_scientific_mentions for v in population]),
        _stars_row("article_length", vec.word_count,
                   [v.word_count for v in population]),
        _stars_row("quote_count", vec.n_total_quotes,
                   [v.n_total_quotes for v in population]),
        _stars_row("reply_count", vec.reach.n_replies,
                   [v.reach.n_replies for v in population]),
        {"name": "has_byline", "label": PANEL_LABELS["has_byline"],
         "kind": "flag", "value": vec.bylined},
        {"name": "title_sentiment", "label": PANEL_LABELS["title_sentiment"],
         "kind": "face", "value": sentiment_face(vec.title_polarity)},
    ]


class RatingIn(BaseModel):
    article_id: str
    rater_id: str
    score: int
    condition: str | None = None
    timestamp: int | None = None


class RatingsStore:
    """Append-only JSONL keyed by (rater_id, article_id); duplicate
    submissions are acknowledged without a second write."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()
        self._seen: set[tuple[str, str]] = set()
        if path.exists():
            for record in pipeline.load_ratings(path):
                self._seen.add((record.rater_id, record.article_id))

    def append(self, record: indicators.RatingRecord) -> bool:
        key = (record.rater_id, record.article_id)
        with self._lock:
            if key in self._seen:
                return False
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(asdict(record), sort_keys=True) + "\n")
            self._seen.add(key)
            return True

    def load(self) -> list[indicators.RatingRecord]:
        with self._lock:
            if not self.path.exists():
                return []
            return pipeline.load_ratings(self.path)


def create_app(cfg: pipeline.PipelineConfig,
               static_dir: Path | None = None) -> FastAPI:
    for artifact in ("indicators.json", "articles.jsonl"):
        if not (cfg.output_dir / artifact).exists():
            raise pipeline.PipelineError(
                f"service requires missing artifact {artifact!r}; "
                f"run the pipeline first")
    vectors = pipeline.load_indicator_vectors(cfg)
    articles = {a.id: a for a in
                ingest(cfg.output_dir / "articles.jsonl", "article").records
                if a.id in vectors}
    population = [vectors[aid] for aid in sorted(vectors)]
    order = sorted(articles)
    random.Random(cfg.stage_seed("assignment")).shuffle(order)
    store = RatingsStore(pipeline.ratings_store_path(cfg))
    experts = (pipeline.load_expert_labels(cfg.expert_labels_path)
               if cfg.expert_labels_path is not None else None)

    app = FastAPI(title="scigauge review service")

    @app.get("/api/articles")
    def list_articles(rater_id: str | None = None):
        payload = {"article_ids": sorted(articles),
                   "assignment_order": list(order)}
        if rater_id:
            rated = {r.article_id for r in store.load()
                     if r.rater_id == rater_id}
            payload["condition"] = rater_condition(rater_id)
            payload["rated"] = sorted(rated)
        return payload

    @app.get("/api/articles/{article_id}")
    def get_article(article_id: str, condition: str = "without"):
        if condition not in ("with", "without"):
            raise HTTPException(422, "condition must be 'with' or 'without'")
        article = articles.get(article_id)
        if article is None:
            raise HTTPException(404, f"unknown article {article_id!r}")
        payload = {
            "id": article.id,
            "title": article.title,
            "paragraphs": article.paragraphs,
            "condition": (CONDITION_WITH if condition == "with"
                          else CONDITION_WITHOUT),
        }
        if condition == "with":
            payload["indicators"] = indicator_panel(vectors[article_id],
                                                    population)
        return payload

    @app.post("/api/ratings")
    def post_rating(rating: RatingIn):
        if rating.article_id not in articles:
            raise HTTPException(404,
                                f"unknown article {rating.article_id!r}")
        if not 1 <= rating.score <= 5:
            raise HTTPException(422, "score must be in 1..5")
        assigned = rater_condition(rating.rater_id)
        if rating.condition is not None and rating.condition != assigned:
            raise HTTPException(422,
                                f"rater {rating.rater_id!r} is assigned "
                                f"condition {assigned!r}")
        timestamp = (int(time.time()) if rating.timestamp is None
                     else rating.timestamp)
        record = indicators.RatingRecord(rating.article_id, rating.rater_id,
                                         assigned, rating.score, timestamp)
        stored = store.append(record)
        return {"stored": stored, "duplicate": not stored,
                "condition": assigned}

    @app.get("/api/report")
    def get_report():
        if experts is None:
            raise HTTPException(503, "report unavailable: expert labels "
                                     "not configured")
        # only expert-labeled articles enter the agreement report; other
        # rating tasks are legitimate but have nothing to compare against
        ratings = [r for r in store.load() if r.article_id in experts]
        automated = None
        if (cfg.output_dir / "scores.csv").exists():
            automated = pipeline.load_scores(cfg)
        try:
            buckets = indicators.rmse_report(ratings, experts, automated)
        except ValueError as exc:
            raise HTTPException(409, str(exc))
        return {"n_ratings": len(ratings),
                "buckets": [asdict(b) for b in buckets]}

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    return app
