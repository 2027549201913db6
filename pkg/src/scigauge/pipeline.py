"""Stage-by-stage pipeline driver: ingest, graph, indicators, train,
score, report.

Every stage reads its inputs from disk, writes its artifacts into the
configured output directory, and records input/output hashes plus the
seeds it used in a manifest. Reruns over unchanged inputs reproduce
every artifact byte for byte.
"""
from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - 3.10 fallback
    import tomli as tomllib

from . import adherence, corpus, diffusion, indicators, quotes, social, topics
from .indicators import ArticleContext, IndicatorVector, NUMERIC_FIELDS
from .learn import Forest, MedianImputer
from .social import ReachIndicators
from .textkit import TokenizedText, analyze, load_embeddings, train_headline_model

STAGES = ("ingest", "graph", "indicators", "train", "score", "report")

# fixed per-consumer offsets on the pipeline seed
_SEED_OFFSETS = {
    "topics": 1, "pairs": 2, "sts": 3, "stance": 4,
    "quality": 5, "headline": 6, "assignment": 7,
}


class PipelineError(Exception):
    pass


@dataclass
class PipelineConfig:
    postings_path: Path
    replies_path: Path
    articles_path: Path
    papers_path: Path
    science_domains_path: Path
    keywords_path: Path
    embeddings_path: Path
    outlet_metadata_path: Path
    stance_labels_path: Path
    expert_labels_path: Path | None
    output_dir: Path
    static_dir: Path | None = None
    seed: int = 0
    topics_k: int = 20
    topics_iterations: int = 500
    merge_threshold: float = 0.9
    damping: float = 0.85
    lexicon_k: int = 20
    forest_trees: int = 100

    def stage_seed(self, consumer: str) -> int:
        return self.seed + _SEED_OFFSETS[consumer]


def load_config(path, seed_override: int | None = None) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise PipelineError(f"no such config file: {path}")
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    base = path.parent

    def resolve(section: str, key: str, required: bool = True) -> Path | None:
        value = raw.get(section, {}).get(key)
        if value is None:
            if required:
                raise PipelineError(f"config missing [{section}] {key}")
            return None
        p = base / value
        if not p.exists():
            raise PipelineError(f"config [{section}] {key}: no such file {p}")
        return p

    params = raw.get("params", {})
    seeds = raw.get("seeds", {})
    seed = seeds.get("pipeline", 0) if seed_override is None else seed_override
    out_dir = raw.get("output", {}).get("dir")
    if out_dir is None:
        raise PipelineError("config missing [output] dir")
    static = raw.get("service", {}).get("static_dir")
    cfg = PipelineConfig(
        postings_path=resolve("corpus", "postings"),
        replies_path=resolve("corpus", "replies"),
        articles_path=resolve("corpus", "articles"),
        papers_path=resolve("corpus", "papers"),
        science_domains_path=resolve("allowlist", "science_domains"),
        keywords_path=resolve("allowlist", "keywords"),
        embeddings_path=resolve("resources", "embeddings"),
        outlet_metadata_path=resolve("resources", "outlet_metadata"),
        stance_labels_path=resolve("resources", "stance_labels"),
        expert_labels_path=resolve("resources", "expert_labels", required=False),
        output_dir=base / out_dir,
        static_dir=None if static is None else base / static,
        seed=int(seed),
        topics_k=int(params.get("topics_k", 20)),
        topics_iterations=int(params.get("topics_iterations", 500)),
        merge_threshold=float(params.get("merge_threshold", 0.9)),
        damping=float(params.get("damping", 0.85)),
        lexicon_k=int(params.get("lexicon_k", 20)),
        forest_trees=int(params.get("forest_trees", 100)),
    )
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _artifact(cfg: PipelineConfig, name: str) -> Path:
    return cfg.output_dir / name


def _require(cfg: PipelineConfig, stage: str, *names: str) -> None:
    for name in names:
        if not _artifact(cfg, name).exists():
            raise PipelineError(
                f"stage {stage!r} requires missing artifact {name!r}; "
                f"run the producing stage first")


def _manifest_path(cfg: PipelineConfig) -> Path:
    return _artifact(cfg, "manifest.json")


def _record_stage(cfg: PipelineConfig, stage: str, inputs: list[Path],
                  outputs: list[Path], seeds: dict, notes: dict | None = None):
    path = _manifest_path(cfg)
    manifest = {}
    if path.exists():
        manifest = json.loads(path.read_text("utf-8"))
    manifest[stage] = {
        "inputs": {p.name: _sha256(p) for p in sorted(inputs)},
        "outputs": {p.name: _sha256(p) for p in sorted(outputs)},
        "seeds": seeds,
        "notes": notes or {},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    "utf-8")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", "utf-8")


# ---------------------------------------------------------------- stages

def stage_ingest(cfg: PipelineConfig) -> None:
    allowlist = corpus.load_allowlist(cfg.science_domains_path,
                                      cfg.keywords_path)
    results = {kind: corpus.ingest(path, kind) for kind, path in (
        ("posting", cfg.postings_path), ("reply", cfg.replies_path),
        ("article", cfg.articles_path), ("paper", cfg.papers_path))}
    postings = corpus.filter_postings(results["posting"].records, allowlist)
    replies, orphaned = corpus.drop_orphan_replies(results["reply"].records,
                                                   postings)
    outputs = {
        "postings.jsonl": postings,
        "replies.jsonl": replies,
        "articles.jsonl": results["article"].records,
        "papers.jsonl": results["paper"].records,
    }
    for name, records in outputs.items():
        corpus.serialize(records, _artifact(cfg, name))
    counts = {kind: {"kept": len(r.records), "skipped": r.skipped}
              for kind, r in results.items()}
    counts["posting"]["kept"] = len(postings)
    counts["posting"]["off_topic"] = (len(results["posting"].records)
                                      - len(postings))
    counts["reply"]["kept"] = len(replies)
    counts["reply"]["orphaned"] = orphaned
    _write_json(_artifact(cfg, "ingest_counts.json"), counts)
    _record_stage(
        cfg, "ingest",
        [cfg.postings_path, cfg.replies_path, cfg.articles_path,
         cfg.papers_path, cfg.science_domains_path, cfg.keywords_path],
        [_artifact(cfg, n) for n in list(outputs) + ["ingest_counts.json"]],
        seeds={})


def _read_records(cfg: PipelineConfig):
    postings = corpus.ingest(_artifact(cfg, "postings.jsonl"), "posting").records
    replies = corpus.ingest(_artifact(cfg, "replies.jsonl"), "reply").records
    articles = corpus.ingest(_artifact(cfg, "articles.jsonl"), "article").records
    papers = corpus.ingest(_artifact(cfg, "papers.jsonl"), "paper").records
    return postings, replies, articles, papers


def stage_graph(cfg: PipelineConfig) -> None:
    _require(cfg, "graph", "postings.jsonl", "replies.jsonl",
             "articles.jsonl", "papers.jsonl")
    postings, _, articles, papers = _read_records(cfg)
    allowlist = corpus.load_allowlist(cfg.science_domains_path,
                                      cfg.keywords_path)
    links = corpus.resolve_links(postings, articles, papers, allowlist)
    g = diffusion.build(links, postings, articles, papers)
    g = diffusion.prune(g)
    g, merge_map = diffusion.merge_duplicates(g, articles,
                                              cfg.merge_threshold)
    cent = diffusion.centralities(g, damping=cfg.damping)
    edges_path = _artifact(cfg, "graph_edges.tsv")
    nodes_path = _artifact(cfg, "graph_nodes.jsonl")
    diffusion.export_graph(g, edges_path, nodes_path)
    _write_json(_artifact(cfg, "merge_map.json"), merge_map)
    _write_json(_artifact(cfg, "centrality.json"), {
        "pagerank": cent.pagerank, "betweenness": cent.betweenness,
        "in_degree": cent.in_degree, "out_degree": cent.out_degree,
    })
    _record_stage(
        cfg, "graph",
        [_artifact(cfg, n) for n in ("postings.jsonl", "replies.jsonl",
                                     "articles.jsonl", "papers.jsonl")],
        [edges_path, nodes_path, _artifact(cfg, "merge_map.json"),
         _artifact(cfg, "centrality.json")],
        seeds={})


def _load_graph(cfg: PipelineConfig) -> diffusion.DiffusionGraph:
    return diffusion.import_graph(_artifact(cfg, "graph_edges.tsv"),
                                  _artifact(cfg, "graph_nodes.jsonl"))


def _vector_to_obj(vec: IndicatorVector) -> dict:
    return asdict(vec)


def _vector_from_obj(obj: dict) -> IndicatorVector:
    data = dict(obj)
    data["reach"] = ReachIndicators(**data["reach"])
    return IndicatorVector(**data)


def indicators_csv_rows(vectors: dict[str, IndicatorVector]) -> list[list]:
    rows = [["article_id"] + NUMERIC_FIELDS]
    for aid in sorted(vectors):
        encoded = indicators.numeric_encoding(vectors[aid])
        rows.append([aid] + ["" if v is None else f"{v:.6g}"
                             for v in encoded])
    return rows


def stage_indicators(cfg: PipelineConfig) -> None:
    _require(cfg, "indicators", "graph_edges.tsv", "graph_nodes.jsonl",
             "centrality.json", "postings.jsonl", "replies.jsonl",
             "articles.jsonl", "papers.jsonl")
    postings, replies, articles, papers = _read_records(cfg)
    allowlist = corpus.load_allowlist(cfg.science_domains_path,
                                      cfg.keywords_path)
    graph = _load_graph(cfg)
    cent_obj = json.loads(_artifact(cfg, "centrality.json").read_text("utf-8"))
    cent = diffusion.CentralityScores(
        cent_obj["pagerank"], cent_obj["betweenness"],
        cent_obj["in_degree"], cent_obj["out_degree"])

    surviving = sorted(a.id for a in articles if a.id in graph.nodes
                       and graph.nodes[a.id] == diffusion.ARTICLE)
    article_by_id = {a.id: a for a in articles}
    article_text = {aid: analyze(article_by_id[aid].body_text())
                    for aid in surviving}
    paper_text = {p.id: analyze(p.body) for p in papers
                  if p.id in graph.nodes}

    lda_docs = ([article_text[a] for a in surviving]
                + [paper_text[p] for p in sorted(paper_text)])
    topic_model = topics.train_lda(
        lda_docs, K=cfg.topics_k, iterations=cfg.topics_iterations,
        seed=cfg.stage_seed("topics"))
    _artifact(cfg, "topic_model.json").write_text(topic_model.to_json() + "\n",
                                                  "utf-8")

    table = load_embeddings(cfg.embeddings_path)
    lexicon = quotes.WordClassLexicon.expanded(table, k=cfg.lexicon_k)
    name_index = quotes.NameIndex.build(
        [(aid, article_text[aid]) for aid in surviving])
    stats = {aid: quotes.quote_stats(article_text[aid], aid, name_index,
                                     allowlist, lexicon)
             for aid in surviving}

    notes = {}
    out_adj = graph.out_adjacency()
    try:
        pairs = adherence.build_pairs(graph, article_text, paper_text,
                                      topic_model, table,
                                      seed=cfg.stage_seed("pairs"))
        sts_model = adherence.train_sts(pairs, topic_model, table,
                                        n_trees=cfg.forest_trees,
                                        seed=cfg.stage_seed("sts"))
        adherence.export_pairs_csv(_artifact(cfg, "sts_pairs.csv"), pairs)
    except ValueError as exc:
        sts_model = None
        notes["sts"] = f"skipped: {exc}"
    profiles: dict = {}
    adherence_by_id: dict[str, float | None] = {}
    for aid in surviving:
        cited = [paper_text[d] for d in out_adj.get(aid, [])
                 if graph.nodes.get(d) == diffusion.PAPER]
        if sts_model is None or not cited:
            adherence_by_id[aid] = None
        else:
            adherence_by_id[aid] = adherence.source_adherence(
                article_text[aid], cited, sts_model, profiles)

    posting_by_id = {p.id: p for p in postings}
    postings_of: dict[str, list] = {aid: [] for aid in surviving}
    for src, dst in sorted(graph.edges):
        if graph.nodes.get(src) == diffusion.POSTING and dst in postings_of:
            postings_of[dst].append(posting_by_id[src])
    replies_of: dict[str, list] = {p.id: [] for p in postings}
    for r in replies:
        if r.parent_id in replies_of:
            replies_of[r.parent_id].append(r)

    labels = social.load_stance_labels(cfg.stance_labels_path)
    examples = []
    reply_by_id = {r.id: r for r in replies}
    unmatched = 0
    for reply_id in sorted(labels):
        reply = reply_by_id.get(reply_id)
        if reply is None or reply.parent_id not in posting_by_id:
            unmatched += 1
            continue
        examples.append((reply.text, posting_by_id[reply.parent_id].text,
                         labels[reply_id]))
    try:
        stance_model = social.train_stance(examples, table,
                                           n_trees=cfg.forest_trees,
                                           seed=cfg.stage_seed("stance"))
    except ValueError as exc:
        stance_model = None
        notes["stance"] = f"skipped: {exc}"
    if unmatched:
        notes["stance_labels_unmatched"] = unmatched

    headline_model = train_headline_model(n_trees=cfg.forest_trees,
                                          seed=cfg.stage_seed("headline"))
    outlets = indicators.load_outlet_metadata(cfg.outlet_metadata_path)

    vectors: dict[str, IndicatorVector] = {}
    for aid in surviving:
        article = article_by_id[aid]
        my_postings = postings_of[aid]
        my_replies = [(r, posting_by_id[r.parent_id].text)
                      for p in my_postings for r in replies_of[p.id]]
        info = outlets.get(article.outlet)
        ctx = ArticleContext(
            article=article,
            body=article_text[aid],
            graph=graph,
            centrality=cent,
            quote_stats=stats[aid],
            adherence_score=adherence_by_id[aid],
            postings=my_postings,
            replies=my_replies,
            stance_model=stance_model,
            headline_model=headline_model,
            alexa_rank=info.alexa_rank if info else None,
        )
        vectors[aid] = indicators.compute_indicators(ctx)

    _write_json(_artifact(cfg, "indicators.json"),
                {aid: _vector_to_obj(v) for aid, v in vectors.items()})
    with open(_artifact(cfg, "indicators.csv"), "w", encoding="utf-8",
              newline="") as fh:
        csv.writer(fh).writerows(indicators_csv_rows(vectors))
    outputs = [_artifact(cfg, n) for n in
               ("topic_model.json", "indicators.json", "indicators.csv")]
    if sts_model is not None:
        outputs.append(_artifact(cfg, "sts_pairs.csv"))
    _record_stage(
        cfg, "indicators",
        [_artifact(cfg, n) for n in ("graph_edges.tsv", "graph_nodes.jsonl",
                                     "centrality.json", "postings.jsonl",
                                     "replies.jsonl", "articles.jsonl",
                                     "papers.jsonl")]
        + [cfg.embeddings_path, cfg.stance_labels_path,
           cfg.outlet_metadata_path],
        outputs,
        seeds={name: cfg.stage_seed(name)
               for name in ("topics", "pairs", "sts", "stance", "headline")},
        notes=notes)


def load_indicator_vectors(cfg: PipelineConfig) -> dict[str, IndicatorVector]:
    obj = json.loads(_artifact(cfg, "indicators.json").read_text("utf-8"))
    return {aid: _vector_from_obj(v) for aid, v in obj.items()}


def stage_train(cfg: PipelineConfig) -> None:
    _require(cfg, "train", "indicators.json", "articles.jsonl")
    vectors = load_indicator_vectors(cfg)
    articles = corpus.ingest(_artifact(cfg, "articles.jsonl"),
                             "article").records
    outlets = indicators.load_outlet_metadata(cfg.outlet_metadata_path)
    tiers = {domain: info.tier for domain, info in outlets.items()}
    weak = indicators.weak_labels(
        {aid: a for aid, a in ((a.id, a) for a in articles)
         if aid in vectors}, tiers)
    model = indicators.train_quality(vectors, weak.labels,
                                     n_trees=cfg.forest_trees,
                                     seed=cfg.stage_seed("quality"))
    _write_json(_artifact(cfg, "quality_model.json"), {
        "forest": json.loads(model.forest.to_json()),
        "imputer": {"medians": model.imputer.medians,
                    "flagged": model.imputer.flagged},
    })
    labeled = sorted(weak.labels)
    ranking = indicators.discriminate([vectors[a] for a in labeled],
                                      [weak.labels[a] for a in labeled])
    with open(_artifact(cfg, "discrimination.csv"), "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["indicator", "f_statistic", "p_value", "stars"])
        for name, f, p, stars in ranking:
            writer.writerow([name, f"{f:.6g}", f"{p:.6g}", stars])
    _record_stage(
        cfg, "train",
        [_artifact(cfg, "indicators.json"), _artifact(cfg, "articles.jsonl"),
         cfg.outlet_metadata_path],
        [_artifact(cfg, "quality_model.json"),
         _artifact(cfg, "discrimination.csv")],
        seeds={"quality": cfg.stage_seed("quality")},
        notes={"excluded_articles": weak.excluded})


def load_quality_model(cfg: PipelineConfig) -> indicators.QualityModel:
    obj = json.loads(_artifact(cfg, "quality_model.json").read_text("utf-8"))
    imputer = MedianImputer(medians=obj["imputer"]["medians"],
                            flagged=obj["imputer"]["flagged"])
    return indicators.QualityModel(Forest.from_json(json.dumps(obj["forest"])),
                                   imputer)


def stage_score(cfg: PipelineConfig) -> None:
    _require(cfg, "score", "indicators.json", "quality_model.json")
    vectors = load_indicator_vectors(cfg)
    model = load_quality_model(cfg)
    with open(_artifact(cfg, "scores.csv"), "w", encoding="utf-8",
              newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["article_id", "score"])
        for aid in sorted(vectors):
            writer.writerow([aid, f"{indicators.quality_score(model, vectors[aid]):.1f}"])
    _record_stage(
        cfg, "score",
        [_artifact(cfg, "indicators.json"),
         _artifact(cfg, "quality_model.json")],
        [_artifact(cfg, "scores.csv")],
        seeds={})


def load_scores(cfg: PipelineConfig) -> dict[str, float]:
    scores = {}
    with open(_artifact(cfg, "scores.csv"), encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for aid, score in reader:
            scores[aid] = float(score)
    return scores


def load_expert_labels(path) -> dict[str, tuple[int, int]]:
    obj = json.loads(Path(path).read_text("utf-8"))
    out = {}
    for aid, pair in obj.items():
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ValueError(f"expert labels for {aid!r} must be a pair")
        e1, e2 = int(pair[0]), int(pair[1])
        if not (1 <= e1 <= 5 and 1 <= e2 <= 5):
            raise ValueError(f"expert labels for {aid!r} out of 1..5")
        out[aid] = (e1, e2)
    return out


def ratings_store_path(cfg: PipelineConfig) -> Path:
    return _artifact(cfg, "ratings.jsonl")


def load_ratings(path) -> list[indicators.RatingRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                obj = json.loads(line)
                records.append(indicators.RatingRecord(
                    obj["article_id"], obj["rater_id"], obj["condition"],
                    int(obj["score"]), int(obj["timestamp"])))
    return records


def stage_report(cfg: PipelineConfig) -> None:
    _require(cfg, "report", "scores.csv", "ratings.jsonl")
    if cfg.expert_labels_path is None:
        raise PipelineError("stage 'report' requires [resources] "
                            "expert_labels in the config")
    ratings = load_ratings(ratings_store_path(cfg))
    experts = load_expert_labels(cfg.expert_labels_path)
    automated = load_scores(cfg)
    report = indicators.rmse_report(ratings, experts, automated)
    indicators.write_report_csv(_artifact(cfg, "report.csv"), report)
    _record_stage(
        cfg, "report",
        [_artifact(cfg, "scores.csv"), ratings_store_path(cfg),
         cfg.expert_labels_path],
        [_artifact(cfg, "report.csv")],
        seeds={})


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "graph": stage_graph,
    "indicators": stage_indicators,
    "train": stage_train,
    "score": stage_score,
    "report": stage_report,
}


def run(stage: str, cfg: PipelineConfig) -> None:
    if stage == "all":
        for name in ("ingest", "graph", "indicators", "train", "score"):
            _STAGE_FUNCS[name](cfg)
        if ratings_store_path(cfg).exists():
            stage_report(cfg)
        return
    func = _STAGE_FUNCS.get(stage)
    if func is None:
        raise PipelineError(f"unknown stage {stage!r}; expected one of "
                            f"{', '.join(STAGES)} or 'all'")
    func(cfg)
