import csv
import math

import pytest
from hypothesis import given, strategies as st

from scigauge.corpus import Article, Posting, Reply
from scigauge.diffusion import ARTICLE, PAPER, POSTING, CentralityScores, DiffusionGraph
from scigauge.indicators import (
    CONDITION_WITH,
    CONDITION_WITHOUT,
    NUMERIC_FIELDS,
    ArticleContext,
    IndicatorVector,
    RatingRecord,
    compute_indicators,
    discriminate,
    load_outlet_metadata,
    numeric_encoding,
    quality_score,
    quintile_stars,
    rmse_report,
    train_quality,
    weak_labels,
    write_report_csv,
)
from scigauge.quotes import QuoteStats
from scigauge.social import ReachIndicators
from scigauge.textkit import analyze, train_headline_model


def _vector(**overrides) -> IndicatorVector:
    base = dict(
        title_clickbait=0.2, title_subjectivity=0.1, title_polarity=0.0,
        readability=60.0, word_count=300, bylined=True,
        n_total_quotes=2, n_person_quotes=1, n_scientific_mentions=3,
        n_weasel_quotes=0, source_adherence=0.7,
        pagerank=0.01, betweenness=0.0, in_degree=4, out_degree=2,
        alexa_rank=1500,
        reach=ReachIndicators(4, 10, 3, 2, 900, 400, 2, 12.0),
        tweet_stance=0.5, reply_stance=-0.5,
        tweet_subjectivity=0.1, tweet_polarity=0.3,
        reply_subjectivity=0.2, reply_polarity=-0.1,
    )
    base.update(overrides)
    return IndicatorVector(**base)


def test_numeric_encoding_order_and_width():
    row = numeric_encoding(_vector())
    assert len(row) == len(NUMERIC_FIELDS) == 30
    assert row[NUMERIC_FIELDS.index("bylined")] == 1.0
    assert row[NUMERIC_FIELDS.index("word_count")] == 300.0
    assert row[NUMERIC_FIELDS.index("n_countries")] == 2.0
    assert row[NUMERIC_FIELDS.index("shelf_life_hours")] == 12.0


def test_numeric_encoding_keeps_optional_gaps():
    row = numeric_encoding(_vector(source_adherence=None, alexa_rank=None))
    assert row[NUMERIC_FIELDS.index("source_adherence")] is None
    assert row[NUMERIC_FIELDS.index("alexa_rank")] is None
    assert all(v is not None for i, v in enumerate(row)
               if NUMERIC_FIELDS[i] not in ("source_adherence", "alexa_rank"))


def test_outlet_metadata_roundtrip(tmp_path):
    path = tmp_path / "outlets.tsv"
    path.write_text("# domain\ttier\talexa\n"
                    "good-science.example\t5\t1200\n"
                    "tabloid.example\t1\t\n")
    meta = load_outlet_metadata(path)
    assert meta["good-science.example"].tier == 5
    assert meta["good-science.example"].alexa_rank == 1200
    assert meta["tabloid.example"].tier == 1
    assert meta["tabloid.example"].alexa_rank is None


@pytest.mark.parametrize("row", [
    "site.example\t9\t10",
    "site.example\t3\t0",
    "site.example\t3",
])
def test_outlet_metadata_rejects_bad_rows(tmp_path, row):
    path = tmp_path / "outlets.tsv"
    path.write_text(row + "\n")
    with pytest.raises(ValueError):
        load_outlet_metadata(path)


def test_outlet_metadata_rejects_duplicates(tmp_path):
    path = tmp_path / "outlets.tsv"
    path.write_text("a.example\t2\t\na.example\t4\t\n")
    with pytest.raises(ValueError):
        load_outlet_metadata(path)


@pytest.fixture(scope="module")
def headline_model():
    return train_headline_model(n_trees=15, seed=3)


def _context(headline_model, postings=(), replies=(), byline="Ann Writer"):
    article = Article(
        id="a1", url="https://news.example/a1", outlet="news.example",
        title="Coffee lowers heart risk, huge new study finds",
        paragraphs=["Coffee drinkers saw lower heart risk in the trial.",
                    "Researchers followed ten thousand adults for a decade."],
        out_links=["https://journal.example/p1"], parse_ok=True,
        byline=byline,
    )
    graph = DiffusionGraph()
    graph.add_node("a1", ARTICLE)
    graph.add_node("p1", PAPER)
    graph.add_node("t1", POSTING)
    graph.add_edge("a1", "p1")
    graph.add_edge("t1", "a1")
    centrality = CentralityScores(
        pagerank={"a1": 0.25, "p1": 0.5, "t1": 0.25},
        betweenness={"a1": 1.0, "p1": 0.0, "t1": 0.0},
        in_degree={"a1": 1, "p1": 1, "t1": 0},
        out_degree={"a1": 1, "p1": 0, "t1": 1},
    )
    return ArticleContext(
        article=article,
        body=analyze(article.body_text()),
        graph=graph,
        centrality=centrality,
        quote_stats=QuoteStats(3, 2, 4, 1),
        adherence_score=0.8,
        postings=list(postings),
        replies=list(replies),
        stance_model=None,
        headline_model=headline_model,
        alexa_rank=1200,
    )


def test_compute_indicators_traces_upstream_values(headline_model):
    ctx = _context(headline_model)
    vec = compute_indicators(ctx)
    assert vec.bylined is True
    assert vec.n_total_quotes == 3
    assert vec.n_person_quotes == 2
    assert vec.n_scientific_mentions == 4
    assert vec.n_weasel_quotes == 1
    assert vec.source_adherence == 0.8
    assert vec.pagerank == 0.25
    assert vec.betweenness == 1.0
    assert vec.in_degree == 1 and vec.out_degree == 1
    assert vec.alexa_rank == 1200
    assert vec.word_count == 17
    assert 0.0 <= vec.title_clickbait <= 1.0


def test_compute_indicators_empty_social_side(headline_model):
    vec = compute_indicators(_context(headline_model))
    assert vec.reach == ReachIndicators(0, 0, 0, 0, 0, 0, 0, 0.0)
    assert vec.tweet_stance == 0.0 and vec.reply_stance == 0.0
    assert vec.tweet_polarity == 0.0 and vec.reply_polarity == 0.0
    assert vec.tweet_subjectivity == 0.0 and vec.reply_subjectivity == 0.0


def test_compute_indicators_social_means(headline_model):
    postings = [
        Posting(id="t1", author_id="u1", text="Great result, good news",
                urls=[], timestamp=1000, likes=2, followers=50),
        Posting(id="t2", author_id="u2", text="Terrible and misleading",
                urls=[], timestamp=8200, retweets=1, followers=10,
                country="de"),
    ]
    replies = [(Reply(id="r1", parent_id="t1", text="I agree, good work"),
                postings[0].text)]
    vec = compute_indicators(_context(headline_model, postings, replies))
    assert vec.reach.n_postings == 2
    assert vec.reach.n_likes == 2 and vec.reach.n_retweets == 1
    assert vec.reach.n_replies == 1
    assert vec.reach.sum_followers == 60
    assert vec.reach.n_countries == 1
    # one all-positive posting and one all-negative -> polarities cancel
    assert vec.tweet_polarity == 0.0
    assert vec.reply_polarity == 1.0
    assert vec.tweet_subjectivity > 0.0


def test_compute_indicators_requires_graph_membership(headline_model):
    ctx = _context(headline_model)
    ctx.graph.remove_nodes(["a1"])
    with pytest.raises(ValueError):
        compute_indicators(ctx)


def test_unbylined_article(headline_model):
    vec = compute_indicators(_context(headline_model, byline=None))
    assert vec.bylined is False
    assert numeric_encoding(vec)[NUMERIC_FIELDS.index("bylined")] == 0.0


def _article(aid, outlet):
    return Article(id=aid, url=f"https://{outlet}/{aid}", outlet=outlet,
                   title=aid, paragraphs=["body"], out_links=[],
                   parse_ok=True)


def test_weak_labels_constant_per_outlet():
    articles = {a.id: a for a in [
        _article("a1", "low.example"), _article("a2", "low.example"),
        _article("a3", "high.example"), _article("a4", "unknown.example"),
    ]}
    tiers = {"low.example": 1, "high.example": 5}
    result = weak_labels(articles, tiers)
    assert result.labels == {"a1": 1, "a2": 1, "a3": 5}
    assert result.excluded == 1


def test_weak_labels_requires_overlap():
    articles = {"a1": _article("a1", "nowhere.example")}
    with pytest.raises(ValueError):
        weak_labels(articles, {"elsewhere.example": 3})


def _tiered_vectors():
    """Tier-5 outlets score high on scientific mentions and adherence,
    tier-1 outlets low, with mild noise elsewhere."""
    vectors, labels = {}, {}
    for i in range(8):
        vectors[f"hi{i}"] = _vector(
            n_scientific_mentions=10 + i % 3, source_adherence=0.8,
            word_count=600 + 10 * i, n_weasel_quotes=0)
        labels[f"hi{i}"] = 5
        vectors[f"lo{i}"] = _vector(
            n_scientific_mentions=i % 2, source_adherence=0.1,
            word_count=200 + 10 * i, n_weasel_quotes=3)
        labels[f"lo{i}"] = 1
    return vectors, labels


def test_train_quality_orders_tiers():
    vectors, labels = _tiered_vectors()
    model = train_quality(vectors, labels, n_trees=30, seed=7)
    hi = [quality_score(model, vectors[f"hi{i}"]) for i in range(8)]
    lo = [quality_score(model, vectors[f"lo{i}"]) for i in range(8)]
    assert all(1.0 <= s <= 5.0 for s in hi + lo)
    assert sum(hi) / len(hi) > sum(lo) / len(lo)


def test_quality_score_deterministic_and_rounded():
    vectors, labels = _tiered_vectors()
    model = train_quality(vectors, labels, n_trees=30, seed=7)
    again = train_quality(vectors, labels, n_trees=30, seed=7)
    for vid in vectors:
        s = quality_score(model, vectors[vid])
        assert s == quality_score(again, vectors[vid])
        assert s == round(s, 1)


def test_quality_score_handles_missing_at_predict_time():
    vectors, labels = _tiered_vectors()
    model = train_quality(vectors, labels, n_trees=30, seed=7)
    s = quality_score(model, _vector(source_adherence=None, alexa_rank=None))
    assert 1.0 <= s <= 5.0


def test_train_quality_rejects_single_tier():
    vectors, _ = _tiered_vectors()
    with pytest.raises(ValueError):
        train_quality(vectors, {vid: 3 for vid in vectors}, n_trees=5)


def test_discriminate_ranks_separated_indicator_first():
    vectors, groups = [], []
    for i in range(6):
        tier = 5 if i < 3 else 1
        alexa = 100 + i if i < 3 else 900000 + i
        vectors.append(_vector(alexa_rank=alexa))
        groups.append(tier)
    ranking = discriminate(vectors, groups)
    assert [r[0] for r in ranking].count("alexa_rank") == 1
    assert sorted(r[0] for r in ranking) == sorted(NUMERIC_FIELDS)
    assert ranking[0][0] == "alexa_rank"
    # every untouched indicator is identical across groups: F=0, p=1
    tail = [r for r in ranking if r[0] != "alexa_rank"]
    assert all(r[1] == 0.0 and r[2] == 1.0 and r[3] == "" for r in tail)


def test_discriminate_triple_groups_hand_value():
    vectors = [_vector(word_count=w) for w in (1, 2, 3, 7, 8, 9)]
    groups = ["a", "a", "a", "b", "b", "b"]
    ranking = discriminate(vectors, groups)
    name, f, p, stars = ranking[0]
    assert name == "word_count"
    assert f == 36.0
    assert abs(p - 0.0039) < 1e-3
    assert stars == "***"


def test_discriminate_needs_two_groups():
    with pytest.raises(ValueError):
        discriminate([_vector(), _vector()], ["only", "only"])


def test_quintile_stars_hand_cases():
    reference = list(range(1, 101))
    assert quintile_stars(50.5, reference) == 3
    assert quintile_stars(0, reference) == 1
    assert quintile_stars(101, reference) == 5
    assert quintile_stars(20, reference) == 1
    assert quintile_stars(21, reference) == 2


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=60),
       st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_quintile_stars_monotone(reference, v1, v2):
    lo, hi = min(v1, v2), max(v1, v2)
    s_lo = quintile_stars(lo, reference)
    s_hi = quintile_stars(hi, reference)
    assert 1 <= s_lo <= s_hi <= 5


def test_rating_record_validation():
    RatingRecord("a1", "r1", CONDITION_WITH, 5, 0)
    with pytest.raises(ValueError):
        RatingRecord("a1", "r1", "sideways", 3, 0)
    with pytest.raises(ValueError):
        RatingRecord("a1", "r1", CONDITION_WITHOUT, 0, 0)
    with pytest.raises(ValueError):
        RatingRecord("a1", "r1", CONDITION_WITHOUT, 6, 0)


EXPERTS = {
    "s1": (3, 3), "s2": (4, 4),          # strong agreement
    "w1": (3, 4), "w2": (2, 3),          # weak agreement
    "d1": (1, 4), "d2": (2, 5),          # disagreement
}


def _ratings(condition, scores_by_article, raters=("r1", "r2")):
    out = []
    for aid, score in scores_by_article.items():
        for rid in raters:
            out.append(RatingRecord(aid, rid, condition, score, 0))
    return out


def test_rmse_report_zero_when_crowd_matches_experts():
    # integer expert means only, so crowd scores can match them exactly
    experts = {"s1": (3, 3), "s2": (4, 4), "d1": (1, 3)}
    ratings = _ratings(CONDITION_WITH, {"s1": 3, "s2": 4, "d1": 2})
    report = rmse_report(ratings, experts)
    by_bucket = {r.bucket: r for r in report}
    assert by_bucket["strong"].rmse_with == 0.0
    assert by_bucket["disagreement"].rmse_with == 0.0
    assert by_bucket["weak"].rmse_with is None
    assert by_bucket["weak"].n_articles == 0


def test_rmse_report_strong_bucket_hand_value():
    experts = {"s1": (3, 3)}
    ratings = _ratings(CONDITION_WITH, {"s1": 4})
    report = rmse_report(ratings, experts)
    strong = next(r for r in report if r.bucket == "strong")
    assert strong.rmse_with == 1.0
    assert strong.rmse_without is None


def test_rmse_report_buckets_partition_articles():
    ratings = _ratings(CONDITION_WITH, {aid: 3 for aid in EXPERTS})
    report = rmse_report(ratings, EXPERTS)
    assert sum(r.n_articles for r in report) == len(EXPERTS)
    assert [r.bucket for r in report] == ["strong", "weak", "disagreement"]
    assert {r.bucket: r.n_articles for r in report} == {
        "strong": 2, "weak": 2, "disagreement": 2}


def test_rmse_report_requires_expert_labels():
    ratings = [RatingRecord("ghost", "r1", CONDITION_WITH, 3, 0)]
    with pytest.raises(ValueError):
        rmse_report(ratings, EXPERTS)


def test_rmse_report_drops_outlier_rater():
    experts = {f"a{i}": (2, 2) for i in range(4)}
    ratings = []
    for aid in experts:
        for rid in ("r1", "r2", "r3"):
            ratings.append(RatingRecord(aid, rid, CONDITION_WITH, 2, 0))
        ratings.append(RatingRecord(aid, "shill", CONDITION_WITH, 5, 0))
    report = rmse_report(ratings, experts)
    strong = next(r for r in report if r.bucket == "strong")
    # with the shill kept the crowd mean would be 2.75 on every article
    assert strong.rmse_with == 0.0


def test_rmse_report_separates_conditions():
    experts = {"s1": (3, 3)}
    ratings = (_ratings(CONDITION_WITH, {"s1": 3}) +
               _ratings(CONDITION_WITHOUT, {"s1": 5}, raters=("q1", "q2")))
    report = rmse_report(ratings, experts)
    strong = next(r for r in report if r.bucket == "strong")
    assert strong.rmse_with == 0.0
    assert strong.rmse_without == 2.0


def test_rmse_report_automated_column():
    experts = {"s1": (3, 3), "w1": (3, 4)}
    ratings = _ratings(CONDITION_WITH, {"s1": 3, "w1": 4})
    automated = {"s1": 3.0, "w1": 3.0}
    report = rmse_report(ratings, experts, automated)
    by_bucket = {r.bucket: r for r in report}
    assert by_bucket["strong"].rmse_automated == 0.0
    assert by_bucket["weak"].rmse_automated == 0.5
    assert by_bucket["disagreement"].rmse_automated is None


def test_report_csv_round_trip(tmp_path):
    ratings = _ratings(CONDITION_WITH, {aid: 3 for aid in EXPERTS})
    report = rmse_report(ratings, EXPERTS)
    path = tmp_path / "report.csv"
    write_report_csv(path, report)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["bucket", "n_articles", "rmse_with_indicators",
                       "rmse_without_indicators", "rmse_automated"]
    assert len(rows) == 4
    assert rows[1][0] == "strong"
    assert rows[1][3] == ""  # no without-condition ratings
    assert not math.isnan(float(rows[1][2]))
