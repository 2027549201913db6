"""Generate the bundled mini corpus used by the pipeline and acceptance
tests.

The corpus is assembled from explicit per-article plans, and every
expected value in hand_counts.json (prune list, merge outcome, node and
edge tallies) is derived from those plans directly, never by running
the pipeline, so the tests compare implementation output against an
independently constructed ledger.

Usage: python3 tools/make_fixtures.py [out_dir]
Default out_dir: tests/fixtures/minicorpus
"""
import json
import pathlib
import random
import sys

sys.path.insert(0, str(pathlib.Path(__file__).parent))
from make_embeddings import build as build_embeddings  # noqa: E402

BASE_TS = 1700000000

OUTLETS = [
    # domain, tier, alexa rank
    ("nutrition-science-daily.example", 5, 800),
    ("evidence-health-news.example", 5, 1500),
    ("metro-health-tribune.example", 3, 9000),
    ("daily-city-post.example", 3, 15000),
    ("viral-wellness-buzz.example", 1, 120000),
    ("miracle-cure-times.example", 1, 300000),
]

SCIENCE_DOMAINS = [
    "example-university.edu",
    "nutrition-institute.example",
    "journal-of-nutrition.example",
    "trial-registry.example",
]

KEYWORDS = [
    "coffee", "chocolate", "vitamin", "sleep", "exercise", "sugar",
    "fiber", "diet", "study", "health",
]

UNIVERSITY_URL = "https://example-university.edu/nutrition-lab"
INSTITUTE_URL = "https://nutrition-institute.example/programs"
JUNK_URL = "https://random-blog.example/opinions"

# theme: food word, health phrase, lead researcher, percent, cohort size,
# year. Every theme is assigned to at most one article per body template
# and at most one paper, so no two documents share people or figures
# unless an article genuinely cites that paper.
THEMES = [
    ("coffee", "heart disease", "Maria Sanchez", 12, 180, 2021),
    ("chocolate", "memory decline", "John Porter", 23, 240, 2022),
    ("vitamin", "blood pressure", "Emily Zhang", 31, 150, 2020),
    ("protein", "obesity", "Peter Novak", 18, 320, 2023),
    ("grain", "stroke", "Laura Kim", 27, 210, 2022),
    ("sugar", "diabetes", "David Osei", 9, 275, 2021),
    ("fiber", "cholesterol", "Anna Lindqvist", 15, 130, 2023),
    ("dairy", "inflammation", "Susan Hart", 22, 260, 2020),
    ("fruit", "cancer", "Robert Weaver", 14, 390, 2019),
    ("vegetable", "kidney stones", "Linda Doyle", 19, 225, 2021),
    ("tea", "liver disease", "Michael Mercer", 11, 305, 2022),
    ("wine", "mortality", "Karen Boyd", 8, 480, 2020),
    ("meat", "immune decline", "James Whitfield", 16, 175, 2023),
    ("salt", "weight gain", "Nancy Okafor", 25, 295, 2019),
    ("breakfast", "sleep loss", "Daniel Varga", 13, 160, 2022),
    ("snack", "brain fog", "Carol Ames", 17, 350, 2021),
    ("supplement", "longevity", "Steven Pike", 24, 200, 2020),
]

# quoted clinicians in the mid-tier template, keyed by theme
MID_SPEAKERS = {
    10: "Janet Cole", 11: "Rosa Vance", 12: "Simon Hale",
    13: "Grace Ford", 14: "Oliver Benn", 15: "Irene Sax",
}

# themes reserved for papers no article cites, so an uncited paper never
# shares people or figures with an article it gets paired against
EXTRA_THEMES = [
    ("nuts", "migraine", "Victor Hughes", 21, 410, 2018),
    ("rice", "gout", "Sofia Marino", 34, 95, 2017),
    ("honey", "insomnia", "Clara Dubois", 26, 505, 2016),
    ("olive", "anemia", "Henry Adeyemi", 7, 340, 2015),
]


def paper_url(pid: str) -> str:
    return f"https://journal-of-nutrition.example/paper/{pid}"


def article_url(outlet: str, aid: str) -> str:
    return f"https://{outlet}/story/{aid}"


# Per-article plans. quality governs the body template; paper is the
# single cited paper id or None; domain_link adds one allowlist link.
# quote annotations for a01..a20 are derived from the templates below.
ARTICLE_PLANS = []


def _plan(aid, outlet, theme, quality, paper, domain_link, n_postings,
          n_replies, byline):
    ARTICLE_PLANS.append({
        "id": aid, "outlet": outlet, "theme": theme, "quality": quality,
        "paper": paper, "domain_link": domain_link,
        "n_postings": n_postings, "n_replies": n_replies, "byline": byline,
    })


def build_plans():
    high_outlets = [OUTLETS[0][0], OUTLETS[1][0]]
    mid_outlets = [OUTLETS[2][0], OUTLETS[3][0]]
    low_outlets = [OUTLETS[4][0], OUTLETS[5][0]]
    domains = [UNIVERSITY_URL, INSTITUTE_URL]
    bylines = ["Ann Walker", "Thomas Reed", "Nina Brooks", "Carl Mason"]
    for i in range(10):  # a01..a10 link one paper and one institution
        _plan(f"a{i + 1:02d}", high_outlets[i % 2], i, "high",
              f"p{i + 1:02d}", domains[i % 2], 4, 3, bylines[i % 4])
    for i in range(6):   # a11..a16, one weaker source each
        aid = f"a{i + 11:02d}"
        paper = {0: "p11", 1: "p12", 2: "p13", 3: "p14", 5: "p15"}.get(i)
        domain = domains[0] if i == 4 else None
        byline = bylines[i % 4] if i % 2 == 0 else None
        _plan(aid, mid_outlets[i % 2], 10 + i, "mid", paper, domain,
              3, 2, byline)
    for i in range(10):  # a17..a26 cite no paper, only a domain link
        _plan(f"a{i + 17:02d}", low_outlets[i % 2], i, "low",
              None, domains[i % 2], 3, 1, None)
    # planted near-duplicate pair: a27 carries one more out-link than a28
    _plan("a27", mid_outlets[1], 16, "mid", "p16", UNIVERSITY_URL, 3, 2,
          bylines[1])
    _plan("a28", mid_outlets[1], 16, "dup", "p16", None, 3, 1, None)
    # reference-free articles that prune must remove with their postings
    _plan("a29", low_outlets[0], 14, "bare", None, None, 3, 1, None)
    _plan("a30", low_outlets[1], 15, "bare", None, None, 3, 1, None)


# one closing paragraph per high-tier article, each built from vocabulary
# the other bodies never use, so no two same-template articles drift close
# to the near-duplicate threshold
HIGH_CLOSERS = [
    ("Enrollment ran across four city hospitals and two rural campuses. "
     "Bus vouchers and evening slots kept attendance strong."),
    ("Funding came from a nonprofit endowment with zero industry money. "
     "Every budget line sits on a public ledger anyone can download."),
    ("Volunteers wore wrist monitors that captured each serving "
     "automatically. Battery swaps happened during routine visits."),
    ("Dropout stayed under five volunteers a season, unusually low. "
     "Organizers credit postcards mailed before every checkup."),
    ("Half the cohort kept handwritten meal diaries as a backup record. "
     "Archivists scanned eleven thousand pages into the registry."),
    ("Winter sessions moved online while builders refurbished the "
     "clinic. Attendance barely dipped despite heavy snow."),
    ("A separate pilot among fishing families produced matching curves. "
     "Boat schedules forced some creative appointment times."),
    ("Blood draws happened quarterly, always before nine in the "
     "morning. A mobile van covered the outlying villages."),
    ("Translators helped enroll households speaking eleven languages. "
     "Consent packets came in large print and audio editions."),
    ("An independent board audited the randomization twice a year. "
     "Both audits matched the preregistered plan exactly."),
]


def high_paragraphs(theme_idx):
    food, health, person, pct, n, year = THEMES[theme_idx]
    first = person.split()[0]
    surname = person.split()[1]
    return [
        (f"A large clinical trial in the Journal of Nutrition links "
         f"regular {food} intake with lower {health} risk. Researchers "
         f"at Example University followed {n} adults for three years."),
        (f'"The drop in {health} risk was consistent across every group '
         f'we tracked," said Dr. {first} {surname}. The team compared '
         f"daily {food} servings against {health} outcomes in {n} adults."),
        (f"{surname} told reporters the group will extend the work to "
         f"related foods next year. Participants logged meals daily "
         f"during {year} and visited the clinic each month."),
        (f"The Example University team said the finding will guide new "
         f"dietary advice. Risk of {health} fell by {pct} percent among "
         f"daily consumers, and the effect persisted in older adults."),
        HIGH_CLOSERS[theme_idx % len(HIGH_CLOSERS)],
    ]


# sentence indices of true quotes in the high template, by construction:
# paragraph 2 sentence 1 (direct), paragraph 3 sentence 1 (indirect),
# paragraph 4 sentence 1 (institution). Sentences are numbered across
# the whole body: p1 has 2 sentences, p2 has 2, p3 has 2, p4 has 2.
HIGH_GOLD = [2, 4, 6]
HIGH_BASELINE_GOLD = [2]


def mid_paragraphs(theme_idx, aid):
    food, health, person, pct, n, year = THEMES[theme_idx]
    speaker = MID_SPEAKERS[theme_idx]
    return [
        (f"City clinics report more questions about {food} and {health} "
         f"this season. Local menus now carry {food} options on most "
         f"corners."),
        (f'"Patients ask about {food} nearly every week now," said '
         f'{speaker}. Appointment volumes rose steadily through {year}.'),
        (f"The study found that {health} risk fell by {pct} percent. "
         f"Clinics plan updated pamphlets for the waiting rooms."),
    ]


# direct quote is body sentence 2, study quote is sentence 4
MID_GOLD = [2, 4]
MID_BASELINE_GOLD = [2]


def low_paragraphs(theme_idx):
    food, health, person, pct, n, year = THEMES[theme_idx]
    return [
        (f"This one {food} trick is sweeping the internet. Fans swear "
         f"{food} erased their {health} in {pct} days flat."),
        (f"Experts believe the {food} trick melts {health} worries "
         f"almost overnight. Our inbox is overflowing with {food} "
         f"stories, {health} miracles, and {food} selfies."),
    ]


LOW_GOLD = [2]
LOW_BASELINE_GOLD = []


def dup_paragraphs(theme_idx, variant):
    food, health, person, pct, n, year = THEMES[theme_idx]
    opener = "syndicated" if variant else "shared"
    return [
        (f"A {opener} wire piece on {food} and {health} is making the "
         f"rounds in city papers this week. The column repeats the same "
         f"advice about daily {food} portions and regular checkups."),
        (f"Readers keep mailing the column to relatives. Editors expect "
         f"the {food} letters to continue through the spring."),
    ]


def bare_paragraphs(theme_idx):
    food, health, person, pct, n, year = THEMES[theme_idx]
    return [
        (f"A celebrity swears by a {food} routine before sunrise. "
         f"The post links only to a personal blog about {health}."),
    ]


def high_title(theme_idx):
    food, health = THEMES[theme_idx][0], THEMES[theme_idx][1]
    return (f"Daily {food.title()} Intake Linked To Lower "
            f"{health.title()} Risk In Large Trial")


def mid_title(theme_idx):
    food, health = THEMES[theme_idx][0], THEMES[theme_idx][1]
    return f"Clinics Field More {food.title()} Questions As {health.title()} Worries Grow"


def low_title(theme_idx):
    food, health = THEMES[theme_idx][0], THEMES[theme_idx][1]
    return (f"You Won't Believe What This {food.title()} Trick Does To "
            f"Your {health.title()}")


def paper_record(pid, theme_idx, themes=THEMES):
    food, health, person, pct, n, year = themes[theme_idx]
    first, surname = person.split()
    body = (
        f"We enrolled {n} adults in a randomized trial during {year} and "
        f"measured daily {food} intake against {health} outcomes. The "
        f"cohort completed monthly clinic visits for three years.\n\n"
        f"Risk of {health} fell by {pct} percent in the intervention "
        f"arm. Dr. {first} {surname} of Example University led the "
        f"cohort, and the protocol sits in the public trial registry. "
        f"Adjustment for diet, weight, and blood pressure left the "
        f"effect unchanged across every subgroup we examined."
    )
    return {
        "id": pid,
        "url": paper_url(pid),
        "domain": "journal-of-nutrition.example",
        "title": (f"{food.title()} Consumption And {health.title()} In "
                  f"A Three Year Cohort"),
        "body": body,
        "parse_ok": True,
    }


STANCE_TEMPLATES = {
    "supporting": [
        "I agree, this is accurate and the evidence looks solid.",
        "Correct, a credible {food} study with a good design.",
        "True and well done, the {food} result seems right.",
        "Great work, accurate reporting and trustworthy evidence.",
        "This is right, a credible trial and good news for {food} fans.",
        "Agree completely, the evidence on {food} is strong and true.",
        "Good study, the {food} finding looks accurate to me.",
        "Solid and credible work, I trust this {food} evidence.",
    ],
    "contradicting": [
        "No, this is wrong and the {food} claim is fake.",
        "Not true, a misleading and false reading of the data.",
        "Nonsense, the {food} story is a hoax and simply wrong.",
        "This is false, never trust such dubious {food} claims.",
        "Wrong again, fake numbers and a misleading headline.",
        "No way, a false and misleading take on {food}.",
        "The claim is dubious and the {food} spin is nonsense.",
        "Misleading rubbish, the {food} numbers are plain wrong.",
    ],
    "questioning": [
        "Is this true? Where is the {food} source?",
        "Really? Which journal published the {food} trial?",
        "How big was the sample? Who funded the {food} work?",
        "Source? Was the {food} trial even controlled?",
        "Can anyone confirm this? What was the {food} dose?",
        "Why trust it? Who ran the {food} study?",
        "Did they adjust for diet? Where is the data?",
        "Who reviewed this? How long did the {food} trial run?",
    ],
    "commenting": [
        "I saw this over breakfast this morning.",
        "My uncle has {food} every single day.",
        "There is a {food} stand near my office.",
        "Sharing this with the family group now.",
        "We talked about {food} at dinner yesterday.",
        "Reading this on the train ride home.",
        "Reminds me of my grandmother's {food} habit.",
        "The photo with this {food} piece is lovely.",
    ],
    "not-related": [
        "Follow me for daily deals on sneakers.",
        "The weather in town is lovely this weekend.",
    ],
}

STANCE_ORDER = ["supporting", "contradicting", "questioning", "commenting"]


def posting_text(theme_idx, k):
    food = THEMES[theme_idx][0]
    health = THEMES[theme_idx][1]
    shapes = [
        f"New study on {food} and {health} is out, worth a read",
        f"Big {food} news for anyone watching their {health}, study inside",
        f"Interesting {food} study results on {health} today",
        f"Another {food} and {health} study making the rounds",
    ]
    return shapes[k % len(shapes)]


def main():
    out_dir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1
                           else "tests/fixtures/minicorpus")
    out_dir.mkdir(parents=True, exist_ok=True)
    build_plans()
    rng = random.Random(20240)

    articles, papers, postings, replies = [], [], [], []
    stance_rows = []
    gold = {}
    posting_ids_of = {}

    cited = {}
    for plan in ARTICLE_PLANS:
        if plan["paper"]:
            cited.setdefault(plan["paper"], plan["theme"])
    extra_slot = 0
    for i in range(1, 21):
        pid = f"p{i:02d}"
        if pid in cited:
            papers.append(paper_record(pid, cited[pid]))
        else:
            papers.append(paper_record(
                pid, extra_slot % len(EXTRA_THEMES), themes=EXTRA_THEMES))
            extra_slot += 1

    reply_seq = 1
    for idx, plan in enumerate(ARTICLE_PLANS):
        aid, theme, quality = plan["id"], plan["theme"], plan["quality"]
        gold_sents, base_sents = [], []
        if quality == "high":
            paragraphs = high_paragraphs(theme)
            title = high_title(theme)
            gold_sents, base_sents = HIGH_GOLD, HIGH_BASELINE_GOLD
        elif quality == "mid" and aid != "a27":
            paragraphs = mid_paragraphs(theme, aid)
            title = mid_title(theme)
            gold_sents, base_sents = MID_GOLD, MID_BASELINE_GOLD
        elif quality == "low":
            paragraphs = low_paragraphs(theme)
            title = low_title(theme)
            gold_sents, base_sents = LOW_GOLD, LOW_BASELINE_GOLD
        elif quality in ("mid", "dup"):  # the planted duplicate pair
            paragraphs = dup_paragraphs(theme, variant=quality == "dup")
            title = mid_title(theme)
        else:  # bare
            paragraphs = bare_paragraphs(theme)
            title = low_title(theme)

        out_links = []
        if plan["paper"]:
            out_links.append(paper_url(plan["paper"]))
        if plan["domain_link"]:
            out_links.append(plan["domain_link"])
        if quality == "bare":
            out_links.append(JUNK_URL)

        article = {
            "id": aid,
            "url": article_url(plan["outlet"], aid),
            "outlet": plan["outlet"],
            "title": title,
            "paragraphs": paragraphs,
            "out_links": out_links,
            "parse_ok": True,
        }
        if plan["byline"]:
            article["byline"] = plan["byline"]
        articles.append(article)
        if aid <= "a20":
            gold[aid] = {"quotes": gold_sents, "baseline": base_sents}

        tier = {o: t for o, t, _ in OUTLETS}[plan["outlet"]]
        pids = []
        for k in range(plan["n_postings"]):
            tid = f"t{len(postings) + 1:03d}"
            pids.append(tid)
            boost = {5: 40, 3: 12, 1: 4}[tier]
            postings.append({
                "id": tid,
                "author_id": f"u{(len(postings) * 7) % 53 + 1:03d}",
                "text": posting_text(theme, k + idx),
                "urls": [article["url"]],
                "timestamp": BASE_TS + idx * 7200 + k * 5400,
                "likes": rng.randrange(boost + 1),
                "retweets": rng.randrange(boost // 2 + 1),
                "followers": 100 + rng.randrange(boost * 25 + 1),
                "followees": 50 + rng.randrange(200),
                "country": ["us", "gb", "de", "ca", None][
                    (idx + k) % 5],
            })
        posting_ids_of[aid] = pids

        for k in range(plan["n_replies"]):
            rid = f"r{reply_seq:03d}"
            reply_seq += 1
            label = STANCE_ORDER[(reply_seq + idx) % 4]
            text = STANCE_TEMPLATES[label][(reply_seq + k) % 8].format(
                food=THEMES[theme][0])
            replies.append({
                "id": rid,
                "parent_id": pids[k % len(pids)],
                "text": text,
                "likes": rng.randrange(6),
                "retweets": rng.randrange(3),
            })
            stance_rows.append((rid, label))

    # top up the labeled pool to 56 replies per class, rotating parents
    # over the postings of the ten richest articles
    per_class = {label: sum(1 for _, l in stance_rows if l == label)
                 for label in STANCE_ORDER}
    host_postings = [pid for aid in sorted(posting_ids_of)[:10]
                     for pid in posting_ids_of[aid]]
    slot = 0
    for label in STANCE_ORDER:
        theme_cycle = 0
        while per_class[label] < 56:
            rid = f"r{reply_seq:03d}"
            reply_seq += 1
            text = STANCE_TEMPLATES[label][reply_seq % 8].format(
                food=THEMES[theme_cycle % 7][0])
            replies.append({
                "id": rid,
                "parent_id": host_postings[slot % len(host_postings)],
                "text": text,
                "likes": rng.randrange(6),
                "retweets": rng.randrange(3),
            })
            stance_rows.append((rid, label))
            per_class[label] += 1
            slot += 1
            theme_cycle += 1
    # a small not-related tail exercises the training filter
    for k in range(8):
        rid = f"r{reply_seq:03d}"
        reply_seq += 1
        replies.append({
            "id": rid,
            "parent_id": host_postings[(slot + k) % len(host_postings)],
            "text": STANCE_TEMPLATES["not-related"][k % 2],
            "likes": 0,
            "retweets": 0,
        })
        stance_rows.append((rid, "not-related"))

    def write_jsonl(name, records):
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    write_jsonl("articles.jsonl", articles)
    write_jsonl("papers.jsonl", papers)
    write_jsonl("postings.jsonl", postings)
    write_jsonl("replies.jsonl", replies)

    (out_dir / "science_domains.txt").write_text(
        "\n".join(SCIENCE_DOMAINS) + "\n", "utf-8")
    (out_dir / "keywords.txt").write_text(
        "\n".join(KEYWORDS) + "\n", "utf-8")
    with open(out_dir / "outlet_metadata.tsv", "w", encoding="utf-8") as fh:
        for domain, tier, alexa in OUTLETS:
            fh.write(f"{domain}\t{tier}\t{alexa}\n")
    with open(out_dir / "stance_labels.tsv", "w", encoding="utf-8") as fh:
        fh.write("# reply_id\tlabel\n")
        for rid, label in sorted(stance_rows):
            fh.write(f"{rid}\t{label}\n")

    expert_labels = {
        "a01": [4, 4], "a11": [3, 3], "a17": [2, 2], "a02": [5, 5],
        "a03": [4, 5], "a12": [3, 4], "a18": [1, 2], "a04": [4, 3],
        "a05": [2, 5], "a13": [1, 3], "a19": [1, 4], "a06": [3, 5],
    }
    (out_dir / "expert_labels.json").write_text(
        json.dumps(expert_labels, indent=2, sort_keys=True) + "\n", "utf-8")

    with open(out_dir / "quotes_gold.json", "w", encoding="utf-8") as fh:
        fh.write(json.dumps(gold, indent=2, sort_keys=True) + "\n")

    table = build_embeddings()
    lines = [f"{w} " + " ".join(f"{x:.5f}" for x in table[w])
             for w in sorted(table)]
    (out_dir / "embeddings.txt").write_text("\n".join(lines) + "\n", "utf-8")

    (out_dir / "config.toml").write_text(
        '[corpus]\n'
        'postings = "postings.jsonl"\n'
        'replies = "replies.jsonl"\n'
        'articles = "articles.jsonl"\n'
        'papers = "papers.jsonl"\n'
        '\n'
        '[allowlist]\n'
        'science_domains = "science_domains.txt"\n'
        'keywords = "keywords.txt"\n'
        '\n'
        '[resources]\n'
        'embeddings = "embeddings.txt"\n'
        'outlet_metadata = "outlet_metadata.tsv"\n'
        'stance_labels = "stance_labels.tsv"\n'
        'expert_labels = "expert_labels.json"\n'
        '\n'
        '[output]\n'
        'dir = "out"\n'
        '\n'
        '[seeds]\n'
        'pipeline = 0\n'
        '\n'
        '[params]\n'
        'topics_k = 6\n'
        'topics_iterations = 120\n'
        'forest_trees = 50\n', "utf-8")

    # ---- construction-derived expectations -------------------------
    bare_articles = [p["id"] for p in ARTICLE_PLANS if p["quality"] == "bare"]
    pruned_postings = sorted(pid for aid in bare_articles
                             for pid in posting_ids_of[aid])
    paper_edges = [(p["id"], p["paper"]) for p in ARTICLE_PLANS if p["paper"]]
    domain_edges = [(p["id"],
                     p["domain_link"].split("/")[2])
                    for p in ARTICLE_PLANS if p["domain_link"]]
    domains_linked = sorted({d for _, d in domain_edges})
    n_postings = len(postings)
    n_articles = len(ARTICLE_PLANS)
    n_papers = len(papers)

    built_nodes = n_postings + n_articles + n_papers + len(domains_linked)
    built_edges = n_postings + len(paper_edges) + len(domain_edges)
    pruned_nodes = built_nodes - len(bare_articles) - len(pruned_postings)
    pruned_edges = built_edges - len(pruned_postings)
    # merge removes a28, drops its own reference edge, rewires postings
    a28_paper_edges = sum(1 for src, _ in paper_edges if src == "a28")
    final_nodes = pruned_nodes - 1
    final_edges = pruned_edges - a28_paper_edges

    hand = {
        "pruned_articles": sorted(bare_articles),
        "pruned_postings": pruned_postings,
        "duplicate": {
            "removed": "a28",
            "survivor": "a27",
            "rewired_postings": posting_ids_of["a28"],
        },
        "built": {"nodes": built_nodes, "edges": built_edges},
        "after_prune": {"nodes": pruned_nodes, "edges": pruned_edges},
        "after_merge": {"nodes": final_nodes, "edges": final_edges},
        "surviving_articles": sorted(
            p["id"] for p in ARTICLE_PLANS
            if p["quality"] not in ("bare", "dup")),
        "tiers": {p["id"]: {o: t for o, t, _ in OUTLETS}[p["outlet"]]
                  for p in ARTICLE_PLANS},
    }
    (out_dir / "hand_counts.json").write_text(
        json.dumps(hand, indent=2, sort_keys=True) + "\n", "utf-8")

    print(f"wrote mini corpus to {out_dir}: {n_articles} articles, "
          f"{n_postings} postings, {n_papers} papers, "
          f"{len(replies)} replies, {len(stance_rows)} stance labels")


if __name__ == "__main__":
    main()
