"""Generate the fixture word-embedding table.

Words are grouped into semantic clusters; each word's vector is its
cluster direction plus a small word-specific perturbation, so nearest
neighbors stay within the cluster.  Everything is seeded from string
hashes, so the output is stable across runs and platforms.

Usage: python3 tools/make_embeddings.py [out_path]
"""
import hashlib
import math
import random
import sys

DIM = 32
CLUSTER_WEIGHT = 0.9
NOISE_WEIGHT = 0.25

CLUSTERS = {
    "reporting": [
        "say", "claim", "prove", "analyze", "find", "show", "report",
        "suggest", "argue", "conclude", "believe", "think", "state",
        "announce", "explain", "note", "warn", "tell", "insist", "reveal",
        "indicate", "confirm", "assert", "estimate", "predict", "describe",
        "mention", "acknowledge", "observe", "remark",
    ],
    "study": [
        "study", "survey", "analysis", "research", "trial", "paper",
        "document", "publication", "findings", "review", "experiment",
        "assessment", "evaluation", "investigation", "dataset", "cohort",
        "sample", "questionnaire", "poll", "census", "audit", "screening",
        "examination", "inquiry", "registry", "database",
    ],
    "scientist": [
        "researcher", "scientist", "analyst", "expert", "author",
        "professor", "academic", "doctor", "biologist", "chemist",
        "physicist", "epidemiologist", "nutritionist", "statistician",
        "economist", "psychologist", "scholar", "investigator",
        "specialist", "fellow", "lecturer", "physician", "cardiologist",
        "dietitian", "geneticist", "immunologist",
    ],
    "food": [
        "coffee", "tea", "wine", "chocolate", "sugar", "salt", "fat",
        "protein", "fiber", "vitamin", "supplement", "diet", "meal",
        "breakfast", "vegetable", "fruit", "grain", "dairy", "meat",
        "snack", "beverage", "calorie",
    ],
    "health": [
        "health", "disease", "obesity", "diabetes", "heart", "cancer",
        "stroke", "risk", "mortality", "blood", "pressure", "cholesterol",
        "inflammation", "immune", "liver", "kidney", "brain", "memory",
        "sleep", "exercise", "weight", "longevity",
    ],
    "discourse": [
        "wrong", "right", "true", "false", "fake", "hoax", "misleading",
        "accurate", "evidence", "source", "debunk", "agree", "disagree",
        "doubt", "trust", "nonsense", "correct", "plausible", "dubious",
        "credible",
    ],
    "general": [
        "people", "percent", "year", "group", "number", "result", "effect",
        "cause", "change", "increase", "decrease", "level", "rate", "team",
        "world", "country", "time", "day", "week", "amount",
    ],
}


def _seeded_unit(label: str) -> list[float]:
    seed = int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "big")
    rng = random.Random(seed)
    v = [rng.gauss(0.0, 1.0) for _ in range(DIM)]
    norm = math.sqrt(sum(x * x for x in v))
    return [x / norm for x in v]


def build() -> dict[str, list[float]]:
    table = {}
    for cluster, words in CLUSTERS.items():
        center = _seeded_unit("cluster:" + cluster)
        for word in words:
            noise = _seeded_unit("word:" + word)
            vec = [CLUSTER_WEIGHT * c + NOISE_WEIGHT * n
                   for c, n in zip(center, noise)]
            norm = math.sqrt(sum(x * x for x in vec))
            table[word] = [x / norm for x in vec]
    return table


def main() -> None:
    out_path = sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/embeddings.txt"
    table = build()
    lines = []
    for word in sorted(table):
        coords = " ".join(f"{x:.5f}" for x in table[word])
        lines.append(f"{word} {coords}")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines)} vectors to {out_path}")


if __name__ == "__main__":
    main()
