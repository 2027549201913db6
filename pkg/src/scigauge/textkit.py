"""Self-contained text analytics: tokens, sentences, POS tags, entities,
readability, sentiment, headline scoring, and word embeddings.

All linguistic knowledge comes from small bundled data files so results are
reproducible offline. Tags use a closed coarse set; unknown words fall back
to suffix rules and finally OTHER.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import NamedTuple

import numpy as np

from .learn import Forest, predict_proba, train_forest

POS_TAGS = {"NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM",
            "PROPN", "PUNCT", "OTHER"}

_DATE_TOKEN_RE = re.compile(r"\d{1,4}[-/]\d{1,2}[-/]\d{1,4}")
_NUMBER_RE = re.compile(r"\d+(?:[.,]\d+)*")
_TOKEN_RE = re.compile(
    r"\d{1,4}[-/]\d{1,2}[-/]\d{1,4}"
    r"|\d+(?:[.,]\d+)*"
    r"|[A-Za-z]+(?:['’][A-Za-z]+)*"
    r"|\S"
)
_PARA_SPLIT_RE = re.compile(r"\n\s*\n")

_SUFFIX_RULES = [
    ("ing", "VERB"), ("ed", "VERB"), ("ly", "ADV"), ("tion", "NOUN"),
    ("sion", "NOUN"), ("ment", "NOUN"), ("ness", "NOUN"), ("ity", "NOUN"),
    ("ous", "ADJ"), ("ful", "ADJ"), ("ive", "ADJ"), ("able", "ADJ"),
    ("ical", "ADJ"), ("ish", "ADJ"),
]

_SENTENCE_END = {".", "!", "?"}
_CLOSING = {'"', "'", "”", "’", ")", "]"}

_HONORIFICS = {"Dr", "Prof", "Mr", "Ms", "Mrs"}
_ORG_KEYWORDS = {"University", "Institute", "College", "Organization",
                 "Agency", "Hospital", "Foundation", "Center", "Centre"}
_ORG_CONNECTORS = {"of", "for", "and", "the"}
_MONTHS = {
    "january", "february", "march", "april", "may", "june", "july",
    "august", "september", "october", "november", "december",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
    "oct", "nov", "dec",
}


def _data_text(name: str) -> str:
    return (resources.files("scigauge") / "_data" / name).read_text("utf-8")


def _data_lines(name: str) -> list[str]:
    out = []
    for line in _data_text(name).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line)
    return out


@lru_cache(maxsize=None)
def pos_lexicon() -> dict[str, str]:
    lex = {}
    for line in _data_lines("pos_lexicon.txt"):
        word, tag = line.split("\t")
        lex[word] = tag
    return lex


@lru_cache(maxsize=None)
def positive_words() -> frozenset[str]:
    return frozenset(_data_lines("sentiment_positive.txt"))


@lru_cache(maxsize=None)
def negative_words() -> frozenset[str]:
    return frozenset(_data_lines("sentiment_negative.txt"))


@lru_cache(maxsize=None)
def given_names() -> frozenset[str]:
    return frozenset(_data_lines("given_names.txt"))


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    return frozenset(_data_lines("stopwords.txt"))


@lru_cache(maxsize=None)
def negation_words() -> frozenset[str]:
    return frozenset(_data_lines("negations.txt"))


@lru_cache(maxsize=None)
def abbreviations() -> frozenset[str]:
    return frozenset(_data_lines("abbreviations.txt"))


class Token(NamedTuple):
    surface: str
    lower: str
    pos: str


@dataclass
class TokenizedText:
    text: str
    tokens: list[Token]
    sentences: list[tuple[int, int]]    # token index ranges
    paragraphs: list[tuple[int, int]]   # sentence index ranges
    offsets: list[tuple[int, int]]      # char spans into text

    def sentence_tokens(self, s: int) -> list[Token]:
        lo, hi = self.sentences[s]
        return self.tokens[lo:hi]

    def sentence_text(self, s: int) -> str:
        lo, hi = self.sentences[s]
        if lo == hi:
            return ""
        return self.text[self.offsets[lo][0]:self.offsets[hi - 1][1]]


def sentence_view(t: TokenizedText, s: int) -> TokenizedText:
    """A one-sentence slice sharing the original text, so surfaces and
    char offsets stay valid."""
    lo, hi = t.sentences[s]
    return TokenizedText(
        text=t.text,
        tokens=t.tokens[lo:hi],
        sentences=[(0, hi - lo)],
        paragraphs=[(0, 1)],
        offsets=t.offsets[lo:hi],
    )


def paragraph_view(t: TokenizedText, p: int) -> TokenizedText:
    s_lo, s_hi = t.paragraphs[p]
    lo = t.sentences[s_lo][0]
    hi = t.sentences[s_hi - 1][1]
    sentences = [(a - lo, b - lo) for a, b in t.sentences[s_lo:s_hi]]
    return TokenizedText(
        text=t.text,
        tokens=t.tokens[lo:hi],
        sentences=sentences,
        paragraphs=[(0, len(sentences))],
        offsets=t.offsets[lo:hi],
    )


def _tag(surface: str, lower: str) -> str:
    if not any(ch.isalnum() for ch in surface):
        return "PUNCT"
    if surface[0].isdigit():
        return "NUM"
    tag = pos_lexicon().get(lower)
    if tag is not None:
        return tag
    if surface[0].isupper():
        return "PROPN"
    for suffix, t in _SUFFIX_RULES:
        if lower.endswith(suffix) and len(lower) > len(suffix) + 1:
            return t
    return "OTHER"


def _is_word(tok: Token) -> bool:
    return tok.pos != "PUNCT"


def _sentence_ranges(tokens: list[Token], lo: int, hi: int) -> list[tuple[int, int]]:
    abbrev = abbreviations()
    out = []
    start = lo
    i = lo
    dquotes = 0   # straight double quotes seen in the current sentence
    while i < hi:
        tok = tokens[i]
        if tok.surface == '"':
            dquotes += 1
        if tok.surface in _SENTENCE_END:
            boundary = True
            if tok.surface == ".":
                prev = tokens[i - 1] if i > lo else None
                if prev is not None and _is_word(prev):
                    if prev.lower in abbrev or (len(prev.surface) == 1
                                                and prev.surface.isalpha()):
                        boundary = False
            if boundary:
                j = i + 1
                while j < hi and tokens[j].surface in _CLOSING:
                    # a straight quote is only a closer when one is open
                    if tokens[j].surface == '"':
                        if dquotes % 2 == 0:
                            break
                        dquotes += 1
                    j += 1
                if j < hi and tokens[j].surface[0].islower():
                    boundary = False
                if boundary:
                    out.append((start, j))
                    start = j
                    i = j
                    dquotes = 0
                    continue
        i += 1
    if start < hi:
        out.append((start, hi))
    return out


def analyze(text: str) -> TokenizedText:
    """Tokenize, tag, and segment. Deterministic; empty text yields an
    empty structure."""
    tokens: list[Token] = []
    offsets: list[tuple[int, int]] = []
    for m in _TOKEN_RE.finditer(text):
        surface = m.group()
        tokens.append(Token(surface, surface.lower(), _tag(surface, surface.lower())))
        offsets.append((m.start(), m.end()))

    # paragraph = maximal run of tokens between blank-line gaps
    para_bounds = [0]
    pos = 0
    for gap in _PARA_SPLIT_RE.finditer(text):
        while pos < len(tokens) and offsets[pos][0] < gap.start():
            pos += 1
        if para_bounds[-1] != pos:
            para_bounds.append(pos)
    if para_bounds[-1] != len(tokens):
        para_bounds.append(len(tokens))

    sentences: list[tuple[int, int]] = []
    paragraphs: list[tuple[int, int]] = []
    for lo, hi in zip(para_bounds, para_bounds[1:]):
        first = len(sentences)
        sentences.extend(_sentence_ranges(tokens, lo, hi))
        if len(sentences) > first:
            paragraphs.append((first, len(sentences)))
    return TokenizedText(text, tokens, sentences, paragraphs, offsets)


@dataclass
class EntitySet:
    persons: set[str]
    organizations: set[str]
    dates: set[str]
    numbers: set[str]
    percentages: set[str]


@dataclass
class EntitySpans:
    """Token index ranges backing each extracted entity string."""
    persons: list[tuple[int, int]]
    organizations: list[tuple[int, int]]


def _titlecase(surface: str) -> bool:
    return surface[0].isupper() and any(c.islower() for c in surface)


def _is_year(surface: str) -> bool:
    return len(surface) == 4 and surface.isdigit() and 1500 <= int(surface) <= 2100


def _span_surface(t: TokenizedText, i: int, j: int) -> str:
    return t.text[t.offsets[i][0]:t.offsets[j - 1][1]]


def _title_run(t: TokenizedText, i: int, cap: int = 4) -> int:
    """End index of the run of titlecase tokens starting at i."""
    j = i
    while j < len(t.tokens) and j - i < cap and _titlecase(t.tokens[j].surface):
        j += 1
    return j


def extract_entities(t: TokenizedText) -> EntitySet:
    ents, _ = _entities_with_spans(t)
    return ents


def entity_spans(t: TokenizedText) -> EntitySpans:
    _, spans = _entities_with_spans(t)
    return spans


def _entities_with_spans(t: TokenizedText) -> tuple[EntitySet, EntitySpans]:
    toks = t.tokens
    n = len(toks)
    persons: set[str] = set()
    person_spans: list[tuple[int, int]] = []
    person_idx: set[int] = set()

    # honorific route: Dr./Prof./... then a capitalized run
    for i, tok in enumerate(toks):
        if tok.surface in _HONORIFICS:
            j = i + 1
            if j < n and toks[j].surface == ".":
                j += 1
            end = _title_run(t, j)
            if end > j:
                persons.add(_span_surface(t, j, end))
                person_spans.append((j, end))
                person_idx.update(range(i, end))

    # gazetteer route: known given name followed by another capitalized token
    names = given_names()
    for i, tok in enumerate(toks):
        if i in person_idx or tok.surface not in names:
            continue
        end = _title_run(t, i)
        if end - i >= 2:
            persons.add(_span_surface(t, i, end))
            person_spans.append((i, end))
            person_idx.update(range(i, end))

    organizations: set[str] = set()
    org_spans: list[tuple[int, int]] = []
    org_idx: set[int] = set()
    i = 0
    while i < n:
        if i in person_idx or not _titlecase(toks[i].surface):
            i += 1
            continue
        # capitalized run, allowing interior connectors like "of"
        j = i
        end = i
        while j < n and j not in person_idx:
            if _titlecase(toks[j].surface):
                end = j + 1
                j += 1
            elif (end > i and toks[j].lower in _ORG_CONNECTORS
                  and j + 1 < n and j + 1 not in person_idx
                  and _titlecase(toks[j + 1].surface)):
                j += 1
            else:
                break
        run = list(range(i, end))
        if any(toks[k].surface.rstrip("s") in _ORG_KEYWORDS for k in run):
            organizations.add(_span_surface(t, i, end))
            org_spans.append((i, end))
            org_idx.update(run)
        i = max(end, i + 1)

    for i, tok in enumerate(toks):
        s = tok.surface
        if (s.isalpha() and s.isupper() and 2 <= len(s) <= 6
                and i not in person_idx and i not in org_idx):
            organizations.add(s)
            org_spans.append((i, i + 1))

    dates: set[str] = set()
    date_idx: set[int] = set()
    i = 0
    while i < n:
        tok = toks[i]
        if _DATE_TOKEN_RE.fullmatch(tok.surface):
            dates.add(tok.surface)
            date_idx.add(i)
            i += 1
            continue
        if tok.lower in _MONTHS and tok.surface[0].isupper():
            start = i
            j = i + 1
            if j < n and toks[j].surface == ".":
                j += 1
            if j < n and toks[j].pos == "NUM" and toks[j].surface.isdigit() \
                    and not _is_year(toks[j].surface) and int(toks[j].surface) <= 31:
                j += 1
                if j < n and toks[j].surface == "," and j + 1 < n \
                        and _is_year(toks[j + 1].surface):
                    j += 2
            elif j < n and _is_year(toks[j].surface):
                j += 1
            # day written before the month, as in "5 January 2018"
            if start > 0 and toks[start - 1].pos == "NUM" \
                    and toks[start - 1].surface.isdigit() \
                    and not _is_year(toks[start - 1].surface) \
                    and int(toks[start - 1].surface) <= 31:
                start -= 1
            dates.add(_span_surface(t, start, j))
            date_idx.update(range(start, j))
            i = j
            continue
        i += 1
    for i, tok in enumerate(toks):
        if i not in date_idx and _is_year(tok.surface):
            dates.add(tok.surface)
            date_idx.add(i)

    numbers: set[str] = set()
    percentages: set[str] = set()
    for i, tok in enumerate(toks):
        if tok.pos != "NUM" or _DATE_TOKEN_RE.fullmatch(tok.surface):
            continue
        if i not in date_idx:
            numbers.add(tok.surface)
        nxt = toks[i + 1] if i + 1 < n else None
        if nxt is not None and (nxt.surface == "%" or nxt.lower == "percent"):
            percentages.add(_span_surface(t, i, i + 2))

    ents = EntitySet(persons, organizations, dates, numbers, percentages)
    return ents, EntitySpans(sorted(person_spans), sorted(org_spans))


def count_syllables(word: str) -> int:
    w = word.lower()
    groups = len(re.findall(r"[aeiouy]+", w))
    if w.endswith("e") and not w.endswith("le") and groups > 1:
        groups -= 1
    return max(groups, 1)


def flesch_reading_ease(t: TokenizedText) -> float:
    words = [tok for tok in t.tokens if _is_word(tok)]
    if not words or not t.sentences:
        raise ValueError("need at least one word and one sentence")
    syllables = sum(count_syllables(tok.surface) for tok in words)
    return (206.835 - 1.015 * (len(words) / len(t.sentences))
            - 84.6 * (syllables / len(words)))


@dataclass
class SentimentScore:
    polarity: float
    subjectivity: float


def sentiment(t: TokenizedText) -> SentimentScore:
    pos_set = positive_words()
    neg_set = negative_words()
    p = sum(1 for tok in t.tokens if tok.lower in pos_set)
    n = sum(1 for tok in t.tokens if tok.lower in neg_set)
    polarity = (p - n) / (p + n) if p + n else 0.0
    subjectivity = (p + n) / len(t.tokens) if t.tokens else 0.0
    return SentimentScore(polarity, subjectivity)


@dataclass
class HeadlineModel:
    forest: Forest
    vocabulary: list[str]
    prior: float

    def to_json(self) -> str:
        import json
        return json.dumps({"vocabulary": self.vocabulary, "prior": self.prior,
                           "forest": self.forest.to_json()}, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "HeadlineModel":
        import json
        obj = json.loads(text)
        return HeadlineModel(Forest.from_json(obj["forest"]),
                             obj["vocabulary"], obj["prior"])


def _title_counts(title: str, vocab_index: dict[str, int]) -> np.ndarray:
    vec = np.zeros(len(vocab_index))
    for tok in analyze(title).tokens:
        j = vocab_index.get(tok.lower)
        if j is not None:
            vec[j] += 1.0
    return vec


def train_headline_model(path=None, n_trees: int = 100, seed: int = 0) -> HeadlineModel:
    """Forest over bag-of-words counts from a TSV of (label, title) rows,
    label 1 = clickbait."""
    if path is None:
        text = _data_text("headlines.tsv")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        label, title = line.split("\t", 1)
        rows.append((int(label), title))
    if not rows:
        raise ValueError("empty headline file")
    vocab = sorted({tok.lower for _, title in rows
                    for tok in analyze(title).tokens if _is_word(tok)})
    index = {w: j for j, w in enumerate(vocab)}
    X = [_title_counts(title, index) for _, title in rows]
    y = [label for label, _ in rows]
    forest = train_forest(X, y, n_trees=n_trees, seed=seed)
    prior = sum(y) / len(y)
    return HeadlineModel(forest, vocab, prior)


def clickbait_score(title: str, model: HeadlineModel) -> float:
    if model is None or model.forest is None:
        raise ValueError("headline model not trained")
    index = {w: j for j, w in enumerate(model.vocabulary)}
    vec = _title_counts(title, index)
    if not vec.any():
        return model.prior
    return predict_proba(model.forest, vec).get(1, 0.0)


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]


def load_embeddings(path) -> EmbeddingTable:
    vectors: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            vec = np.array([float(v) for v in parts[1:]])
            if dim is None:
                dim = len(vec)
                if dim == 0:
                    raise ValueError("embedding line has no components")
            elif len(vec) != dim:
                raise ValueError("inconsistent embedding dimension")
            vectors[parts[0].lower()] = vec
    if dim is None:
        raise ValueError("empty embedding file")
    return EmbeddingTable(dim, vectors)


def doc_vector(t: TokenizedText, table: EmbeddingTable) -> np.ndarray:
    hits = [table.vectors[tok.lower] for tok in t.tokens
            if tok.lower in table.vectors]
    if not hits:
        return np.zeros(table.dimension)
    return np.mean(hits, axis=0)


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if np.array_equal(u, v):
        return 1.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))
