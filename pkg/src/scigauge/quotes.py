"""Quote detection and attribution over word-class patterns.

Sentences are mapped to a string of single-character class codes
(reporting verb, study noun, person entity, quoted span, ...) and the
patterns from ``_data/quote_patterns.txt`` are compiled to regexes over
that alphabet.  The class lexicons start from small bundled seed lists
and grow through embedding nearest neighbors.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

from .textkit import (
    EmbeddingTable,
    EntitySet,
    EntitySpans,
    TokenizedText,
    _data_lines,
    cosine,
    entity_spans,
    extract_entities,
    given_names,
    sentence_view,
)

QUOTE_KIND_PERSON = "NamedPerson"
QUOTE_KIND_ORG = "Organization"
QUOTE_KIND_UNNAMED_SCIENTIST = "UnnamedScientist"
QUOTE_KIND_UNNAMED_STUDY = "UnnamedStudy"

# one char per token class; patterns compile to regexes over this alphabet
_CLASS_CODES = {
    "REPORTING_VERB": "V",
    "STUDY_NOUN": "S",
    "SCIENTIST_NOUN": "C",
    "PERSON": "P",
    "ORG": "O",
    "PRONOUN": "R",
    "QUOTE_MARK_SPAN": "Q",
    "OTHER": "X",
}

_SUBJECT_PRIORITY = ["P", "O", "C", "S", "R"]

_PRONOUNS = {"he", "she", "they", "we", "i", "it", "who"}
_QUOTE_OPEN = {'"', "“"}
_QUOTE_CLOSE = {'"', "”"}
_MIN_SPAN_TOKENS = 3

_SCIENCE_ORG_WORDS = {"university", "institute", "laboratory", "journal"}
_INITIAL_SKIP = {"of", "for", "and", "the"}


@lru_cache(maxsize=None)
def _irregular_lemmas() -> dict[str, str]:
    out = {}
    for line in _data_lines("irregular_verbs.txt"):
        inflected, lemma = line.split("\t")
        out[inflected] = lemma
    return out


def _lemma_candidates(word: str) -> list[str]:
    """Cheap inflection stripping; enough for lexicon lookup."""
    out = [word]
    irregular = _irregular_lemmas().get(word)
    if irregular:
        out.append(irregular)
    if word.endswith("ies") and len(word) > 4:
        out.append(word[:-3] + "y")
    if word.endswith("es") and len(word) > 3:
        out.append(word[:-2])
    if word.endswith("s") and len(word) > 2:
        out.append(word[:-1])
    if word.endswith("ed") and len(word) > 3:
        out.append(word[:-2])
        out.append(word[:-1])
    if word.endswith("ing") and len(word) > 4:
        out.append(word[:-3])
        out.append(word[:-3] + "e")
    return out


def _in_lexicon(word: str, lexicon: frozenset[str]) -> bool:
    return any(c in lexicon for c in _lemma_candidates(word))


def expand_lexicon(seeds: set[str], table: EmbeddingTable, k: int) -> set[str]:
    """Union of the seeds and, per in-vocabulary seed, its k nearest
    vocabulary words by cosine (the seed itself excluded)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    out = set(seeds)
    if k == 0:
        return out
    vocab = sorted(table.vectors)
    for seed in sorted(seeds):
        vec = table.vectors.get(seed)
        if vec is None:
            continue
        scored = [(-cosine(vec, table.vectors[w]), w)
                  for w in vocab if w != seed]
        scored.sort()
        out.update(w for _, w in scored[:k])
    return out


def neighbor_rows(seeds: set[str], table: EmbeddingTable,
                  k: int) -> list[tuple[str, str, float]]:
    """(word, seed, cosine) rows behind an expansion, for manual review."""
    rows = []
    vocab = sorted(table.vectors)
    for seed in sorted(seeds):
        vec = table.vectors.get(seed)
        if vec is None:
            continue
        scored = [(-cosine(vec, table.vectors[w]), w)
                  for w in vocab if w != seed]
        scored.sort()
        rows.extend((w, seed, -neg) for neg, w in scored[:k])
    return rows


def write_lexicon_review(path, table: EmbeddingTable, k: int = 20) -> None:
    """TSV dump of every expansion candidate across the three seed lists."""
    lines = ["word\tseed\tcosine"]
    for seeds in (reporting_verb_seeds(), study_noun_seeds(),
                  scientist_noun_seeds()):
        for word, seed, cos in neighbor_rows(set(seeds), table, k):
            lines.append(f"{word}\t{seed}\t{cos:.6f}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


@lru_cache(maxsize=None)
def reporting_verb_seeds() -> frozenset[str]:
    return frozenset(_data_lines("reporting_verbs_seed.txt"))


@lru_cache(maxsize=None)
def study_noun_seeds() -> frozenset[str]:
    return frozenset(_data_lines("study_nouns_seed.txt"))


@lru_cache(maxsize=None)
def scientist_noun_seeds() -> frozenset[str]:
    return frozenset(_data_lines("scientist_nouns_seed.txt"))


@dataclass(frozen=True)
class WordClassLexicon:
    reporting_verbs: frozenset[str]
    study_nouns: frozenset[str]
    scientist_nouns: frozenset[str]

    @classmethod
    def from_seeds(cls) -> "WordClassLexicon":
        return cls(reporting_verb_seeds(), study_noun_seeds(),
                   scientist_noun_seeds())

    @classmethod
    def expanded(cls, table: EmbeddingTable, k: int = 20) -> "WordClassLexicon":
        return cls(
            frozenset(expand_lexicon(set(reporting_verb_seeds()), table, k)),
            frozenset(expand_lexicon(set(study_noun_seeds()), table, k)),
            frozenset(expand_lexicon(set(scientist_noun_seeds()), table, k)),
        )


@dataclass(frozen=True)
class Pattern:
    name: str
    regex: re.Pattern


def _compile_pattern(seq: str) -> str:
    parts = []
    for item in seq.split():
        m = re.fullmatch(r"ANY\{(\d+),(\d*)\}", item)
        if m:
            lo, hi = m.group(1), m.group(2)
            parts.append(f".{{{lo},{hi}}}" if hi else f".{{{lo},}}")
            continue
        codes = []
        for name in item.split("|"):
            code = _CLASS_CODES.get(name)
            if code is None:
                raise ValueError(f"unknown token class {name!r}")
            codes.append(code)
        parts.append(codes[0] if len(codes) == 1 else "[" + "".join(codes) + "]")
    return "".join(parts)


@lru_cache(maxsize=None)
def load_patterns() -> tuple[Pattern, ...]:
    out = []
    for line in _data_lines("quote_patterns.txt"):
        name, _, seq = line.partition(":")
        name = name.strip()
        seq = seq.strip()
        if not name or not seq:
            raise ValueError(f"malformed pattern line: {line!r}")
        out.append(Pattern(name, re.compile(_compile_pattern(seq))))
    return tuple(out)


def _quote_spans(tokens) -> list[tuple[int, int]]:
    """Index ranges [open, close] of quoted runs holding >= 3 inner tokens."""
    spans = []
    i = 0
    n = len(tokens)
    while i < n:
        if tokens[i].surface in _QUOTE_OPEN:
            j = i + 1
            while j < n and tokens[j].surface not in _QUOTE_CLOSE:
                j += 1
            if j < n and j - i - 1 >= _MIN_SPAN_TOKENS:
                spans.append((i, j + 1))
                i = j + 1
                continue
        i += 1
    return spans


@dataclass
class _ClassifiedSentence:
    codes: str                       # one class char per unit
    unit_spans: list[tuple[int, int]]  # token range backing each unit


def _classify_sentence(t: TokenizedText, s: int, lex: WordClassLexicon,
                       spans: EntitySpans,
                       person_words: frozenset[str] = frozenset()) -> _ClassifiedSentence:
    lo, hi = t.sentences[s]
    tokens = t.tokens[lo:hi]
    local_person = [(a - lo, b - lo) for a, b in spans.persons
                    if a >= lo and b <= hi]
    local_org = [(a - lo, b - lo) for a, b in spans.organizations
                 if a >= lo and b <= hi]
    qspans = _quote_spans(tokens)

    codes = []
    unit_spans = []
    i = 0
    n = len(tokens)
    qmap = {a: b for a, b in qspans}
    pmap = {a: b for a, b in local_person}
    omap = {a: b for a, b in local_org}
    person_tokens = {k for a, b in local_person for k in range(a, b)}
    org_tokens = {k for a, b in local_org for k in range(a, b)}
    while i < n:
        if i in qmap:
            codes.append("Q")
            unit_spans.append((lo + i, lo + qmap[i]))
            i = qmap[i]
            continue
        if i in pmap and pmap[i] <= n:
            codes.append("P")
            unit_spans.append((lo + i, lo + pmap[i]))
            i = pmap[i]
            continue
        if i in omap and omap[i] <= n and i not in person_tokens:
            codes.append("O")
            unit_spans.append((lo + i, lo + omap[i]))
            i = omap[i]
            continue
        tok = tokens[i]
        if i in person_tokens:
            code = "P"
        elif i in org_tokens:
            code = "O"
        elif tok.pos == "PROPN" and (tok.surface in person_words
                                     or tok.surface in given_names()):
            # bare surname or given name of a person not named in full here
            code = "P"
        elif tok.pos == "PUNCT":
            code = "X"
        elif _in_lexicon(tok.lower, lex.reporting_verbs):
            code = "V"
        elif _in_lexicon(tok.lower, lex.study_nouns):
            code = "S"
        elif _in_lexicon(tok.lower, lex.scientist_nouns):
            code = "C"
        elif tok.lower in _PRONOUNS and tok.pos == "PRON":
            code = "R"
        else:
            code = "X"
        codes.append(code)
        unit_spans.append((lo + i, lo + i + 1))
        i += 1
    return _ClassifiedSentence("".join(codes), unit_spans)


@dataclass
class Candidate:
    sentence_index: int
    text: str
    patterns: tuple[str, ...]
    subject_code: str                 # class char of the attribution subject
    subject_span: tuple[int, int]     # token range of that subject


def _find_subject(cs: _ClassifiedSentence) -> tuple[str, tuple[int, int]]:
    for code in _SUBJECT_PRIORITY:
        pos = cs.codes.find(code)
        if pos >= 0:
            return code, cs.unit_spans[pos]
    return "X", (0, 0)


def _match_sentences(t: TokenizedText, lex: WordClassLexicon,
                     patterns: tuple[Pattern, ...]) -> list[Candidate]:
    spans = entity_spans(t)
    person_words = frozenset(
        w for name in extract_entities(t).persons
        if len(name.split()) >= 2 for w in name.split())
    out = []
    for s in range(len(t.sentences)):
        cs = _classify_sentence(t, s, lex, spans, person_words)
        hits = tuple(p.name for p in patterns if p.regex.search(cs.codes))
        if not hits:
            continue
        code, span = _find_subject(cs)
        out.append(Candidate(s, t.sentence_text(s), hits, code, span))
    return out


def extract_quotes(t: TokenizedText, lex: WordClassLexicon) -> list[Candidate]:
    """Sentences matching at least one word-class pattern."""
    return _match_sentences(t, lex, load_patterns())


def quote_mark_baseline(t: TokenizedText, lex: WordClassLexicon) -> list[Candidate]:
    """Only the quoted-span pattern; by construction a subset of
    extract_quotes."""
    patterns = tuple(p for p in load_patterns() if p.name == "P1")
    return _match_sentences(t, lex, patterns)


def _acronym_initials(name: str) -> str:
    words = [w for w in name.split() if w.lower() not in _INITIAL_SKIP]
    return "".join(w[0].upper() for w in words if w)


def _clean_org(name: str) -> str:
    # a leading article is part of the capitalized run but not the name
    return name[4:] if name.startswith("The ") and len(name) > 4 else name


def _is_acronym(name: str) -> bool:
    return name.isalpha() and name.isupper() and 2 <= len(name) <= 6


@dataclass
class NameIndex:
    """Corpus-wide name statistics for attribution, built once then
    read-only."""
    person_counts: Counter = field(default_factory=Counter)
    person_first: dict = field(default_factory=dict)
    org_counts: Counter = field(default_factory=Counter)
    org_first: dict = field(default_factory=dict)
    acronym_comentions: dict = field(default_factory=dict)

    @classmethod
    def build(cls, docs: list[tuple[str, TokenizedText]]) -> "NameIndex":
        idx = cls()
        seq = 0
        for _, t in docs:
            spans = entity_spans(t)
            for a, b in spans.persons:
                name = t.text[t.offsets[a][0]:t.offsets[b - 1][1]]
                if len(name.split()) >= 2:
                    idx.person_counts[name] += 1
                    idx.person_first.setdefault(name, seq)
                seq += 1
            for a, b in spans.organizations:
                name = _clean_org(t.text[t.offsets[a][0]:t.offsets[b - 1][1]])
                if len(name.split()) >= 2:
                    idx.org_counts[name] += 1
                    idx.org_first.setdefault(name, seq)
                seq += 1
            for s in range(len(t.sentences)):
                stext = t.sentence_text(s)
                toks = t.sentence_tokens(s)
                acronyms = {tok.surface for tok in toks
                            if _is_acronym(tok.surface)}
                if not acronyms:
                    continue
                for name in idx.org_counts:
                    if name in stext:
                        for acr in acronyms:
                            if _acronym_initials(name) == acr:
                                idx.acronym_comentions.setdefault(
                                    acr, Counter())[name] += 1
        return idx

    def resolve_person(self, partial: str) -> str | None:
        hits = [(name, cnt) for name, cnt in self.person_counts.items()
                if partial in name.split()]
        if not hits:
            return None
        hits.sort(key=lambda x: (-x[1], self.person_first[x[0]]))
        return hits[0][0]

    def resolve_acronym(self, acronym: str) -> str | None:
        mentions = self.acronym_comentions.get(acronym)
        if mentions:
            ranked = sorted(mentions.items(),
                            key=lambda x: (-x[1], self.org_first[x[0]]))
            return ranked[0][0]
        hits = [name for name in self.org_counts
                if _acronym_initials(name) == acronym]
        if not hits:
            return None
        hits.sort(key=lambda n: (-self.org_counts[n], self.org_first[n]))
        return hits[0]


@dataclass
class Quote:
    article_id: str
    sentence_index: int
    text: str
    kind: str
    quotee: str | None = None
    affiliation: str | None = None
    unresolved: bool = False


def _full_person_in_article(partial: str, ents: EntitySet) -> str | None:
    hits = sorted(name for name in ents.persons
                  if len(name.split()) >= 2 and partial in name.split())
    return hits[0] if hits else None


def _affiliation_for(person: str, t: TokenizedText,
                     sentence_entities: list[EntitySet]) -> str | None:
    surname = person.split()[-1]
    counts: Counter = Counter()
    first: dict[str, int] = {}
    for s, ents in enumerate(sentence_entities):
        toks = t.sentence_tokens(s)
        if not any(tok.surface == surname for tok in toks):
            continue
        for org in ents.organizations:
            org = _clean_org(org)
            counts[org] += 1
            first.setdefault(org, s)
    if not counts:
        return None
    ranked = sorted(counts.items(), key=lambda x: (-x[1], first[x[0]], x[0]))
    return ranked[0][0]


def attribute(candidates: list[Candidate], article_id: str,
              t: TokenizedText, index: NameIndex) -> list[Quote]:
    """Resolve each candidate to a quotee.

    Partial person names are completed from the article first, then from
    the corpus index; acronyms expand to initial-matching organization
    names.  Nothing is ever synthesized: every resolved string occurs in
    the article or the corpus.
    """
    ents = extract_entities(t)
    sent_ents = [extract_entities(sentence_view(t, s))
                 for s in range(len(t.sentences))]
    out = []
    for cand in candidates:
        a, b = cand.subject_span
        surface = t.text[t.offsets[a][0]:t.offsets[b - 1][1]] if b > a else ""
        if cand.subject_code == "P":
            name = surface
            unresolved = False
            if len(name.split()) < 2:
                full = _full_person_in_article(name, ents)
                if full is None:
                    full = index.resolve_person(name)
                if full is None:
                    unresolved = True
                else:
                    name = full
            affiliation = _affiliation_for(name, t, sent_ents)
            out.append(Quote(article_id, cand.sentence_index, cand.text,
                             QUOTE_KIND_PERSON, name, affiliation,
                             unresolved))
        elif cand.subject_code == "O":
            name = _clean_org(surface)
            unresolved = False
            if _is_acronym(name):
                full = None
                article_hits = sorted(
                    _clean_org(o) for o in ents.organizations
                    if len(o.split()) >= 2 and _acronym_initials(o) == name)
                if len(article_hits) == 1:
                    full = article_hits[0]
                if full is None:
                    full = index.resolve_acronym(name)
                if full is None:
                    unresolved = True
                else:
                    name = full
            out.append(Quote(article_id, cand.sentence_index, cand.text,
                             QUOTE_KIND_ORG, name, None, unresolved))
        elif cand.subject_code == "S":
            out.append(Quote(article_id, cand.sentence_index, cand.text,
                             QUOTE_KIND_UNNAMED_STUDY))
        else:
            # scientist nouns, pronouns, and subjectless quote spans all
            # come out as unnamed-person attributions
            out.append(Quote(article_id, cand.sentence_index, cand.text,
                             QUOTE_KIND_UNNAMED_SCIENTIST))
    return out


def scientific_mentions(t: TokenizedText, allowlist, lex: WordClassLexicon) -> int:
    """Sentences naming an allowlisted institution or a science-flavored
    organization, plus study-subject quote sentences; one hit per
    sentence."""
    hits: set[int] = set()
    domains = sorted(getattr(allowlist, "science_domains", allowlist))
    # match either the raw domain or the name its first label spells out,
    # e.g. example-university.edu -> "example university"
    pats = []
    for d in domains:
        pats.append(re.escape(d))
        name = d.split(".")[0].replace("-", " ")
        if len(name) >= 4:
            pats.append(r"\b" + re.escape(name) + r"\b")
    dom_re = re.compile("|".join(pats)) if pats else None
    for s in range(len(t.sentences)):
        stext = t.sentence_text(s).lower()
        if dom_re is not None and dom_re.search(stext):
            hits.add(s)
            continue
        ents = extract_entities(sentence_view(t, s))
        for org in ents.organizations:
            words = {w.lower() for w in org.split()}
            if words & _SCIENCE_ORG_WORDS:
                hits.add(s)
                break
        else:
            toks = t.sentence_tokens(s)
            for i, tok in enumerate(toks):
                if tok.lower not in _SCIENCE_ORG_WORDS or not tok.surface[0].isupper():
                    continue
                prev_t = toks[i - 1].surface if i > 0 else ""
                j = i + 1
                while j < len(toks) and toks[j].lower in _INITIAL_SKIP:
                    j += 1
                next_t = toks[j].surface if j < len(toks) else ""
                if (prev_t[:1].isalpha() and prev_t[:1].isupper()) or \
                        (next_t[:1].isalpha() and next_t[:1].isupper()):
                    hits.add(s)
                    break
    for cand in extract_quotes(t, lex):
        if cand.subject_code == "S":
            hits.add(cand.sentence_index)
    return len(hits)


@dataclass
class QuoteStats:
    total_quotes: int
    person_quotes: int
    scientific_mentions: int
    weasel_quotes: int


def quote_stats(t: TokenizedText, article_id: str, index: NameIndex,
                allowlist, lex: WordClassLexicon) -> QuoteStats:
    quotes = attribute(extract_quotes(t, lex), article_id, t, index)
    person = sum(1 for q in quotes if q.kind == QUOTE_KIND_PERSON)
    weasel = sum(1 for q in quotes if q.kind in
                 (QUOTE_KIND_UNNAMED_SCIENTIST, QUOTE_KIND_UNNAMED_STUDY))
    return QuoteStats(len(quotes), person,
                      scientific_mentions(t, allowlist, lex), weasel)
