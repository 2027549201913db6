from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scigauge import textkit
from scigauge.textkit import (
    EmbeddingTable,
    analyze,
    clickbait_score,
    cosine,
    count_syllables,
    doc_vector,
    extract_entities,
    flesch_reading_ease,
    load_embeddings,
    sentiment,
    train_headline_model,
)


class TestAnalyze:
    def test_empty_text(self):
        t = analyze("")
        assert t.tokens == [] and t.sentences == [] and t.paragraphs == []

    def test_abbreviation_does_not_split(self):
        t = analyze("Dr. Smith spoke. He left.")
        assert len(t.sentences) == 2

    def test_single_letter_initial_does_not_split(self):
        t = analyze("J. Smith found it. Others agreed.")
        assert len(t.sentences) == 2

    def test_ing_suffix_rule(self):
        t = analyze("running")
        assert t.tokens[0].pos == "VERB"

    def test_lexicon_beats_suffix(self):
        t = analyze("the")
        assert t.tokens[0].pos == "DET"

    def test_closed_tagset(self):
        t = analyze("Dr. Jane found 12% of WHO data on 2024-01-15, xylqz!")
        assert all(tok.pos in textkit.POS_TAGS for tok in t.tokens)

    def test_unknown_word_is_other(self):
        assert analyze("xylqz").tokens[0].pos == "OTHER"

    def test_paragraph_segmentation(self):
        t = analyze("First line here.\n\nSecond block. Two sentences.")
        assert len(t.paragraphs) == 2
        assert len(t.sentences) == 3

    def test_ranges_partition_tokens(self):
        t = analyze("One two. Three!\n\nFour? Five six seven.")
        assert t.sentences[0][0] == 0
        for a, b in zip(t.sentences, t.sentences[1:]):
            assert a[1] == b[0]
        assert t.sentences[-1][1] == len(t.tokens)
        assert t.paragraphs[0][0] == 0
        for a, b in zip(t.paragraphs, t.paragraphs[1:]):
            assert a[1] == b[0]
        assert t.paragraphs[-1][1] == len(t.sentences)

    def test_quote_after_terminal_stays_in_sentence(self):
        t = analyze('"It works." He smiled.')
        assert len(t.sentences) == 2
        lo, hi = t.sentences[0]
        assert t.tokens[hi - 1].surface == '"'


class TestEntities:
    def test_reference_sentence(self):
        t = analyze("Dr. Jane Roe of Example University found a 12% rise in 2017.")
        e = extract_entities(t)
        assert e.persons == {"Jane Roe"}
        assert e.organizations == {"Example University"}
        assert e.percentages == {"12%"}
        assert e.dates == {"2017"}
        assert e.numbers == {"12"}

    def test_lowercase_text_only_numeric_sets(self):
        e = extract_entities(analyze("the study found a 3.5 point rise in 40 percent of cases"))
        assert e.persons == set() and e.organizations == set()
        assert e.numbers == {"3.5", "40"}
        assert e.percentages == {"40 percent"}

    def test_acronym_org(self):
        e = extract_entities(analyze("WHO announced"))
        assert e.organizations == {"WHO"}

    def test_gazetteer_person(self):
        e = extract_entities(analyze("Maria Garcia told reporters the plan."))
        assert "Maria Garcia" in e.persons

    def test_org_with_connector(self):
        e = extract_entities(analyze("Scientists at the University of Greenfield agreed."))
        assert "University of Greenfield" in e.organizations

    def test_month_day_year_date(self):
        e = extract_entities(analyze("Published on January 5, 2018 in the archive."))
        assert "January 5, 2018" in e.dates

    def test_iso_date(self):
        e = extract_entities(analyze("logged 2024-01-15 at noon"))
        assert "2024-01-15" in e.dates

    def test_year_not_in_numbers(self):
        e = extract_entities(analyze("in 2017 about 250 people"))
        assert e.dates == {"2017"}
        assert e.numbers == {"250"}

    def test_entities_verbatim(self):
        text = ("Dr. Emily Chen of the Coastal Research Institute said on "
                "March 3, 2019 that 45% of 1,200 samples matched. NASA agreed.")
        t = analyze(text)
        e = extract_entities(t)
        for group in (e.persons, e.organizations, e.dates, e.numbers, e.percentages):
            for s in group:
                assert s in text

    @given(st.lists(st.sampled_from(
        ["Dr.", "Sara", "Lindqvist", "of", "Harbor", "Institute", "found",
         "a", "12%", "rise", "in", "2017", ".", "WHO", "said", "so", ",",
         "January", "5", "the", "results", "were", "9.5", "percent"]),
        min_size=1, max_size=25))
    @settings(max_examples=60, deadline=None)
    def test_verbatim_property(self, words):
        text = " ".join(words)
        e = extract_entities(analyze(text))
        for group in (e.persons, e.organizations, e.dates, e.numbers, e.percentages):
            for s in group:
                assert s in text


class TestReadability:
    def test_hand_formula(self):
        score = flesch_reading_ease(analyze("The cat sat."))
        assert score == pytest.approx(206.835 - 1.015 * 3 - 84.6 * 1.0, abs=1e-9)

    def test_repeated_text_invariant(self):
        one = flesch_reading_ease(analyze("The cat sat on the mat."))
        two = flesch_reading_ease(analyze("The cat sat on the mat. The cat sat on the mat."))
        assert one == pytest.approx(two, abs=1e-9)

    def test_longer_words_lower_score(self):
        short = flesch_reading_ease(analyze("The cat sat."))
        long = flesch_reading_ease(analyze("The organization deliberated."))
        assert long < short

    def test_zero_words_error(self):
        with pytest.raises(ValueError):
            flesch_reading_ease(analyze(""))

    def test_syllables(self):
        assert count_syllables("cat") == 1
        assert count_syllables("table") == 2
        assert count_syllables("little") == 2
        assert count_syllables("home") == 1
        assert count_syllables("xyz") == 1
        assert count_syllables("deliberated") == 5


class TestSentiment:
    def test_only_positive(self):
        s = sentiment(analyze("a good great outcome"))
        assert s.polarity == 1.0

    def test_no_hits(self):
        s = sentiment(analyze("the table has four legs"))
        assert s.polarity == 0.0 and s.subjectivity == 0.0

    def test_hand_count(self):
        text = ("The results were good and the team felt great overall, while "
                "one part of the largest cohort in this trial was bad for the "
                "very strange early timeline.")
        t = analyze(text)
        assert len(t.tokens) == 30
        s = sentiment(t)
        assert s.polarity == pytest.approx(1 / 3, abs=1e-12)
        assert s.subjectivity == pytest.approx(0.1, abs=1e-12)

    def test_bounds(self):
        for text in ("awful bad good", "nothing here", "great!"):
            s = sentiment(analyze(text))
            assert -1.0 <= s.polarity <= 1.0
            assert 0.0 <= s.subjectivity <= 1.0


@pytest.fixture(scope="module")
def headline_model():
    return train_headline_model(n_trees=40, seed=9)


class TestClickbait:
    def test_training_clickbait_scores_high(self, headline_model):
        score = clickbait_score(
            "You Won't Believe What This Common Food Does To Your Brain",
            headline_model)
        assert score > 0.5

    def test_training_news_scores_low(self, headline_model):
        score = clickbait_score(
            "Randomized Trial Finds No Effect Of Vitamin D On Bone Density",
            headline_model)
        assert score < 0.5

    def test_empty_title_returns_prior(self, headline_model):
        assert clickbait_score("", headline_model) == headline_model.prior

    def test_out_of_vocabulary_returns_prior(self, headline_model):
        assert clickbait_score("zzxqy vvbnm", headline_model) == headline_model.prior

    def test_scores_bounded(self, headline_model):
        for title in ("Shocking Trick", "Cohort Study Results", "banana"):
            assert 0.0 <= clickbait_score(title, headline_model) <= 1.0

    def test_untrained_model_rejected(self):
        with pytest.raises(ValueError):
            clickbait_score("anything", None)


@pytest.fixture()
def table(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("alpha 1.0 0.0 0.0\nbeta 0.0 1.0 0.0\ngamma 0.0 0.0 2.0\n")
    return load_embeddings(path)


class TestEmbeddings:
    def test_single_word_doc(self, table):
        vec = doc_vector(analyze("alpha"), table)
        assert np.allclose(vec, [1.0, 0.0, 0.0])

    def test_out_of_vocab_doc(self, table):
        assert np.allclose(doc_vector(analyze("delta epsilon"), table), 0.0)

    def test_two_word_mean(self, table):
        vec = doc_vector(analyze("alpha beta"), table)
        assert np.allclose(vec, [0.5, 0.5, 0.0])

    def test_case_folded_lookup(self, table):
        assert np.allclose(doc_vector(analyze("ALPHA"), table), [1.0, 0.0, 0.0])

    def test_inconsistent_dimension_fatal(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("alpha 1.0 2.0\nbeta 1.0\n")
        with pytest.raises(ValueError):
            load_embeddings(path)

    def test_self_cosine_is_one(self, table):
        vec = doc_vector(analyze("alpha gamma"), table)
        assert cosine(vec, vec) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector_cosine(self):
        assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0
        assert cosine([0.0, 0.0], [0.0, 0.0]) == 0.0
