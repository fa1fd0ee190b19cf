"""Parser behavior: entities, intents, filters, diagnostics, follow-ups."""

from __future__ import annotations

import pytest

from vizguide import load_fixture
from vizguide.charts import Agg
from vizguide.lexicon import build_lexicon
from vizguide.parsing import (
    EXPLICIT_CONFIDENCE,
    IMPLICIT_CONFIDENCE,
    classify_filter,
    detect_extremum,
    parse,
)


@pytest.fixture(scope="module")
def lex():
    return build_lexicon(load_fixture("movies"))


@pytest.fixture(scope="module")
def college_lex():
    return build_lexicon(load_fixture("colleges"))


class Center:
    """Stand-in for a conversational center: just an attribute set."""

    def __init__(self, *attributes):
        self.attributes = attributes


TREND_CENTER = Center("Worldwide Gross", "Release Year", "Content Rating")


def intents_of(parsed):
    return sorted(m.intent for m in parsed.intents)


class TestIntents:
    def test_explicit_trend(self, lex):
        p = parse("What is the trend of Worldwide Gross over the years?", lex)
        assert intents_of(p) == ["trend"]
        assert p.intents[0].explicit
        assert p.intents[0].confidence == EXPLICIT_CONFIDENCE
        assert not p.is_followup
        assert not p.diagnostics

    def test_implicit_trend_via_change_words(self, lex):
        p = parse("Plot changes in Worldwide Gross over time", lex)
        assert intents_of(p) == ["trend"]
        assert not p.intents[0].explicit
        assert p.intents[0].confidence == IMPLICIT_CONFIDENCE

    def test_over_time_resolves_single_temporal(self, lex):
        p = parse("Plot changes in Worldwide Gross over time", lex)
        names = [e.attribute for e in p.entities]
        assert "Release Year" in names
        assert not p.is_followup  # complete on its own

    def test_vary_with_is_correlation(self, lex):
        p = parse("How does IMDB Rating vary with Production Budget?", lex)
        assert intents_of(p) == ["correlation"]

    def test_vary_over_is_trend(self, lex):
        p = parse("How does Worldwide Gross vary over the years?", lex)
        assert "trend" in intents_of(p)
        assert "correlation" not in intents_of(p)

    def test_two_bare_measures_read_as_correlation(self, lex):
        p = parse("How about IMDB Rating and Rotten Tomatoes Rating?", lex,
                  center=TREND_CENTER)
        assert intents_of(p) == ["correlation"]
        assert not p.intents[0].explicit
        assert p.is_followup  # marker present

    def test_explicit_group_via_compare(self, lex):
        p = parse("Compare across Content Ratings", lex, center=TREND_CENTER)
        assert intents_of(p) == ["group"]
        assert p.intents[0].explicit
        assert p.is_followup

    def test_group_construction_with_aggregation(self, lex):
        p = parse("Show average Worldwide Gross by Major Genre", lex)
        assert intents_of(p) == ["group"]
        assert p.intents[0].explicit
        assert p.aggregation is Agg.MEAN
        assert not p.is_followup
        assert not p.diagnostics

    def test_count_question_is_distribution(self, lex):
        p = parse("How many items exist for each Creative Type?", lex)
        assert intents_of(p) == ["distribution"]
        assert p.intents[0].explicit
        assert p.aggregation is Agg.COUNT
        assert "group" not in intents_of(p)

    def test_count_verb_is_distribution(self, lex):
        p = parse("Count items by Major Genre", lex)
        assert intents_of(p) == ["distribution"]
        assert "group" not in intents_of(p)

    def test_combined_trend_group(self, lex):
        p = parse(
            "How has the Worldwide Gross changed over the years "
            "for each Content Rating?",
            lex,
        )
        assert intents_of(p) == ["group", "trend"]
        assert not p.diagnostics

    def test_combined_correlation_group(self, lex):
        p = parse(
            "Show the relationship between Worldwide Gross and "
            "Production Budget by Major Genres",
            lex,
        )
        assert intents_of(p) == ["correlation", "group"]
        assert not p.diagnostics

    def test_aggregation_change(self, lex):
        p = parse("Show the average values instead", lex, center=TREND_CENTER)
        assert intents_of(p) == ["aggregation"]
        assert p.aggregation is Agg.MEAN
        assert p.is_followup

    def test_explicit_beats_implicit_confidence(self, lex):
        explicit = parse("What is the trend of Worldwide Gross over the years?", lex)
        implicit = parse("Plot changes in Worldwide Gross over time", lex)
        assert min(m.confidence for m in explicit.intents) > max(
            m.confidence for m in implicit.intents
        )


class TestEntities:
    def test_full_names_never_partially_matched(self, lex):
        p = parse("Compare Rotten Tomatoes Rating and IMDB Rating", lex)
        spans = [(e.start, e.end) for e in p.entities]
        # no overlaps
        for a, b in zip(spans, spans[1:]):
            assert a[1] <= b[0]
        assert [e.attribute for e in p.entities] == [
            "Rotten Tomatoes Rating", "IMDB Rating",
        ]

    def test_plural_variants_match(self, lex):
        p = parse("Compare average Worldwide Gross across Major Genres", lex)
        assert [e.attribute for e in p.entities] == [
            "Worldwide Gross", "Major Genre",
        ]

    def test_word_synonym_matches_with_lower_confidence(self, lex):
        p = parse("Show highest grossing genres", lex)
        by_name = {e.attribute: e for e in p.entities}
        assert by_name["Worldwide Gross"].confidence < 1.0
        assert by_name["Major Genre"].confidence < 1.0

    def test_ambiguous_word_resolved_by_role(self, lex):
        p = parse("show me the average rating by genre", lex)
        assert p.entities[0].attribute == "IMDB Rating"
        assert p.has_diagnostic("ambiguous_reference")
        assert set(p.entities[0].candidates) == {
            "Content Rating", "IMDB Rating", "Rotten Tomatoes Rating",
        }

    def test_ambiguous_word_prefers_interaction_scores(self, lex):
        p = parse(
            "show me the average rating by genre",
            lex,
            attribute_scores={"Rotten Tomatoes Rating": 2.0},
        )
        assert p.entities[0].attribute == "Rotten Tomatoes Rating"

    def test_unhinted_ambiguity_falls_back_to_column_order(self, lex):
        p = parse("rating", lex)
        assert p.entities[0].attribute == "Content Rating"

    def test_value_mention(self, lex):
        p = parse("Drill down into PG-13", lex, center=TREND_CENTER)
        assert p.entities[0].kind == "value"
        assert p.entities[0].value == "PG-13"
        assert p.entities[0].attribute == "Content Rating"


class TestFilters:
    def test_value_filter(self, lex):
        p = parse("Just show Adventure, Action and Musical", lex,
                  center=TREND_CENTER)
        assert len(p.filters) == 1
        f = p.filters[0]
        assert f.kind == "values"
        assert f.attribute == "Major Genre"
        assert f.values == ("Adventure", "Action", "Musical")
        assert intents_of(p) == ["filter"]
        assert p.intents[0].explicit

    def test_bare_value_is_implicit_filter(self, lex):
        p = parse("Action movies", lex, center=TREND_CENTER)
        assert intents_of(p) == ["filter"]
        assert not p.intents[0].explicit
        assert p.intents[0].confidence == IMPLICIT_CONFIDENCE

    def test_after_year(self, lex):
        p = parse("movies after 2000", lex, center=TREND_CENTER)
        f = p.filters[0]
        assert f.kind == "range"
        assert f.attribute == "Release Year"
        assert (f.low, f.low_open, f.high) == (2000, True, None)
        assert f.temporal

    def test_before_year(self, lex):
        f = parse("before 1990", lex, center=TREND_CENTER).filters[0]
        assert (f.low, f.high, f.high_open) == (None, 1990, True)

    def test_in_year_is_equality(self, lex):
        f = parse("movies in 2002", lex, center=TREND_CENTER).filters[0]
        assert f.kind == "values"
        assert f.values == (2002,)

    def test_between_years(self, lex):
        f = parse("Focus on the spike between 1996 and 1999", lex,
                  center=TREND_CENTER).filters[0]
        assert (f.low, f.high) == (1996, 1999)
        assert f.temporal
        assert not f.low_open and not f.high_open

    def test_numeric_comparator_binds_nearest_measure(self, lex):
        f = parse("IMDB Rating above 7.5", lex, center=TREND_CENTER).filters[0]
        assert f.attribute == "IMDB Rating"
        assert (f.low, f.low_open) == (7.5, True)
        assert not f.temporal

    def test_comparator_without_measure_defers_attribute(self, lex):
        p = parse("only show values under 100", lex, center=TREND_CENTER)
        f = p.filters[0]
        assert f.attribute is None
        assert (f.high, f.high_open) == (100, True)
        # nothing names the field being compared, so the parse flags it
        assert p.has_diagnostic("underspecified")

    def test_band_filter_uses_quartiles(self, lex, movies):
        f = parse("Focus on high Production Budget", lex,
                  center=TREND_CENTER).filters[0]
        column = sorted(
            v for v in movies.column("Production Budget") if v is not None
        )
        assert f.label == "high"
        assert f.low_open and not f.high_open
        assert f.high == column[-1]
        assert column[0] < f.low < column[-1]

    def test_low_band(self, lex):
        f = parse("Focus on low Worldwide Gross", lex,
                  center=TREND_CENTER).filters[0]
        assert f.label == "low"
        assert not f.low_open

    def test_top_n(self, lex):
        p = parse("Just show the top 3 groups", lex, center=TREND_CENTER)
        assert p.top_n == 3
        assert intents_of(p) == ["filter"]

    def test_classify_filter_helper(self, lex):
        out = classify_filter("Just show the top 5 groups", lex)
        assert [f.kind for f in out] == ["top_n"]
        assert out[0].n == 5

    def test_no_year_filters_without_temporal_attribute(self, college_lex):
        p = parse("colleges after 2000", college_lex)
        assert p.filters == []


class TestExtremum:
    def test_extremum_with_dimension(self, lex):
        p = parse("Show highest grossing genres", lex)
        assert p.extremum == "highest"
        assert intents_of(p) == ["group"]
        assert not p.is_followup

    def test_detect_extremum_helper(self, lex):
        assert detect_extremum("Show highest grossing genres", lex) == (
            "highest", "Worldwide Gross",
        )
        assert detect_extremum("lowest Production Budget", lex) == (
            "lowest", "Production Budget",
        )
        assert detect_extremum("Show average Worldwide Gross", lex) is None

    def test_extremum_without_dimension_is_computation(self, lex):
        p = parse("What is the highest Worldwide Gross?", lex, center=TREND_CENTER)
        assert p.extremum == "highest"
        assert p.calculation == "max"
        assert intents_of(p) == ["aggregation"]

    def test_bare_extremum_reorders_the_view(self, lex):
        p = parse("Show the highest", lex, center=TREND_CENTER)
        assert p.extremum == "highest"
        assert p.calculation is None
        assert intents_of(p) == ["filter"]
        assert p.is_followup
        assert not p.diagnostics

    def test_bare_extremum_without_center_is_underspecified(self, lex):
        p = parse("Show the highest", lex)
        assert p.extremum == "highest"
        assert p.has_diagnostic("underspecified")
        assert not p.is_followup


class TestDeictics:
    def test_correlation_over_selection(self, lex):
        p = parse("What is the correlation between these points?", lex,
                  center=TREND_CENTER)
        assert p.calculation == "correlation"
        assert p.referentials == ["these"]
        assert p.is_followup

    def test_difference(self, lex):
        p = parse("What is the difference between these points?", lex,
                  center=TREND_CENTER)
        assert p.calculation == "difference"
        assert intents_of(p) == ["aggregation"]

    def test_total_of_values(self, lex):
        p = parse("How about the total of values?", lex, center=TREND_CENTER)
        assert p.calculation == "sum"
        assert p.aggregation is Agg.SUM


class TestFollowupDetection:
    def test_marker_forces_followup(self, lex):
        p = parse("Now show changes in Production Budget instead", lex,
                  center=TREND_CENTER)
        assert p.markers == ["now", "instead"]
        assert p.is_followup
        assert intents_of(p) == ["trend"]
        assert not p.intents[0].explicit

    def test_incomplete_with_center_is_followup(self, lex):
        p = parse("Compare across Content Ratings", lex, center=TREND_CENTER)
        assert p.is_followup

    def test_incomplete_without_center_is_underspecified(self, lex):
        p = parse("Compare across Content Ratings", lex)
        assert not p.is_followup
        assert p.has_diagnostic("underspecified")

    def test_complete_without_marker_is_standalone(self, lex):
        p = parse("Show average Worldwide Gross by Major Genre", lex,
                  center=TREND_CENTER)
        assert not p.is_followup

    def test_bare_attribute_with_center_defers(self, lex):
        p = parse("What about Production Budget?", lex, center=TREND_CENTER)
        assert p.is_followup
        assert [e.attribute for e in p.entities] == ["Production Budget"]

    def test_bare_attribute_cold_is_distribution(self, lex):
        p = parse("Production Budget", lex)
        assert intents_of(p) == ["distribution"]
        assert not p.intents[0].explicit
        assert not p.is_followup


class TestDiagnostics:
    def test_underspecified_aggregation_defaults_to_mean(self, lex):
        p = parse("imdb ratings by genre", lex)
        assert p.has_diagnostic("underspecified")
        assert intents_of(p) == ["group"]
        # still usable: resolution will default the aggregate
        assert not p.is_followup

    def test_unsupported_utterance(self, lex):
        p = parse("Change blue bars to red", lex)
        assert p.has_diagnostic("unsupported")
        assert not p.intents and not p.entities

    def test_unsupported_even_mid_conversation(self, lex):
        p = parse("Change blue bars to red", lex, center=TREND_CENTER)
        assert p.has_diagnostic("unsupported")

    def test_greeting_is_unsupported(self, lex):
        assert parse("hello there", lex).has_diagnostic("unsupported")

    def test_to_dict_field_order_stable(self, lex):
        p = parse("Show average Worldwide Gross by Major Genre", lex)
        assert list(p.to_dict().keys()) == [
            "text", "intents", "entities", "aggregation", "extremum",
            "calculation", "top_n", "filters", "markers", "referentials",
            "is_followup", "diagnostics",
        ]


class TestTable2Vocabulary:
    """Every recommendation phrasing family must parse cleanly."""

    STANDALONE = [
        ("What is the trend of Worldwide Gross over the years?", ["trend"]),
        ("How does Worldwide Gross vary over Release Years?", ["trend"]),
        ("Plot changes in Worldwide Gross over time", ["trend"]),
        ("Show change in Worldwide Gross over time", ["trend"]),
        ("Show the change in Worldwide Gross over the years", ["trend"]),
        ("What is the average Worldwide Gross by Major Genre?", ["group"]),
        ("Compare average Worldwide Gross across Major Genres", ["group"]),
        ("On average, what is the Worldwide Gross for each Major Genre?", ["group"]),
        ("Show total Worldwide Gross by Major Genres", ["group"]),
        ("How does IMDB Rating vary with Rotten Tomatoes Rating?", ["correlation"]),
        ("How are IMDB Rating and Rotten Tomatoes Rating correlated?", ["correlation"]),
        ("Show the relationship between IMDB Rating and Rotten Tomatoes Rating",
         ["correlation"]),
        ("What is the correlation between IMDB Rating and Rotten Tomatoes Rating?",
         ["correlation"]),
        ("Plot IMDB Rating versus Rotten Tomatoes Rating", ["correlation"]),
        ("Show the spread of values for Content Rating", ["distribution"]),
        ("What is the distribution of values for Production Budget?", ["distribution"]),
        ("How many items exist for each Creative Type?", ["distribution"]),
        ("Count items by Major Genre", ["distribution"]),
        ("Show the count of items by Content Rating", ["distribution"]),
    ]

    FOLLOWUP = [
        ("Show the trend for Production Budget instead", ["trend"]),
        ("Compare across Content Ratings", ["group"]),
        ("Break down by Major Genre", ["group"]),
        ("Also compare across Creative Types", ["group"]),
        ("How about IMDB Rating and Production Budget?", ["correlation"]),
        ("Now how about IMDB Rating and Production Budget?", ["correlation"]),
        ("Just show Adventure, Action and Musical", ["filter"]),
        ("Only show Adventure and Action", ["filter"]),
        ("Just show the top 3 groups", ["filter"]),
        ("Drill down into PG-13", ["filter"]),
        ("Focus on high Production Budget", ["filter"]),
        ("Focus on the spike between 1996 and 1999", ["filter"]),
        ("Focus on the years between 1996 and 1999", ["filter"]),
        ("Show the average values instead", ["aggregation"]),
        ("How about the mean of values?", ["aggregation"]),
        ("Show the total Worldwide Gross instead", ["aggregation"]),
        ("What are the average values?", ["aggregation"]),
        ("What is the correlation between these points?", ["correlation"]),
        ("What is the total?", ["aggregation"]),
        ("What are the total values?", ["aggregation"]),
        ("What is the difference between these points?", ["aggregation"]),
    ]

    @pytest.mark.parametrize("text,intents", STANDALONE)
    def test_standalone_phrasings(self, lex, text, intents):
        p = parse(text, lex)
        assert intents_of(p) == intents, text
        assert not p.diagnostics, text
        assert not p.is_followup, text

    @pytest.mark.parametrize("text,intents", FOLLOWUP)
    def test_followup_phrasings(self, lex, text, intents):
        p = parse(text, lex, center=TREND_CENTER)
        assert intents_of(p) == intents, text
        assert not p.diagnostics, text
        assert p.is_followup, text
