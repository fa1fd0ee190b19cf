from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vizguide.charts import Agg, ChartSpec, Encoding, Filter, Mark
from vizguide.metrics import (
    correlate_tuples,
    distribution_sigma,
    distribution_tuples,
    group_sigma,
    group_tuples,
    metrics_for,
    normalized_group_sigma,
    pearson_r,
    quartile_filter_ranges,
    quartiles,
    ranked,
    top_n_categories,
    trend_tuples,
)
from vizguide.profiling import Kind

from .conftest import make_dataset
from .oracles import (
    oracle_distribution_sigma,
    oracle_normalized_group_sigma,
    oracle_pearson,
    oracle_quartiles,
    oracle_rank_order,
    oracle_sigma,
    oracle_top_n,
)

# Frozen from the committed fixtures; regenerate scripts/gen_fixtures.py
# and these together or not at all.
MOVIES_IMDB_RT_R = 0.8296726144428057
MOVIES_TOP_GROSS_GENRES = ["Adventure", "Action", "Musical"]


class TestPearson:
    def test_perfect_line(self):
        d = make_dataset(["a", "b"], [[1, 2], [2, 4], [3, 6]])
        assert pearson_r(d, "a", "b") == pytest.approx(1.0)

    def test_sign(self):
        d = make_dataset(["a", "b"], [[1, 6], [2, 4], [3, 2]])
        assert pearson_r(d, "a", "b") == pytest.approx(-1.0)

    def test_zero_variance_is_none_not_nan(self):
        d = make_dataset(["a", "b"], [[1, 5], [2, 5], [3, 5]])
        assert pearson_r(d, "a", "b") is None

    def test_fewer_than_two_complete_pairs_is_none(self):
        d = make_dataset(["a", "b"], [[1, None], [None, 2], [3, 4]])
        assert pearson_r(d, "a", "b") is None

    def test_pairwise_complete_matches_oracle(self, movies):
        xs = movies.column("IMDB Rating")
        ys = movies.column("Rotten Tomatoes Rating")
        assert pearson_r(movies, "IMDB Rating", "Rotten Tomatoes Rating") == pytest.approx(
            oracle_pearson(xs, ys), abs=1e-12
        )

    def test_frozen_fixture_value(self, movies):
        r = pearson_r(movies, "IMDB Rating", "Rotten Tomatoes Rating")
        assert r == pytest.approx(MOVIES_IMDB_RT_R, abs=1e-12)

    def test_all_fixture_pairs_match_oracle(self, movies, colleges):
        for d in (movies, colleges):
            quant = [a.name for a in d.by_kind(Kind.QUANTITATIVE)]
            for i, a in enumerate(quant):
                for b in quant[i + 1 :]:
                    mine = pearson_r(d, a, b)
                    ref = oracle_pearson(d.column(a), d.column(b))
                    assert mine == pytest.approx(ref, abs=1e-12), (a, b)

    @given(
        st.lists(
            st.tuples(
                st.floats(-1e6, 1e6, allow_nan=False),
                st.floats(-1e6, 1e6, allow_nan=False),
            ),
            min_size=2,
            max_size=50,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_symmetric_and_bounded(self, pairs):
        d = make_dataset(["a", "b"], [[x, y] for x, y in pairs])
        ab = pearson_r(d, "a", "b")
        ba = pearson_r(d, "b", "a")
        if ab is None:
            assert ba is None
        else:
            assert ab == pytest.approx(ba, abs=1e-12)
            assert abs(ab) <= 1.0 + 1e-12


class TestGroupSigma:
    def test_identical_groups_have_zero_sigma(self):
        d = make_dataset(["g", "v"], [["A", 2], ["A", 2], ["B", 2], ["B", 2]])
        assert group_sigma(d, "g", "v") == 0.0

    def test_two_point_example(self):
        d = make_dataset(["g", "v"], [["A", 0], ["B", 4]])
        assert group_sigma(d, "g", "v") == pytest.approx(2.0)

    def test_single_group_is_zero_signal(self):
        d = make_dataset(["g", "v"], [["A", 1], ["A", 9]])
        assert group_sigma(d, "g", "v") is None

    def test_null_measure_cells_ignored(self):
        d = make_dataset(["g", "v"], [["A", 0], ["A", None], ["B", 4]])
        assert group_sigma(d, "g", "v") == pytest.approx(2.0)

    def test_sigma_never_negative_and_zero_iff_constant(self, tiny):
        sigma = group_sigma(tiny, "Group", "Score")
        assert sigma is not None and sigma >= 0.0

    def test_matches_oracle_on_fixture(self, movies):
        mine = normalized_group_sigma(movies, "Major Genre", "Worldwide Gross")
        ref = oracle_normalized_group_sigma(movies.rows, "Major Genre", "Worldwide Gross")
        assert mine == pytest.approx(ref, abs=1e-12)

    def test_constant_measure_normalizes_to_none(self):
        d = make_dataset(["g", "v"], [["A", 5], ["B", 5], ["C", 5]])
        assert normalized_group_sigma(d, "g", "v") is None

    @given(
        st.lists(
            st.tuples(st.sampled_from("ABCD"), st.floats(-100, 100, allow_nan=False)),
            min_size=2,
            max_size=40,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_group_sigma_matches_stdlib(self, cells):
        d = make_dataset(["g", "v"], [[g, v] for g, v in cells])
        mine = group_sigma(d, "g", "v")
        groups: dict = {}
        for g, v in cells:
            groups.setdefault(g, []).append(v)
        means = [sum(vs) / len(vs) for vs in groups.values()]
        if len(means) < 2:
            assert mine is None
        else:
            assert mine == pytest.approx(oracle_sigma(means), abs=1e-9)


class TestDistributionSigma:
    def test_even_counts_are_zero(self):
        d = make_dataset(["g"], [["A"], ["B"], ["C"], ["A"], ["B"], ["C"]])
        assert distribution_sigma(d, "g") == 0.0

    def test_two_group_example(self):
        # counts 8 and 0 never arise for categoricals (observed groups
        # only), so check the numeric path where empty bins do count
        d = make_dataset(["v"], [[0.01 * i] for i in range(8)])
        sigma = distribution_sigma(d, "v")
        ref = oracle_distribution_sigma(d.rows, "v", "quantitative")
        assert sigma == pytest.approx(ref)

    def test_single_group_is_zero_signal(self):
        d = make_dataset(["g"], [["A"], ["A"]])
        assert distribution_sigma(d, "g") is None

    def test_constant_quantitative_is_zero_signal(self):
        d = make_dataset(["v"], [[5], [5], [5]])
        assert distribution_sigma(d, "v") is None

    def test_fixture_attributes_match_oracle(self, movies):
        for a in movies.attributes:
            mine = distribution_sigma(movies, a.name)
            ref = oracle_distribution_sigma(
                movies.rows, a.name, a.kind.value if a.kind is Kind.QUANTITATIVE else "other"
            )
            if mine is None:
                assert ref is None
            else:
                assert mine == pytest.approx(ref, abs=1e-9), a.name


class TestQuartiles:
    def test_one_to_eight(self):
        q1, q2, q3 = quartiles([1, 2, 3, 4, 5, 6, 7, 8])
        assert (q1, q2, q3) == (2.75, 4.5, 6.25)

    @given(st.lists(st.floats(-1e4, 1e4, allow_nan=False), min_size=4, max_size=60))
    @settings(max_examples=200, deadline=None)
    def test_matches_stdlib_inclusive(self, values):
        mine = quartiles(values)
        ref = oracle_quartiles(values)
        for m, r in zip(mine, ref):
            assert m == pytest.approx(r, abs=1e-9)

    def test_bands_partition_range(self):
        d = make_dataset(["v"], [[v] for v in [1, 2, 3, 4, 5, 6, 7, 8]])
        bands = quartile_filter_ranges(d, "v")
        assert [b.label for b in bands] == ["low", "lower middle", "upper middle", "high"]
        assert bands[0].low == 1 and bands[-1].high == 8
        assert bands[-1].low == 6.25 and bands[-1].low_open
        # each value falls in exactly one band
        for v in [1, 2, 3, 4, 5, 6, 7, 8]:
            hits = [
                b
                for b in bands
                if (v > b.low if b.low_open else v >= b.low)
                and (v < b.high if b.high_open else v <= b.high)
            ]
            assert len(hits) == 1, v

    def test_degenerate_quartiles_fall_back_to_single_band(self):
        d = make_dataset(["v"], [[5], [5], [5], [5], [9]])
        bands = quartile_filter_ranges(d, "v")
        assert len(bands) == 1 and bands[0].degenerate

    def test_too_few_values_is_an_error(self):
        d = make_dataset(["v"], [[1], [2], [3]])
        with pytest.raises(ValueError):
            quartile_filter_ranges(d, "v")


class TestTopN:
    def test_movies_mean_gross_by_genre(self, movies):
        chart = ChartSpec(
            mark=Mark.BAR,
            x=Encoding("Major Genre"),
            y=Encoding("Worldwide Gross", Agg.MEAN),
        )
        assert top_n_categories(movies, chart, 3) == MOVIES_TOP_GROSS_GENRES

    def test_matches_brute_force_with_ties(self):
        d = make_dataset(
            ["g", "v"],
            [["A", 1], ["B", 1], ["C", 5], ["D", 0], ["B", 1], ["A", 1]],
        )
        chart = ChartSpec(Mark.BAR, Encoding("g"), Encoding("v", Agg.MEAN))
        mine = top_n_categories(d, chart, 3)
        ref = oracle_top_n(
            d.rows,
            "g",
            lambda rows: sum(r["v"] for r in rows) / len(rows),
            d.attribute("g").value_list(),
            3,
        )
        assert mine == ref == ["C", "A", "B"]

    def test_n_larger_than_cardinality_returns_all(self, movies):
        chart = ChartSpec(Mark.BAR, Encoding("Content Rating"), Encoding(None, Agg.COUNT))
        got = top_n_categories(movies, chart, 99)
        assert set(got) == {"G", "PG", "PG-13", "R"}

    def test_counts_used_for_count_charts(self, colleges):
        chart = ChartSpec(Mark.BAR, Encoding("Region"), Encoding(None, Agg.COUNT))
        mine = top_n_categories(colleges, chart, 2)
        ref = oracle_top_n(
            colleges.rows,
            "Region",
            lambda rows: float(len(rows)),
            colleges.attribute("Region").value_list(),
            2,
        )
        assert mine == ref

    def test_respects_chart_filters(self, movies):
        chart = ChartSpec(
            mark=Mark.BAR,
            x=Encoding("Major Genre"),
            y=Encoding("Worldwide Gross", Agg.MEAN),
            filters=(Filter("Content Rating", "values", values=("G",)),),
        )
        only_g = [r for r in movies.rows if r["Content Rating"] == "G"]
        ref = oracle_top_n(
            only_g,
            "Major Genre",
            lambda rows: sum(r["Worldwide Gross"] for r in rows) / len(rows),
            movies.attribute("Major Genre").value_list(),
            3,
        )
        assert top_n_categories(movies, chart, 3) == ref


class TestRanking:
    def test_competition_ranks_with_ties(self):
        stats = ranked(
            [(("a",), 3.0), (("b",), 5.0), (("c",), 3.0), (("d",), None)], "m"
        )
        by_name = {s.attributes[0]: s.rank for s in stats}
        assert by_name == {"b": 1, "a": 2, "c": 2, "d": 4}

    def test_rank_score_is_monotone(self):
        stats = ranked([(("a",), 3.0), (("b",), 5.0), (("c",), 1.0)], "m")
        scores = {s.attributes[0]: s.rank_score(3) for s in stats}
        assert scores["b"] > scores["a"] > scores["c"]

    def test_fixture_tables_match_oracle_ranks(self, movies, colleges):
        for d in (movies, colleges):
            for table in (
                correlate_tuples(d),
                group_tuples(d),
                trend_tuples(d),
                distribution_tuples(d),
            ):
                pairs = [(s.attributes, s.value) for s in table]
                ref = oracle_rank_order(pairs)
                for s in table:
                    assert s.rank == ref[s.attributes], s

    def test_movies_strongest_pair_is_the_ratings(self, movies):
        best = min(correlate_tuples(movies), key=lambda s: s.rank)
        assert best.attributes == ("IMDB Rating", "Rotten Tomatoes Rating")

    def test_colleges_has_no_trend_tuples(self, colleges):
        assert trend_tuples(colleges) == []

    def test_movies_group_signal_orders_gross_above_duration(self, movies):
        table = {s.attributes: s for s in group_tuples(movies)}
        gross = table[("Major Genre", "Worldwide Gross")]
        duration = table[("Major Genre", "Duration")]
        assert gross.rank < duration.rank

    def test_metrics_table_caches(self, movies):
        t = metrics_for(movies)
        assert t.correlate is t.correlate
        assert metrics_for(movies) is t
