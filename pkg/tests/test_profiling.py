from __future__ import annotations

import json

import pytest

from vizguide.profiling import (
    Dataset,
    IngestionError,
    Kind,
    equal_width_bins,
    infer_kind,
    load_dataset,
    load_fixture,
)

from .conftest import make_dataset


class TestInferKind:
    def test_plain_numbers_are_quantitative(self):
        assert infer_kind(["1", "2", "3"], "x") is Kind.QUANTITATIVE

    def test_four_digit_years_are_temporal(self):
        assert infer_kind(["2001", "2002", "1999"], "anything") is Kind.TEMPORAL

    def test_iso_dates_are_temporal(self):
        assert infer_kind(["2001-02-03", "2004-05-06"], "when") is Kind.TEMPORAL

    def test_date_header_promotes_numeric_column(self):
        assert infer_kind(["1", "2", "12"], "Month") is Kind.TEMPORAL

    def test_years_with_nulls_stay_temporal(self):
        assert infer_kind(["2001", "2002", "n/a"], "col") is Kind.TEMPORAL

    def test_strings_are_categorical(self):
        assert infer_kind(["red", "blue"], "color") is Kind.CATEGORICAL

    def test_mixed_numbers_and_strings_are_categorical(self):
        assert infer_kind(["1", "two"], "x") is Kind.CATEGORICAL

    def test_sat_scale_numbers_are_not_years(self):
        # plausible years only start at 1700, so test scores stay numeric
        assert infer_kind(["1510", "1220", "980"], "SAT Average") is Kind.QUANTITATIVE

    def test_all_null_is_categorical(self):
        assert infer_kind(["", "n/a", "NA"], "ghost") is Kind.CATEGORICAL


class TestLoadDataset:
    def test_empty_file_is_an_error(self):
        with pytest.raises(IngestionError, match="line 1"):
            load_dataset("", "empty")

    def test_header_only_is_an_error(self):
        with pytest.raises(IngestionError, match="no data rows"):
            load_dataset("a,b\n", "headers")

    def test_ragged_row_names_the_line(self):
        with pytest.raises(IngestionError, match="line 3"):
            load_dataset("a,b\n1,2\n1,2,3\n", "ragged")

    def test_duplicate_header_rejected(self):
        with pytest.raises(IngestionError, match="duplicate"):
            load_dataset("a,a\n1,2\n", "dupe")

    def test_all_null_column_profiles_with_warning(self):
        d = make_dataset(["x", "ghost"], [[1, None], [2, None]])
        ghost = d.attribute("ghost")
        assert ghost.all_null and ghost.cardinality == 0 and ghost.null_count == 2

    def test_null_rows_change_null_count_only(self):
        base = make_dataset(["g", "v"], [["a", 1], ["b", 2], ["a", 3]])
        extended = make_dataset(["g", "v"], [["a", 1], ["b", 2], ["a", 3], [None, None]])
        for name in ("g", "v"):
            before, after = base.attribute(name), extended.attribute(name)
            assert after.null_count == before.null_count + 1
            assert after.cardinality == before.cardinality
            assert after.values == before.values
            assert after.mean == before.mean
            assert after.stddev == before.stddev

    def test_loading_is_deterministic(self, movies):
        again = load_fixture("movies")
        assert json.dumps(movies.to_profile_dict(), sort_keys=True) == json.dumps(
            again.to_profile_dict(), sort_keys=True
        )
        assert movies.rows == again.rows

    def test_row_ids_are_positions(self, movies):
        assert movies.row_count == 700
        assert movies.rows[0]["Release Year"] == 2002


class TestFixtureProfiles:
    def test_movies_attribute_kinds(self, movies):
        kinds = {a.name: a.kind for a in movies.attributes}
        assert kinds["Release Year"] is Kind.TEMPORAL
        assert kinds["Major Genre"] is Kind.CATEGORICAL
        assert kinds["Creative Type"] is Kind.CATEGORICAL
        assert kinds["Content Rating"] is Kind.CATEGORICAL
        for q in (
            "Production Budget",
            "Worldwide Gross",
            "Duration",
            "IMDB Rating",
            "Rotten Tomatoes Rating",
        ):
            assert kinds[q] is Kind.QUANTITATIVE

    def test_movies_null_counts(self, movies):
        assert movies.attribute("Rotten Tomatoes Rating").null_count == 18
        assert movies.attribute("Duration").null_count == 6
        assert movies.attribute("Creative Type").null_count == 8

    def test_colleges_has_no_temporal(self, colleges):
        assert colleges.row_count == 500
        assert colleges.temporal_attribute() is None
        assert {a.name for a in colleges.by_kind(Kind.CATEGORICAL)} == {
            "Region",
            "Locale",
            "Control",
        }

    def test_profile_export_schema_fields(self, movies):
        profile = movies.to_profile_dict()
        assert profile["name"] == "movies"
        assert profile["row_count"] == 700
        for attr in profile["attributes"]:
            assert {"name", "kind", "cardinality", "null_count"} <= set(attr)
            if attr["kind"] == "quantitative":
                assert {"min", "max", "mean", "stddev"} <= set(attr["stats"])
            else:
                assert isinstance(attr["values"], list)


class TestBins:
    def test_counts_cover_all_values(self):
        values = [float(v) for v in range(100)]
        bins = equal_width_bins(values)
        assert len(bins) == 10
        assert sum(c for _, _, c in bins) == 100

    def test_maximum_lands_in_last_bin(self):
        bins = equal_width_bins([0.0, 10.0])
        assert bins[-1][2] == 1 and bins[0][2] == 1

    def test_constant_column_collapses_to_one_bin(self):
        assert equal_width_bins([5.0, 5.0, 5.0]) == [(5.0, 5.0, 3)]
