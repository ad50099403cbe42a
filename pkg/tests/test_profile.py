import json

import pytest

from askbook.errors import EmptyTable, InvalidModelOutput
from askbook.gateway import Gateway, SequenceProvider
from askbook.knowledge.profile import interpret_profile, profile_table


class TestProfileTable:
    def test_integer_column_stats(self):
        profile = profile_table({"n": [1, 2, 3]}, seed=1)
        col = profile.columns[0]
        assert col.inferred_type == "integer"
        assert (col.min, col.max) == (1, 3)
        assert col.distinct_count == 3
        assert col.null_count == 0
        assert profile.row_count == 3

    def test_all_null_column(self):
        profile = profile_table({"n": [None, None]}, seed=1)
        col = profile.columns[0]
        assert col.null_count == 2
        assert col.min is None and col.max is None
        assert col.samples == ()

    def test_mixed_numeric_strings_infer_float(self):
        profile = profile_table({"n": ["1", "2.5"]}, seed=1)
        assert profile.columns[0].inferred_type == "float"
        assert profile.columns[0].min == 1.0
        assert profile.columns[0].max == 2.5

    def test_type_inference_table(self, data_dir):
        cases = json.loads((data_dir / "profile_types.json").read_text())
        for case in cases:
            profile = profile_table({"c": case["values"]}, seed=0)
            assert profile.columns[0].inferred_type == case["expected"], case

    def test_zero_columns_raises(self):
        with pytest.raises(EmptyTable):
            profile_table([], seed=0)

    def test_deterministic_given_seed(self):
        rows = [{"v": i % 7, "w": f"s{i % 13}"} for i in range(100)]
        assert profile_table(rows, seed=42) == profile_table(rows, seed=42)

    def test_samples_capped_at_ten_without_replacement(self):
        profile = profile_table({"v": list(range(100))}, seed=3)
        samples = profile.columns[0].samples
        assert len(samples) == 10
        assert len(set(samples)) == 10
        assert set(samples) <= set(range(100))

    def test_records_orientation_and_column_order(self):
        rows = [{"a": 1, "b": "x"}, {"b": "y", "c": 2.5}]
        profile = profile_table(rows, seed=0)
        assert [c.name for c in profile.columns] == ["a", "b", "c"]
        assert profile.columns[0].null_count == 1  # a missing in row 2


class TestInterpretProfile:
    def reply_for(self, names):
        return json.dumps({
            "table_description": "daily sales facts",
            "column_descriptions": {n: f"{n} semantic meaning" for n in names},
        })

    def test_single_column(self):
        profile = profile_table({"v": [1, 2]}, seed=0)
        gw = Gateway(SequenceProvider({"profile.interpret": [self.reply_for(["v"])]}))
        out = interpret_profile(profile, gw)
        assert out["table_description"]
        assert list(out["column_descriptions"]) == ["v"]

    def test_ten_columns_order_preserved(self):
        names = [f"col{i}" for i in range(10)]
        profile = profile_table({n: [1] for n in names}, seed=0)
        gw = Gateway(SequenceProvider({"profile.interpret": [self.reply_for(names)]}))
        out = interpret_profile(profile, gw)
        assert list(out["column_descriptions"]) == names
        assert len(out["column_descriptions"]) == 10

    def test_missing_column_description_raises(self):
        profile = profile_table({"v": [1], "w": [2]}, seed=0)
        gw = Gateway(SequenceProvider({"profile.interpret": [self.reply_for(["v"])]}))
        with pytest.raises(InvalidModelOutput):
            interpret_profile(profile, gw)

    def test_exact_fixture_text_round_trip(self):
        profile = profile_table({"v": [1]}, seed=0)
        fixture_text = self.reply_for(["v"])
        gw = Gateway(SequenceProvider({"profile.interpret": [fixture_text]}))
        out = interpret_profile(profile, gw)
        assert out["column_descriptions"]["v"] == "v semantic meaning"
