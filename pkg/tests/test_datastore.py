import os

import pytest

from emorank.core import (
    CandidateProfile,
    EmotionVector,
    PersonalityVector,
    ResponseExpression,
)
from emorank.datastore import (
    ProfileStore,
    load_table_fixtures,
    profile_from_dict,
    profile_to_dict,
    response_from_dict,
    response_to_dict,
)
from emorank.errors import DuplicateResponse, StorageError
from emorank.learning import cluster_candidates


def response(cid, stimulus, rating=1):
    return ResponseExpression(
        candidate_id=cid,
        stimulus_id=stimulus,
        variant_id="v1",
        context_id="news",
        rating=rating,
    )


class TestResponses:
    def test_append_then_read(self, tmp_path):
        store = ProfileStore(tmp_path)
        store.append_responses([response("a", "s1", 3)])
        assert store.load_responses() == [response("a", "s1", 3)]

    def test_duplicate_leaves_store_unchanged(self, tmp_path):
        store = ProfileStore(tmp_path)
        store.append_responses([response("a", "s1", 3)])
        with pytest.raises(DuplicateResponse):
            store.append_responses([response("a", "s2", 1), response("a", "s1", 0)])
        assert store.load_responses() == [response("a", "s1", 3)]

    def test_thousand_responses_round_trip(self, tmp_path):
        store = ProfileStore(tmp_path)
        batch = [response(f"c{i % 50}", f"s{i}", i % 5) for i in range(1000)]
        assert store.append_responses(batch) == 1000
        reloaded = ProfileStore(tmp_path).load_responses()
        assert sorted(map(response_to_dict, reloaded), key=str) == sorted(
            map(response_to_dict, batch), key=str
        )

    def test_insertion_order_preserved(self, tmp_path):
        store = ProfileStore(tmp_path)
        first = [response("a", "s1"), response("b", "s1")]
        second = [response("a", "s2")]
        store.append_responses(first)
        store.append_responses(second)
        assert store.load_responses() == first + second

    def test_torn_write_preserves_previous_data(self, tmp_path, monkeypatch):
        store = ProfileStore(tmp_path)
        store.append_responses([response("a", "s1", 2)])

        real_replace = os.replace

        def crash(src, dst):
            raise OSError("simulated crash before rename")

        monkeypatch.setattr(os, "replace", crash)
        with pytest.raises(StorageError):
            store.append_responses([response("a", "s2", 1)])
        monkeypatch.setattr(os, "replace", real_replace)

        assert store.load_responses() == [response("a", "s1", 2)]
        leftovers = [p for p in tmp_path.iterdir() if p.suffix == ".tmp"]
        assert leftovers == []


class TestDocuments:
    def test_profile_round_trip(self, tmp_path):
        store = ProfileStore(tmp_path)
        profile = CandidateProfile(
            candidate_id="reader-1",
            pv=PersonalityVector(
                values=(0.5, 0.0, 1.0, 0.0, 0.25),
                support=(True, False, True, False, True),
            ),
            ev=EmotionVector((0.2, 0.1, 0.3, 0.15, 0.25)),
            emotional_class=2,
        )
        store.save_profile(profile)
        assert store.load_profile("reader-1") == profile
        assert store.load_profile("ghost") is None

    def test_profile_dict_round_trip(self):
        profile = CandidateProfile(
            candidate_id="r",
            pv=PersonalityVector(values=(1.0, 0.0), support=(True, False)),
            ev=EmotionVector((0.5, 0.5)),
        )
        assert profile_from_dict(profile_to_dict(profile)) == profile

    def test_model_round_trip(self, tmp_path, config):
        dataset = []
        for cid, pattern in (("a", [4, 0]), ("b", [0, 4]), ("c", [4, 1])):
            for i, rating in enumerate(pattern):
                dataset.append(
                    ResponseExpression(cid, f"s{i}", "v1", "news", rating)
                )
        model = cluster_candidates(dataset, 2, config)
        store = ProfileStore(tmp_path)
        store.save_model("main", model)
        assert store.load_model("main") == model
        assert store.load_model("other") is None

    def test_session_documents(self, tmp_path):
        store = ProfileStore(tmp_path)
        store.save_session("sess-1", {"version": 1, "state": "active"})
        assert store.load_session("sess-1") == {"version": 1, "state": "active"}
        assert store.list_sessions() == ["sess-1"]

    def test_response_dict_round_trip(self):
        resp = response("a", "s1", 4)
        assert response_from_dict(response_to_dict(resp)) == resp


class TestTableFixtures:
    def test_out_of_scale_cell_is_flagged(self):
        fixtures = load_table_fixtures()
        assert fixtures.table1.out_of_range_cells() == [(5, 4, 5)]

    def test_raw_row_preserves_printed_value(self):
        fixtures = load_table_fixtures()
        row5 = dict(fixtures.table1.rows)[5]
        assert row5 == (2, 2, 4, 5, 4)

    def test_clamped_on_conversion(self, config):
        fixtures = load_table_fixtures()
        responses = fixtures.table1.to_responses(config)
        cell = [
            r
            for r in responses
            if r.candidate_id == "candidate-05" and r.variant_id == "cluster-4"
        ]
        assert cell[0].rating == 4

    def test_table2_first_row(self):
        fixtures = load_table_fixtures()
        assert fixtures.table2.rows[0] == (1, 2)

    def test_table3_class_three(self):
        fixtures = load_table_fixtures()
        assert fixtures.table3[3] == 72

    def test_groups(self):
        fixtures = load_table_fixtures()
        assert fixtures.table1.groups == {
            "I": (1, 2, 3, 4, 5),
            "II": (6, 7, 8, 9, 10),
        }
