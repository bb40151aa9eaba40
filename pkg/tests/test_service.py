import numpy as np
import pytest
from fastapi.testclient import TestClient

from emorank.core import EmotionVector, profile_affinity
from emorank.datastore import ProfileStore
from emorank.errors import (
    DuplicateActiveSession,
    IncompleteRatings,
    OutOfRangeRating,
    SessionNotActive,
    UnknownCandidate,
    UnknownSession,
    UnknownVariant,
)
from emorank.learning import derive_emotion_vector, derive_personality_vector
from emorank.lexicon import variant_profile
from emorank.server import create_app
from emorank.sessions import CompletionResult, RoundResult, SessionManager
from emorank.validation import check_dataset


@pytest.fixture()
def manager(tmp_path, lexicon, config):
    return SessionManager(
        store=ProfileStore(tmp_path / "store"),
        lexicon=lexicon,
        config=config,
    )


def prototype_ratings(manager, variants, dim):
    """Ratings a noise-free reader devoted to `dim` would give each card."""
    target = EmotionVector.one_hot(dim, manager.config.emotion_dims)
    out = {}
    for card in variants:
        profile = variant_profile(card.features, manager.lexicon)
        affinity = profile_affinity(target, profile)
        out[card.variant_id] = int(
            np.clip(np.round(manager.config.rating_max * affinity), 0,
                    manager.config.rating_max)
        )
    return out


def drive_full_session(manager, candidate_id, dim):
    result = manager.create_session(candidate_id)
    while isinstance(result, RoundResult):
        ratings = prototype_ratings(manager, result.variants, dim)
        result = manager.submit_ratings(result.session.session_id, ratings)
    return result


class TestSessionLifecycle:
    def test_fresh_session_round_zero(self, manager):
        result = manager.create_session("reader-1")
        assert result.session.round_index == 0
        assert result.session.state == "active"
        assert len(result.variants) == 5
        dominants = [
            variant_profile(v.features, manager.lexicon).argmax_dim()
            for v in result.variants
        ]
        assert dominants == [0, 1, 2, 3, 4]
        for card in result.variants:
            assert card.headline

    def test_duplicate_active_session(self, manager):
        manager.create_session("reader-1")
        with pytest.raises(DuplicateActiveSession):
            manager.create_session("reader-1")

    def test_sessions_for_distinct_candidates_are_isolated(self, manager):
        first = manager.create_session("reader-1")
        second = manager.create_session("reader-2")
        assert first.session.session_id != second.session.session_id
        ids_first = {v.variant_id for v in first.variants}
        ids_second = {v.variant_id for v in second.variants}
        assert ids_first.isdisjoint(ids_second)

    def test_submit_advances_round(self, manager):
        created = manager.create_session("reader-1")
        ratings = prototype_ratings(manager, created.variants, 2)
        result = manager.submit_ratings(created.session.session_id, ratings)
        assert isinstance(result, RoundResult)
        assert result.session.round_index == 1
        assert len(result.variants) == 5

    def test_incomplete_ratings_leave_state_unchanged(self, manager):
        created = manager.create_session("reader-1")
        ratings = prototype_ratings(manager, created.variants, 2)
        ratings.pop(created.variants[0].variant_id)
        with pytest.raises(IncompleteRatings):
            manager.submit_ratings(created.session.session_id, ratings)
        session = manager.get_session(created.session.session_id)
        assert session.round_index == 0
        assert session.collected == []

    def test_unknown_variant_rejected(self, manager):
        created = manager.create_session("reader-1")
        ratings = prototype_ratings(manager, created.variants, 2)
        ratings["bogus"] = 1
        with pytest.raises(UnknownVariant):
            manager.submit_ratings(created.session.session_id, ratings)

    def test_out_of_range_rating(self, manager):
        created = manager.create_session("reader-1")
        ratings = prototype_ratings(manager, created.variants, 2)
        ratings[created.variants[0].variant_id] = 9
        with pytest.raises(OutOfRangeRating):
            manager.submit_ratings(created.session.session_id, ratings)

    def test_unknown_session(self, manager):
        with pytest.raises(UnknownSession):
            manager.submit_ratings("sess-none", {})

    def test_completed_session_rejects_new_ratings(self, manager):
        completion = drive_full_session(manager, "reader-1", 1)
        with pytest.raises(SessionNotActive):
            manager.submit_ratings(completion.session.session_id, {"x": 1})

    def test_policy_schedule(self, manager):
        completion = drive_full_session(manager, "reader-1", 3)
        log = completion.session.policy_log
        assert log[0] == "coverage"
        assert log[1] == "coverage"
        assert all(entry.startswith("discrimination:") for entry in log[2:])

    def test_full_session_recovers_prototype(self, manager):
        completion = drive_full_session(manager, "reader-1", 3)
        assert isinstance(completion, CompletionResult)
        assert completion.profile.ev.argmax_dim() == 3
        assert completion.session.state == "complete"

    def test_discrimination_rounds_focus_on_leading_dims(self, manager):
        created = manager.create_session("reader-1")
        result = created
        for _ in range(2):
            ratings = prototype_ratings(manager, result.variants, 4)
            result = manager.submit_ratings(created.session.session_id, ratings)
        dominants = {
            variant_profile(v.features, manager.lexicon).argmax_dim()
            for v in result.variants
        }
        assert 4 in dominants
        assert len(dominants) == 2


class TestPersistence:
    def test_profile_equals_offline_learning(self, manager):
        completion = drive_full_session(manager, "reader-1", 2)

        stored = manager.store.load_responses()
        grouped = check_dataset(stored, manager.config)
        variants = completion.session.variants_map()
        offline_ev = derive_emotion_vector(
            grouped["reader-1"], manager.lexicon, variants, manager.config
        )
        offline_pv = derive_personality_vector(
            grouped["reader-1"], manager.lexicon, variants, manager.config
        )
        assert np.allclose(
            completion.profile.ev.as_array(), offline_ev.as_array(), atol=1e-9
        )
        assert np.allclose(
            completion.profile.pv.as_array(), offline_pv.as_array(), atol=1e-9
        )

    def test_mutations_are_durable(self, manager, lexicon, config):
        created = manager.create_session("reader-1")
        ratings = prototype_ratings(manager, created.variants, 0)
        manager.submit_ratings(created.session.session_id, ratings)

        # a fresh manager over the same store sees the same session state
        reloaded = SessionManager(
            store=manager.store, lexicon=lexicon, config=config
        )
        session = reloaded.get_session(created.session.session_id)
        assert session.round_index == 1
        assert session.collected[0] == ratings

    def test_abandoned_sessions_yield_no_training_data(
        self, tmp_path, lexicon, config
    ):
        manager = SessionManager(
            store=ProfileStore(tmp_path / "store2"),
            lexicon=lexicon,
            config=config,
            idle_timeout_s=0.0,
        )
        created = manager.create_session("reader-1")
        import time

        time.sleep(0.01)
        with pytest.raises(SessionNotActive):
            manager.submit_ratings(
                created.session.session_id,
                prototype_ratings(manager, created.variants, 0),
            )
        assert manager.get_session(created.session.session_id).state == "abandoned"
        assert manager.store.load_responses() == []

    def test_idempotent_resubmission(self, manager):
        created = manager.create_session("reader-1")
        sid = created.session.session_id
        ratings = prototype_ratings(manager, created.variants, 1)
        first = manager.submit_ratings(sid, ratings, round_index=0)
        replay = manager.submit_ratings(sid, ratings, round_index=0)
        assert isinstance(replay, RoundResult)
        assert [v.variant_id for v in replay.variants] == [
            v.variant_id for v in first.variants
        ]
        # no duplicate state: still exactly one collected round
        assert len(manager.get_session(sid).collected) == 1

    def test_conflicting_resubmission_rejected(self, manager):
        created = manager.create_session("reader-1")
        sid = created.session.session_id
        ratings = prototype_ratings(manager, created.variants, 1)
        manager.submit_ratings(sid, ratings, round_index=0)
        tampered = dict(ratings)
        top_variant = max(tampered, key=tampered.get)
        tampered[top_variant] = tampered[top_variant] - 1
        with pytest.raises(SessionNotActive):
            manager.submit_ratings(sid, tampered, round_index=0)


class TestRecommendations:
    def test_matching_item_ranks_first(self, manager):
        drive_full_session(manager, "reader-1", 1)
        recs = manager.get_recommendations("reader-1")
        assert recs[0].item_id == "item-peace"
        assert recs[0].rank == 1

    def test_unknown_candidate(self, manager):
        with pytest.raises(UnknownCandidate):
            manager.get_recommendations("nobody")

    def test_scores_recompute_via_core(self, manager):
        drive_full_session(manager, "reader-1", 2)
        profile = manager.get_profile("reader-1")
        for rec in manager.get_recommendations("reader-1"):
            assert rec.score == pytest.approx(
                profile_affinity(profile.ev, rec.variant.profile), abs=1e-9
            )


class TestHttpApi:
    @pytest.fixture()
    def client(self, manager):
        return TestClient(create_app(manager))

    def test_healthz(self, client):
        response = client.get("/v1/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_create_session(self, client):
        response = client.post("/v1/sessions", json={"candidate_id": "reader-9"})
        assert response.status_code == 201
        body = response.json()
        assert body["round_index"] == 0
        assert len(body["variants"]) == 5
        for card in body["variants"]:
            assert card["headline"]
            assert card["color"]

    def test_duplicate_session_conflict(self, client):
        client.post("/v1/sessions", json={"candidate_id": "reader-9"})
        response = client.post("/v1/sessions", json={"candidate_id": "reader-9"})
        assert response.status_code == 409
        assert response.json()["code"] == "duplicate_active_session"

    def test_unknown_session_404(self, client):
        assert client.get("/v1/sessions/sess-none").status_code == 404

    def test_unknown_profile_404(self, client):
        response = client.get("/v1/candidates/nobody/profile")
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_candidate"

    def test_incomplete_ratings_400(self, client):
        body = client.post("/v1/sessions", json={"candidate_id": "r"}).json()
        first_variant = body["variants"][0]["variant_id"]
        response = client.post(
            f"/v1/sessions/{body['session_id']}/ratings",
            json={"ratings": {first_variant: 3}},
        )
        assert response.status_code == 400
        assert response.json()["code"] == "incomplete_ratings"

    def test_full_session_over_http(self, client, manager):
        body = client.post("/v1/sessions", json={"candidate_id": "reader-7"}).json()
        sid = body["session_id"]
        target = EmotionVector.one_hot(2, 5)

        for round_index in range(5):
            ratings = {}
            for card in body["variants"]:
                session = manager.get_session(sid)
                features = {
                    v.variant_id: v.features for v in session.presented[round_index]
                }[card["variant_id"]]
                profile = variant_profile(features, manager.lexicon)
                ratings[card["variant_id"]] = int(
                    round(4 * profile_affinity(target, profile))
                )
            response = client.post(
                f"/v1/sessions/{sid}/ratings",
                json={"ratings": ratings, "round_index": round_index},
            )
            assert response.status_code == 200, response.text
            body = response.json()

        assert body["state"] == "complete"
        assert body["profile"]["ev"][2] == max(body["profile"]["ev"])
        assert body["recommendations"][0]["rank"] == 1

        # GET /profile returns the same numbers the completion reported
        profile = client.get("/v1/candidates/reader-7/profile").json()
        assert profile == body["profile"]

    def test_session_resume_payload(self, client):
        body = client.post("/v1/sessions", json={"candidate_id": "r"}).json()
        again = client.get(f"/v1/sessions/{body['session_id']}").json()
        assert again["round_index"] == 0
        assert [v["variant_id"] for v in again["variants"]] == [
            v["variant_id"] for v in body["variants"]
        ]

    def test_completed_session_resume_includes_results(self, client, manager):
        completion = drive_full_session(manager, "reader-done", 1)
        body = client.get(f"/v1/sessions/{completion.session.session_id}").json()
        assert body["state"] == "complete"
        assert body["profile"]["candidate_id"] == "reader-done"
        assert body["recommendations"][0]["rank"] == 1

    def test_recommendations_endpoint(self, client, manager):
        drive_full_session(manager, "reader-5", 0)
        response = client.get("/v1/candidates/reader-5/recommendations")
        assert response.status_code == 200
        items = response.json()["items"]
        assert items[0]["item_id"] == "item-devotion"
        assert [item["rank"] for item in items] == list(range(1, len(items) + 1))
