"""HTTP API over the session manager.

JSON over HTTP/1.1. Caller errors map to 4xx with a ``{code, message}``
body; state conflicts (duplicate active session, stale round, inactive
session) map to 409. No authentication: the service is assumed to sit
behind a proxy.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .core import CandidateProfile
from .errors import (
    DuplicateActiveSession,
    EngineError,
    LexiconUnavailable,
    SessionNotActive,
    UnknownCandidate,
    UnknownContext,
    UnknownItem,
    UnknownSession,
)
from .sessions import (
    CompletionResult,
    ElicitationSession,
    PresentedVariant,
    Recommendation,
    RoundResult,
    SessionManager,
)

_STATUS_BY_ERROR: list[tuple[type[EngineError], int]] = [
    (DuplicateActiveSession, 409),
    (SessionNotActive, 409),
    (UnknownSession, 404),
    (UnknownCandidate, 404),
    (UnknownItem, 404),
    (UnknownContext, 404),
    (LexiconUnavailable, 503),
]


def _status_for(exc: EngineError) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 400


class CreateSessionRequest(BaseModel):
    candidate_id: str = Field(min_length=1)
    rounds: int | None = Field(default=None, ge=1, le=50)


class SubmitRatingsRequest(BaseModel):
    ratings: dict[str, int]
    round_index: int | None = Field(default=None, ge=0)


def _variant_card(variant: PresentedVariant) -> dict:
    features = variant.features
    return {
        "variant_id": variant.variant_id,
        "stimulus_id": variant.stimulus_id,
        "context_id": variant.context_id,
        "headline": variant.headline,
        "color": features.color,
        "background": features.background,
        "shape": features.shape,
        "text_cluster": features.text_cluster,
        "presentation_order": features.presentation_order,
        "inscribed_words": list(features.inscribed_words or ()),
    }


def _profile_payload(profile: CandidateProfile) -> dict:
    return {
        "candidate_id": profile.candidate_id,
        "pv": list(profile.pv.values),
        "support": list(profile.pv.support),
        "ev": list(profile.ev.values),
        "emotional_class": profile.emotional_class,
    }


def _recommendation_payload(rec: Recommendation) -> dict:
    return {
        "item_id": rec.item_id,
        "rank": rec.rank,
        "score": rec.score,
        "headline": rec.variant.text,
        "features": rec.variant.features.to_dict(),
        "profile": list(rec.variant.profile.values),
    }


def _session_payload(
    manager: SessionManager,
    session: ElicitationSession,
    variants: list[PresentedVariant] | None = None,
) -> dict:
    if variants is None:
        variants = manager.current_variants(session)
    payload = {
        "session_id": session.session_id,
        "candidate_id": session.candidate_id,
        "state": session.state,
        "round_index": session.round_index,
        "rounds": session.rounds,
        "variants": [_variant_card(v) for v in variants],
    }
    if session.state == "complete":
        profile = manager.store.load_profile(session.candidate_id)
        if profile is not None:
            payload["profile"] = _profile_payload(profile)
            payload["recommendations"] = [
                _recommendation_payload(rec)
                for rec in manager.get_recommendations(session.candidate_id)
            ]
    return payload


def create_app(manager: SessionManager) -> FastAPI:
    app = FastAPI(title="emorank", version="0.1.0")

    @app.exception_handler(EngineError)
    async def engine_error_handler(request: Request, exc: EngineError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"code": exc.code, "message": str(exc)},
        )

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionRequest):
        result = manager.create_session(body.candidate_id, rounds=body.rounds)
        return _session_payload(manager, result.session, result.variants)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        session = manager.get_session(session_id)
        return _session_payload(manager, session)

    @app.post("/v1/sessions/{session_id}/ratings")
    def submit_ratings(session_id: str, body: SubmitRatingsRequest):
        result = manager.submit_ratings(
            session_id, body.ratings, round_index=body.round_index
        )
        if isinstance(result, CompletionResult):
            return {
                "session_id": result.session.session_id,
                "candidate_id": result.session.candidate_id,
                "state": result.session.state,
                "round_index": result.session.round_index,
                "rounds": result.session.rounds,
                "variants": [],
                "profile": _profile_payload(result.profile),
                "recommendations": [
                    _recommendation_payload(rec) for rec in result.recommendations
                ],
            }
        assert isinstance(result, RoundResult)
        return _session_payload(manager, result.session, result.variants)

    @app.get("/v1/candidates/{candidate_id}/profile")
    def get_profile(candidate_id: str):
        return _profile_payload(manager.get_profile(candidate_id))

    @app.get("/v1/candidates/{candidate_id}/recommendations")
    def get_recommendations(candidate_id: str, context: str | None = None):
        recs = manager.get_recommendations(candidate_id, context_id=context)
        return {
            "candidate_id": candidate_id,
            "context_id": context or manager.context_id,
            "items": [_recommendation_payload(rec) for rec in recs],
        }

    return app
