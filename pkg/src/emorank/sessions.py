"""Elicitation sessions: round-by-round variant rating for live candidates.

A session presents five variant cards per round. The first two rounds use
the coverage policy (one dominant dimension per card, round-robin); later
rounds use the discrimination policy focused on the two leading dimensions
of the running emotion-vector estimate, so the remaining rounds sharpen
the distinction that matters.

Per-round ratings are durably persisted inside the session document
before the call returns. The flat ``responses.jsonl`` training file only
receives a session's responses when it completes, which keeps abandoned
sessions out of training data. Completed sessions are pure replays: the
profile returned by the service equals offline derivation over the
persisted responses.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from .config import EngineConfig
from .core import (
    CandidateProfile,
    EmotionVector,
    ResponseExpression,
    VariantFeatures,
    profile_affinity,
)
from .datastore import ProfileStore
from .embedding import (
    CoveragePolicy,
    DiscriminationPolicy,
    EmbeddedVariant,
    HeadlineTemplate,
    SlotToken,
    embed_headline,
    generate_variant_set,
)
from .errors import (
    DuplicateActiveSession,
    IncompleteRatings,
    LexiconUnavailable,
    SessionNotActive,
    UnknownCandidate,
    UnknownSession,
    UnknownVariant,
)
from .learning import (
    ClusterModel,
    classify_candidate,
    derive_emotion_vector,
    derive_personality_vector,
    emotion_vector_from_weights,
    accumulate_emotion_weights,
)
from .lexicon import Lexicon, variant_profile
from .ranking import rank_items
from .validation import check_rating

SESSION_SCHEMA_VERSION = 1

DEFAULT_ROUNDS = 5
DEFAULT_VARIANTS_PER_ROUND = 5
DEFAULT_IDLE_TIMEOUT_S = 24 * 3600
COVERAGE_ROUNDS = 2  # rounds 0 and 1 explore; later rounds discriminate


@dataclass(frozen=True)
class PresentedVariant:
    """One card shown to the candidate in one round."""

    variant_id: str
    stimulus_id: str
    context_id: str
    features: VariantFeatures
    headline: str

    def to_dict(self) -> dict:
        return {
            "variant_id": self.variant_id,
            "stimulus_id": self.stimulus_id,
            "context_id": self.context_id,
            "features": self.features.to_dict(),
            "headline": self.headline,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PresentedVariant":
        return cls(
            variant_id=raw["variant_id"],
            stimulus_id=raw["stimulus_id"],
            context_id=raw["context_id"],
            features=VariantFeatures.from_dict(raw["features"]),
            headline=raw["headline"],
        )


@dataclass
class ElicitationSession:
    session_id: str
    candidate_id: str
    rounds: int
    round_index: int = 0
    state: str = "active"  # active | complete | abandoned
    presented: list[list[PresentedVariant]] = field(default_factory=list)
    collected: list[dict[str, int]] = field(default_factory=list)
    policy_log: list[str] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    updated_at: float = field(default_factory=time.time)

    def to_dict(self) -> dict:
        return {
            "version": SESSION_SCHEMA_VERSION,
            "session_id": self.session_id,
            "candidate_id": self.candidate_id,
            "rounds": self.rounds,
            "round_index": self.round_index,
            "state": self.state,
            "presented": [[v.to_dict() for v in round_set] for round_set in self.presented],
            "collected": self.collected,
            "policy_log": self.policy_log,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "ElicitationSession":
        return cls(
            session_id=raw["session_id"],
            candidate_id=raw["candidate_id"],
            rounds=raw["rounds"],
            round_index=raw["round_index"],
            state=raw["state"],
            presented=[
                [PresentedVariant.from_dict(v) for v in round_set]
                for round_set in raw["presented"]
            ],
            collected=[dict(r) for r in raw["collected"]],
            policy_log=list(raw["policy_log"]),
            created_at=raw["created_at"],
            updated_at=raw["updated_at"],
        )

    def responses(self) -> list[ResponseExpression]:
        """Rated responses collected so far, in presentation order."""
        out = []
        for round_set, ratings in zip(self.presented, self.collected):
            for variant in round_set:
                out.append(
                    ResponseExpression(
                        candidate_id=self.candidate_id,
                        stimulus_id=variant.stimulus_id,
                        variant_id=variant.variant_id,
                        context_id=variant.context_id,
                        rating=ratings[variant.variant_id],
                    )
                )
        return out

    def variants_map(self) -> dict[str, VariantFeatures]:
        return {
            variant.variant_id: variant.features
            for round_set in self.presented
            for variant in round_set
        }


@dataclass(frozen=True)
class ItemSpec:
    """A rankable catalog item: identity, headline template, base features."""

    item_id: str
    template: HeadlineTemplate
    base_features: VariantFeatures | None = None


@dataclass(frozen=True)
class Recommendation:
    item_id: str
    rank: int
    score: float
    variant: EmbeddedVariant


@dataclass(frozen=True)
class RoundResult:
    session: ElicitationSession
    variants: list[PresentedVariant]


@dataclass(frozen=True)
class CompletionResult:
    session: ElicitationSession
    profile: CandidateProfile
    recommendations: list[Recommendation]


def default_template(context_id: str) -> HeadlineTemplate:
    return HeadlineTemplate(
        (SlotToken(name="theme", context_id=context_id), "news for you")
    )


class SessionManager:
    """Owns live sessions and funnels every mutation through the store.

    All engine calls are pure; the manager holds the only mutable state
    (the session table) and serializes mutations per session.
    """

    def __init__(
        self,
        store: ProfileStore,
        lexicon: Lexicon | None,
        config: EngineConfig = EngineConfig(),
        model: ClusterModel | None = None,
        rounds: int = DEFAULT_ROUNDS,
        variants_per_round: int = DEFAULT_VARIANTS_PER_ROUND,
        context_id: str = "news",
        template: HeadlineTemplate | None = None,
        idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S,
    ):
        self.store = store
        self.lexicon = lexicon
        self.config = config
        self.model = model
        self.rounds = rounds
        self.variants_per_round = variants_per_round
        self.context_id = context_id
        self.template = template or default_template(context_id)
        self.idle_timeout_s = idle_timeout_s
        self._sessions: dict[str, ElicitationSession] = {}
        self._manager_lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}
        self._load_persisted_sessions()

    def _load_persisted_sessions(self) -> None:
        for session_id in self.store.list_sessions():
            raw = self.store.load_session(session_id)
            if raw is not None:
                self._sessions[session_id] = ElicitationSession.from_dict(raw)

    # -- internals -----------------------------------------------------------

    def _persist(self, session: ElicitationSession) -> None:
        session.updated_at = time.time()
        self.store.save_session(session.session_id, session.to_dict())

    def _expire_if_idle(self, session: ElicitationSession) -> None:
        if (
            session.state == "active"
            and time.time() - session.updated_at > self.idle_timeout_s
        ):
            session.state = "abandoned"
            self._persist(session)

    def _running_ev(self, session: ElicitationSession) -> EmotionVector:
        responses = session.responses()
        if not responses:
            return EmotionVector.uniform(self.config.emotion_dims)
        weights = accumulate_emotion_weights(
            responses, self.lexicon, session.variants_map(), self.config
        )
        return emotion_vector_from_weights(weights, self.config)

    def _round_policy(self, session: ElicitationSession, round_index: int):
        if round_index < COVERAGE_ROUNDS:
            return CoveragePolicy(), "coverage"
        ev = self._running_ev(session).as_array()
        top2 = sorted(range(len(ev)), key=lambda d: (-ev[d], d))[:2]
        policy = DiscriminationPolicy(focus_dims=(top2[0], top2[1]))
        return policy, f"discrimination:{top2[0]},{top2[1]}"

    def _build_round(
        self, session: ElicitationSession, round_index: int
    ) -> list[PresentedVariant]:
        policy, policy_name = self._round_policy(session, round_index)
        stimulus_id = f"{session.session_id}-r{round_index}"
        feature_sets = generate_variant_set(
            stimulus_id, self.lexicon, self.variants_per_round, policy, self.config
        )
        cards = []
        for j, features in enumerate(feature_sets):
            target = variant_profile(features, self.lexicon)
            embedded = embed_headline(
                self.template, target, self.lexicon, self.config, features=features
            )
            cards.append(
                PresentedVariant(
                    variant_id=f"{stimulus_id}-v{j + 1}",
                    stimulus_id=stimulus_id,
                    context_id=self.context_id,
                    features=embedded.features,
                    headline=embedded.text,
                )
            )
        session.policy_log.append(policy_name)
        session.presented.append(cards)
        return cards

    def _get(self, session_id: str) -> ElicitationSession:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        self._expire_if_idle(session)
        return session

    # -- API surface ---------------------------------------------------------

    def create_session(
        self, candidate_id: str, rounds: int | None = None
    ) -> RoundResult:
        if self.lexicon is None:
            raise LexiconUnavailable("no lexicon loaded")
        if not candidate_id:
            raise UnknownCandidate("candidate_id must be non-empty")
        with self._manager_lock:
            for session in self._sessions.values():
                self._expire_if_idle(session)
                if session.candidate_id == candidate_id and session.state == "active":
                    raise DuplicateActiveSession(
                        f"candidate {candidate_id!r} already has active session "
                        f"{session.session_id}"
                    )
            session = ElicitationSession(
                session_id=f"sess-{uuid.uuid4().hex[:12]}",
                candidate_id=candidate_id,
                rounds=rounds or self.rounds,
            )
            variants = self._build_round(session, 0)
            self._sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.Lock()
            self._persist(session)
            return RoundResult(session=session, variants=variants)

    def get_session(self, session_id: str) -> ElicitationSession:
        return self._get(session_id)

    def current_variants(self, session: ElicitationSession) -> list[PresentedVariant]:
        if session.round_index < len(session.presented):
            return session.presented[session.round_index]
        return []

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._manager_lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def submit_ratings(
        self,
        session_id: str,
        ratings: dict[str, int],
        round_index: int | None = None,
    ) -> RoundResult | CompletionResult:
        with self._lock_for(session_id):
            return self._submit_ratings_locked(session_id, ratings, round_index)

    def _submit_ratings_locked(
        self,
        session_id: str,
        ratings: dict[str, int],
        round_index: int | None = None,
    ) -> RoundResult | CompletionResult:
        session = self._get(session_id)

        # Idempotent replay: re-submitting an already-accepted round with
        # the same payload returns the original result without mutating.
        if (
            round_index is not None
            and round_index < session.round_index
            and round_index < len(session.collected)
        ):
            if session.collected[round_index] == dict(ratings):
                return self._result_after_round(session, round_index)
            raise SessionNotActive(
                f"round {round_index} already submitted with different ratings"
            )

        if session.state != "active":
            raise SessionNotActive(f"session {session_id} is {session.state}")
        if round_index is not None and round_index != session.round_index:
            raise SessionNotActive(
                f"session is at round {session.round_index}, got {round_index}"
            )

        presented = session.presented[session.round_index]
        expected_ids = {v.variant_id for v in presented}
        given_ids = set(ratings)
        unknown = given_ids - expected_ids
        if unknown:
            raise UnknownVariant(f"ratings reference unknown variants {sorted(unknown)}")
        missing = expected_ids - given_ids
        if missing:
            raise IncompleteRatings(f"missing ratings for {sorted(missing)}")
        for value in ratings.values():
            check_rating(value, self.config)

        session.collected.append(dict(ratings))
        session.round_index += 1

        if session.round_index < session.rounds:
            self._build_round(session, session.round_index)
            self._persist(session)
            return RoundResult(
                session=session, variants=session.presented[session.round_index]
            )

        session.state = "complete"
        responses = session.responses()
        self.store.append_responses(responses)
        profile = self._derive_profile(session)
        self.store.save_profile(profile)
        self._persist(session)
        return CompletionResult(
            session=session,
            profile=profile,
            recommendations=self._recommend_for_profile(profile),
        )

    def _derive_profile(self, session: ElicitationSession) -> CandidateProfile:
        responses = session.responses()
        variants = session.variants_map()
        pv = derive_personality_vector(responses, self.lexicon, variants, self.config)
        ev = derive_emotion_vector(responses, self.lexicon, variants, self.config)
        emotional_class = None
        if self.model is not None:
            emotional_class = classify_candidate(responses, self.model, self.config)
        return CandidateProfile(
            candidate_id=session.candidate_id,
            pv=pv,
            ev=ev,
            emotional_class=emotional_class,
        )

    def _result_after_round(
        self, session: ElicitationSession, round_index: int
    ) -> RoundResult | CompletionResult:
        if round_index + 1 < session.rounds:
            return RoundResult(
                session=session, variants=session.presented[round_index + 1]
            )
        profile = self.store.load_profile(session.candidate_id)
        if profile is None:  # completion never persisted; derive afresh
            profile = self._derive_profile(session)
        return CompletionResult(
            session=session,
            profile=profile,
            recommendations=self._recommend_for_profile(profile),
        )

    def get_profile(self, candidate_id: str) -> CandidateProfile:
        profile = self.store.load_profile(candidate_id)
        if profile is None:
            raise UnknownCandidate(f"no profile stored for {candidate_id!r}")
        return profile

    def default_items(self, context_id: str) -> list[ItemSpec]:
        """One thematic item per emotion dimension."""
        if self.lexicon is None:
            raise LexiconUnavailable("no lexicon loaded")
        template = default_template(context_id)
        items = []
        for dim, name in enumerate(self.lexicon.taxonomy.names):
            target = EmotionVector.one_hot(dim, self.lexicon.dims)
            base: VariantFeatures | None = None
            colors = self.lexicon.categories("color")
            if colors:
                best = min(
                    colors,
                    key=lambda cat: (
                        -profile_affinity(target, self.lexicon.feature_profile("color", cat)),
                        cat,
                    ),
                )
                base = VariantFeatures(color=best)
            items.append(
                ItemSpec(item_id=f"item-{name}", template=template, base_features=base)
            )
        return items

    def get_recommendations(
        self,
        candidate_id: str,
        context_id: str | None = None,
        items: list[ItemSpec] | None = None,
    ) -> list[Recommendation]:
        profile = self.get_profile(candidate_id)
        return self._recommend_for_profile(profile, context_id, items)

    def _recommend_for_profile(
        self,
        profile: CandidateProfile,
        context_id: str | None = None,
        items: list[ItemSpec] | None = None,
    ) -> list[Recommendation]:
        if self.lexicon is None:
            raise LexiconUnavailable("no lexicon loaded")
        context = context_id or self.context_id
        specs = items if items is not None else self.default_items(context)
        embedded: dict[str, EmbeddedVariant] = {}
        for spec in specs:
            embedded[spec.item_id] = embed_headline(
                spec.template,
                profile.ev,
                self.lexicon,
                self.config,
                features=spec.base_features,
            )
        ranking = rank_items(
            profile.ev,
            [(item_id, variant.profile) for item_id, variant in embedded.items()],
        )
        return [
            Recommendation(
                item_id=entry.item_id,
                rank=entry.rank,
                score=entry.score,
                variant=embedded[entry.item_id],
            )
            for entry in ranking
        ]
