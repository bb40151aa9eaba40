"""Profile derivation, affinity clustering, and candidate classification.

The learning pipeline mines each candidate's rated responses into a
personality vector (per-dimension preference means) and an emotion vector
(rating-weighted normalized profile sum), clusters candidates with a
k-medoids search that maximizes total candidate affinity, and classifies
new candidates by their nearest medoid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .core import (
    CandidateProfile,
    EmotionVector,
    PersonalityVector,
    ResponseExpression,
    StimulusKey,
    VariantFeatures,
    candidate_affinity,
    profile_affinity,
)
from .errors import (
    EmptyModel,
    NoSharedStimuli,
    TooFewCandidates,
    UnknownVariant,
    ValidationError,
)
from .lexicon import Lexicon, variant_profile
from .validation import check_dataset, check_responses

MAX_SWAP_ITERATIONS = 100

MODEL_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Medoid:
    """A cluster's representative candidate with their stored responses."""

    candidate_id: str
    responses: tuple[ResponseExpression, ...]


@dataclass(frozen=True)
class ClusterModel:
    """Result of affinity k-medoids clustering.

    Classes are numbered 1..k in medoid candidate-id order. ``objective``
    is the summed affinity of every candidate to its assigned medoid.
    ``metadata`` records swap iterations used and whether the iteration
    cap was hit before convergence.
    """

    k: int
    medoids: tuple[Medoid, ...]
    assignments: dict[str, int]
    objective: float
    metadata: dict = field(default_factory=dict)

    def medoid_for_class(self, emotional_class: int) -> Medoid:
        return self.medoids[emotional_class - 1]


def _resolve_profile(
    resp: ResponseExpression,
    lexicon: Lexicon,
    variants: dict[str, VariantFeatures],
) -> EmotionVector:
    features = variants.get(resp.variant_id)
    if features is None:
        raise UnknownVariant(f"no features known for variant {resp.variant_id!r}")
    return variant_profile(features, lexicon)


def derive_personality_vector(
    responses: list[ResponseExpression],
    lexicon: Lexicon,
    variants: dict[str, VariantFeatures],
    config: EngineConfig = EngineConfig(),
) -> PersonalityVector:
    """Per-dimension means of normalized ratings.

    Each response is attributed to the dominant dimension of its variant's
    profile (argmax, ties to the lowest index); dimension i's entry is the
    mean of rating/R over its responses, 0 with support=False when no
    response lands there.
    """
    if not responses:
        raise ValidationError("cannot derive a personality vector from no responses")
    check_responses(responses, config)
    m = config.emotion_dims
    sums = np.zeros(m)
    counts = np.zeros(m, dtype=int)
    for resp in responses:
        profile = _resolve_profile(resp, lexicon, variants)
        dim = profile.argmax_dim()
        sums[dim] += resp.rating / config.rating_max
        counts[dim] += 1
    values = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    support = counts > 0
    return PersonalityVector(
        values=tuple(float(v) for v in values),
        support=tuple(bool(s) for s in support),
    )


def accumulate_emotion_weights(
    responses: list[ResponseExpression],
    lexicon: Lexicon,
    variants: dict[str, VariantFeatures],
    config: EngineConfig = EngineConfig(),
) -> np.ndarray:
    """Pre-normalization emotion weights: sum of (rating/R) * variant profile."""
    if not responses:
        raise ValidationError("cannot derive an emotion vector from no responses")
    check_responses(responses, config)
    weights = np.zeros(config.emotion_dims)
    for resp in responses:
        profile = _resolve_profile(resp, lexicon, variants)
        weights += (resp.rating / config.rating_max) * profile.as_array()
    return weights


def emotion_vector_from_weights(
    weights: np.ndarray, config: EngineConfig = EngineConfig()
) -> EmotionVector:
    """Normalize accumulated weights; a zero total falls back to uniform.

    Normalization absorbs any positive scaling of the weights, so cold-start
    candidates (all-zero ratings) get the population-average profile instead
    of an error.
    """
    total = float(np.sum(weights))
    if total > 0:
        return EmotionVector.from_weights(weights)
    return EmotionVector.uniform(config.emotion_dims)


def derive_emotion_vector(
    responses: list[ResponseExpression],
    lexicon: Lexicon,
    variants: dict[str, VariantFeatures],
    config: EngineConfig = EngineConfig(),
) -> EmotionVector:
    """Rating-weighted, normalized sum of variant profiles."""
    weights = accumulate_emotion_weights(responses, lexicon, variants, config)
    return emotion_vector_from_weights(weights, config)


def derive_profile(
    candidate_id: str,
    responses: list[ResponseExpression],
    lexicon: Lexicon,
    variants: dict[str, VariantFeatures],
    config: EngineConfig = EngineConfig(),
    model: "ClusterModel | None" = None,
) -> CandidateProfile:
    """Convenience wrapper deriving PV, EV, and (given a model) the class."""
    pv = derive_personality_vector(responses, lexicon, variants, config)
    ev = derive_emotion_vector(responses, lexicon, variants, config)
    emotional_class = None
    if model is not None:
        emotional_class = classify_candidate(responses, model, config)
    return CandidateProfile(
        candidate_id=candidate_id, pv=pv, ev=ev, emotional_class=emotional_class
    )


def affinity_matrix(
    groups: list[list[ResponseExpression]], config: EngineConfig = EngineConfig()
) -> np.ndarray:
    """Pairwise candidate affinities, vectorized over the shared-key grid.

    Agrees with :func:`emorank.core.candidate_affinity` on every pair (up
    to float summation order). Raises NoSharedStimuli when some pair has
    no co-rated stimulus.
    """
    n = len(groups)
    keys: list[StimulusKey] = sorted({r.stimulus_key for g in groups for r in g})
    key_index = {key: i for i, key in enumerate(keys)}
    ratings = np.full((n, len(keys)), np.nan)
    for gi, group in enumerate(groups):
        for resp in group:
            ratings[gi, key_index[resp.stimulus_key]] = resp.rating
    observed = ~np.isnan(ratings)
    filled = np.where(observed, ratings, 0.0)

    out = np.empty((n, n))
    r = config.rating_max
    for i in range(n):
        both = observed[i] & observed  # (n, K)
        counts = both.sum(axis=1)
        if np.any(counts == 0):
            j = int(np.argmin(counts))
            raise NoSharedStimuli(f"candidate pair ({i}, {j}) shares no stimulus key")
        diffs = np.abs(filled[i] - filled) * both
        out[i] = 1.0 - diffs.sum(axis=1) / (counts * r)
    return out


def _farthest_first_medoids(aff: np.ndarray, k: int) -> list[int]:
    """Initial medoid indices: farthest-first traversal from index 0.

    Indices are assumed sorted by candidate id, so index 0 is the
    lexicographically smallest candidate and ties resolve to the smaller
    index automatically (argmin returns the first minimum).
    """
    n = aff.shape[0]
    chosen = [0]
    while len(chosen) < k:
        max_aff = aff[:, chosen].max(axis=1)
        max_aff[chosen] = np.inf  # never re-pick a medoid
        next_idx = int(np.argmin(max_aff))
        chosen.append(next_idx)
    return sorted(chosen)


def _objective(aff: np.ndarray, medoid_idx: list[int]) -> float:
    """Total affinity of every candidate to its best medoid."""
    return float(aff[:, medoid_idx].max(axis=1).sum())


def cluster_candidates(
    dataset: list[ResponseExpression],
    k: int,
    config: EngineConfig = EngineConfig(),
) -> ClusterModel:
    """Affinity-maximizing k-medoids over candidates.

    Deterministic: medoids start from a farthest-first traversal seeded at
    the lexicographically smallest candidate id, then improving swaps are
    applied (steepest first, ties to the smaller entering then leaving id)
    until none remains or MAX_SWAP_ITERATIONS is reached. Classes are
    numbered 1..k by medoid id order.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    grouped = check_dataset(dataset, config)
    ids = sorted(grouped)
    if len(ids) < k:
        raise TooFewCandidates(f"need at least {k} candidates, got {len(ids)}")
    groups = [grouped[cid] for cid in ids]
    aff = affinity_matrix(groups, config)
    n = len(ids)

    medoid_idx = _farthest_first_medoids(aff, k)
    best_obj = _objective(aff, medoid_idx)
    iterations = 0
    converged = False
    while iterations < MAX_SWAP_ITERATIONS:
        iterations += 1
        medoid_set = set(medoid_idx)
        best_swap: tuple[int, int] | None = None
        swap_obj = best_obj
        for entering in range(n):
            if entering in medoid_set:
                continue
            for leaving in medoid_idx:
                trial = sorted(medoid_set - {leaving} | {entering})
                obj = _objective(aff, trial)
                if obj > swap_obj:
                    swap_obj = obj
                    best_swap = (entering, leaving)
        if best_swap is None:
            converged = True
            break
        entering, leaving = best_swap
        medoid_idx = sorted(medoid_set - {leaving} | {entering})
        best_obj = swap_obj

    # medoid_idx ascending == candidate-id order, so argmax's first-max
    # tie rule assigns ties to the lexicographically smaller medoid.
    assignment_idx = aff[:, medoid_idx].argmax(axis=1)
    assignments = {
        ids[i]: int(assignment_idx[i]) + 1 for i in range(n)
    }
    medoids = tuple(
        Medoid(candidate_id=ids[i], responses=tuple(grouped[ids[i]]))
        for i in medoid_idx
    )
    return ClusterModel(
        k=k,
        medoids=medoids,
        assignments=assignments,
        objective=best_obj,
        metadata={"swap_iterations": iterations, "converged": converged},
    )


def classify_candidate(
    responses: list[ResponseExpression],
    model: ClusterModel,
    config: EngineConfig = EngineConfig(),
) -> int:
    """Class of the medoid with maximum response affinity; ties go low."""
    if not model.medoids:
        raise EmptyModel("cluster model has no medoids")
    check_responses(responses, config)
    best_class = None
    best_aff = -np.inf
    for class_number, medoid in enumerate(model.medoids, start=1):
        aff = candidate_affinity(responses, list(medoid.responses), config)
        if aff > best_aff:
            best_aff = aff
            best_class = class_number
    assert best_class is not None
    return best_class


def classify_profile(
    profile: EmotionVector,
    model: ClusterModel,
    lexicon: Lexicon,
    variants: dict[str, VariantFeatures],
    config: EngineConfig = EngineConfig(),
) -> int:
    """Class of the medoid whose emotion vector best matches the profile."""
    if not model.medoids:
        raise EmptyModel("cluster model has no medoids")
    best_class = None
    best_aff = -np.inf
    for class_number, medoid in enumerate(model.medoids, start=1):
        medoid_ev = derive_emotion_vector(
            list(medoid.responses), lexicon, variants, config
        )
        aff = profile_affinity(profile, medoid_ev)
        if aff > best_aff:
            best_aff = aff
            best_class = class_number
    assert best_class is not None
    return best_class


def model_to_dict(model: ClusterModel) -> dict:
    """JSON-ready form of a cluster model; round-trip stable."""
    return {
        "version": MODEL_SCHEMA_VERSION,
        "k": model.k,
        "medoids": [
            {
                "candidate_id": medoid.candidate_id,
                "responses": [
                    {
                        "candidate": r.candidate_id,
                        "stimulus": r.stimulus_id,
                        "variant": r.variant_id,
                        "context": r.context_id,
                        "rating": r.rating,
                    }
                    for r in medoid.responses
                ],
            }
            for medoid in model.medoids
        ],
        "assignments": dict(sorted(model.assignments.items())),
        "objective": model.objective,
        "metadata": model.metadata,
    }


def model_from_dict(raw: dict) -> ClusterModel:
    if raw.get("version") != MODEL_SCHEMA_VERSION:
        raise ValidationError(
            f"model document must declare version {MODEL_SCHEMA_VERSION}"
        )
    medoids = tuple(
        Medoid(
            candidate_id=m["candidate_id"],
            responses=tuple(
                ResponseExpression(
                    candidate_id=r["candidate"],
                    stimulus_id=r["stimulus"],
                    variant_id=r["variant"],
                    context_id=r["context"],
                    rating=r["rating"],
                )
                for r in m["responses"]
            ),
        )
        for m in raw["medoids"]
    )
    return ClusterModel(
        k=raw["k"],
        medoids=medoids,
        assignments={cid: int(c) for cid, c in raw["assignments"].items()},
        objective=float(raw["objective"]),
        metadata=raw.get("metadata", {}),
    )
