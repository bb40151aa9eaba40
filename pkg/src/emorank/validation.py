"""Input validation helpers shared by the library, CLI, and service.

These are the checks that need an :class:`EngineConfig` to evaluate
(rating bounds, vector dimensions) and therefore cannot live inside the
frozen dataclasses themselves.
"""

from __future__ import annotations

import logging

from .config import EngineConfig
from .core import EmotionVector, ResponseExpression, responses_by_key
from .errors import DimensionMismatch, OutOfRangeRating, ValidationError

logger = logging.getLogger(__name__)


def check_rating(value: int, config: EngineConfig) -> int:
    """Reject a rating outside [0, rating_max]."""
    if not isinstance(value, int) or isinstance(value, bool):
        raise OutOfRangeRating(f"rating must be an integer, got {value!r}")
    if not 0 <= value <= config.rating_max:
        raise OutOfRangeRating(
            f"rating {value} outside [0, {config.rating_max}]"
        )
    return value


def clamp_rating(value: int, config: EngineConfig) -> int:
    """Clamp a rating into [0, rating_max], warning when it was outside.

    Ingest paths use this instead of :func:`check_rating` because published
    data contains occasional out-of-scale values.
    """
    clamped = min(max(int(value), 0), config.rating_max)
    if clamped != value:
        logger.warning(
            "rating %s outside [0, %s]; clamped to %s", value, config.rating_max, clamped
        )
    return clamped


def check_responses(
    responses: list[ResponseExpression], config: EngineConfig
) -> list[ResponseExpression]:
    """Validate a single candidate's response list: bounds plus unique keys."""
    for resp in responses:
        check_rating(resp.rating, config)
    responses_by_key(responses)  # raises DuplicateResponse
    return responses


def check_dataset(
    responses: list[ResponseExpression], config: EngineConfig
) -> dict[str, list[ResponseExpression]]:
    """Group a multi-candidate dataset by candidate, validating each group."""
    grouped: dict[str, list[ResponseExpression]] = {}
    for resp in responses:
        grouped.setdefault(resp.candidate_id, []).append(resp)
    for candidate_responses in grouped.values():
        check_responses(candidate_responses, config)
    return grouped


def check_emotion_vector(ev: EmotionVector, config: EngineConfig) -> EmotionVector:
    """Reject a profile whose length does not match the configured dims."""
    if ev.dims != config.emotion_dims:
        raise DimensionMismatch(
            f"expected {config.emotion_dims} dims, got {ev.dims}"
        )
    return ev


def as_emotion_vector(values, config: EngineConfig | None = None) -> EmotionVector:
    """Coerce a raw sequence into an EmotionVector, renormalizing near-1 sums.

    Accepts profiles whose entries sum to 1 within 1e-6 (then renormalizes
    exactly); anything further off is rejected.
    """
    try:
        raw = [float(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"profile entries must be numbers: {exc}") from exc
    total = sum(raw)
    if abs(total - 1.0) > 1e-6:
        raise ValidationError(f"profile must sum to 1 (got {total!r})")
    if any(v < 0 for v in raw):
        raise ValidationError("profile entries must be >= 0")
    ev = EmotionVector.from_weights(raw)
    if config is not None:
        check_emotion_vector(ev, config)
    return ev
