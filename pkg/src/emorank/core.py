"""Core domain types and affinity computations.

Two similarity measures anchor the engine:

* ``candidate_affinity`` compares two readers by how closely their ratings
  agree on the stimuli both of them rated: the mean of ``1 - |delta| / R``
  over shared (stimulus, variant, context) keys.
* ``profile_affinity`` compares two emotion profiles (simplex vectors) by
  their dot product, which is 1 exactly when both are the same one-hot
  vector and 0 when their supports are disjoint.

All types are immutable values; all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import EngineConfig
from .errors import (
    DimensionMismatch,
    DuplicateResponse,
    NoSharedStimuli,
    ValidationError,
)

# A response is keyed by what was shown, not by who rated it.
StimulusKey = tuple[str, str, str]

FEATURE_KINDS = ("color", "shape", "background")


@dataclass(frozen=True)
class ResponseExpression:
    """One candidate's 0..R rating of one stimulus variant in one context."""

    candidate_id: str
    stimulus_id: str
    variant_id: str
    context_id: str
    rating: int

    def __post_init__(self) -> None:
        for name in ("candidate_id", "stimulus_id", "variant_id", "context_id"):
            if not getattr(self, name):
                raise ValidationError(f"{name} must be non-empty")
        if self.rating < 0:
            raise ValidationError(f"rating must be >= 0, got {self.rating}")

    @property
    def stimulus_key(self) -> StimulusKey:
        return (self.stimulus_id, self.variant_id, self.context_id)


@dataclass(frozen=True)
class EmotionVector:
    """A normalized profile over emotion dimensions (entries >= 0, sum 1)."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValidationError("emotion vector must have at least one entry")
        arr = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValidationError("emotion vector entries must be finite")
        if np.any(arr < 0):
            raise ValidationError("emotion vector entries must be >= 0")
        if abs(float(arr.sum()) - 1.0) > 1e-9:
            raise ValidationError(
                f"emotion vector entries must sum to 1, got {float(arr.sum())!r}"
            )

    @classmethod
    def from_weights(cls, weights) -> "EmotionVector":
        """Normalize a non-negative weight vector to the simplex.

        Raises ValidationError on a zero or negative total; callers that
        want a uniform fallback handle the zero case themselves.
        """
        arr = np.asarray(weights, dtype=float)
        total = float(arr.sum())
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValidationError("weights must be finite and >= 0")
        if total <= 0:
            raise ValidationError("weights must have a positive sum")
        return cls(tuple(float(v) for v in arr / total))

    @classmethod
    def uniform(cls, m: int) -> "EmotionVector":
        return cls((1.0 / m,) * m)

    @classmethod
    def one_hot(cls, dim: int, m: int) -> "EmotionVector":
        if not 0 <= dim < m:
            raise ValidationError(f"dimension {dim} out of range for m={m}")
        values = [0.0] * m
        values[dim] = 1.0
        return cls(tuple(values))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def dims(self) -> int:
        return len(self.values)

    def argmax_dim(self) -> int:
        """Index of the largest entry; ties go to the lowest index."""
        return int(np.argmax(self.as_array()))


@dataclass(frozen=True)
class PersonalityVector:
    """Per-dimension preference intensities in [0, 1].

    ``support`` flags dimensions that received at least one response;
    unsupported entries are exactly 0.
    """

    values: tuple[float, ...]
    support: tuple[bool, ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.support):
            raise ValidationError("values and support must have equal length")
        for v, s in zip(self.values, self.support):
            if not np.isfinite(v) or not 0.0 <= v <= 1.0:
                raise ValidationError(f"personality entries must be in [0, 1], got {v}")
            if not s and v != 0.0:
                raise ValidationError("unsupported entries must be exactly 0")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    @property
    def dims(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class VariantFeatures:
    """Affective features of one stimulus variant.

    All fields are optional but at least one must be present. Feature
    categories are symbolic labels resolved against a lexicon; the engine
    never renders them.
    """

    color: str | None = None
    shape: str | None = None
    background: str | None = None
    presentation_order: int | None = None
    text_cluster: int | None = None
    inscribed_words: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if all(
            getattr(self, name) is None
            for name in (
                "color",
                "shape",
                "background",
                "presentation_order",
                "text_cluster",
                "inscribed_words",
            )
        ):
            raise ValidationError("variant features must set at least one field")
        if self.presentation_order is not None and self.presentation_order < 0:
            raise ValidationError("presentation_order must be >= 0")
        if self.text_cluster is not None and self.text_cluster < 1:
            raise ValidationError("text_cluster must be >= 1")

    def to_dict(self) -> dict:
        out: dict = {}
        for name in ("color", "shape", "background", "presentation_order", "text_cluster"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        if self.inscribed_words is not None:
            out["inscribed_words"] = list(self.inscribed_words)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "VariantFeatures":
        words = raw.get("inscribed_words")
        return cls(
            color=raw.get("color"),
            shape=raw.get("shape"),
            background=raw.get("background"),
            presentation_order=raw.get("presentation_order"),
            text_cluster=raw.get("text_cluster"),
            inscribed_words=tuple(words) if words is not None else None,
        )


@dataclass(frozen=True)
class CandidateProfile:
    """A candidate's learned profile; class is None until classified."""

    candidate_id: str
    pv: PersonalityVector
    ev: EmotionVector
    emotional_class: int | None = None

    def __post_init__(self) -> None:
        if self.pv.dims != self.ev.dims:
            raise DimensionMismatch(
                f"pv has {self.pv.dims} dims but ev has {self.ev.dims}"
            )
        if self.emotional_class is not None and self.emotional_class < 1:
            raise ValidationError("emotional_class must be >= 1")


def responses_by_key(
    responses: list[ResponseExpression],
) -> dict[StimulusKey, int]:
    """Index a response list by stimulus key, rejecting duplicates."""
    out: dict[StimulusKey, int] = {}
    for resp in responses:
        key = resp.stimulus_key
        if key in out:
            raise DuplicateResponse(f"duplicate response for stimulus key {key}")
        out[key] = resp.rating
    return out


def candidate_affinity(
    a: list[ResponseExpression],
    b: list[ResponseExpression],
    config: EngineConfig = EngineConfig(),
) -> float:
    """Mean rating agreement between two candidates over shared stimuli.

    Returns ``mean(1 - |rating_a - rating_b| / R)`` over the shared
    (stimulus, variant, context) keys. Symmetric; 1.0 exactly when the
    ratings agree on every shared key.
    """
    keyed_a = responses_by_key(a)
    keyed_b = responses_by_key(b)
    shared = keyed_a.keys() & keyed_b.keys()
    if not shared:
        raise NoSharedStimuli("response lists share no stimulus key")
    r = config.rating_max
    total = sum(1.0 - abs(keyed_a[key] - keyed_b[key]) / r for key in shared)
    return total / len(shared)


def profile_affinity(reader: EmotionVector, item_profile: EmotionVector) -> float:
    """Dot product of two simplex profiles, in [0, 1]."""
    if reader.dims != item_profile.dims:
        raise DimensionMismatch(
            f"profiles have {reader.dims} and {item_profile.dims} dims"
        )
    return float(np.dot(reader.as_array(), item_profile.as_array()))
