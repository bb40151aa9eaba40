"""Engine configuration.

A single immutable value object carries the knobs shared by every module:
the number of emotion dimensions, the number of reader classes, the rating
scale ceiling, and the float comparison tolerance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError, ValidationError

DEFAULT_EMOTION_DIMS = 5
DEFAULT_NUM_CLASSES = 5
DEFAULT_RATING_MAX = 4
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class EngineConfig:
    """Global engine parameters.

    Attributes:
        emotion_dims: length of personality/emotion vectors (m).
        num_classes: number of reader classes / word clusters (k).
        rating_max: top of the 0..R rating scale (R).
        tolerance: absolute tolerance for float comparisons (epsilon).
    """

    emotion_dims: int = DEFAULT_EMOTION_DIMS
    num_classes: int = DEFAULT_NUM_CLASSES
    rating_max: int = DEFAULT_RATING_MAX
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self) -> None:
        if self.emotion_dims < 1:
            raise ValidationError(f"emotion_dims must be >= 1, got {self.emotion_dims}")
        if self.num_classes < 1:
            raise ValidationError(f"num_classes must be >= 1, got {self.num_classes}")
        if self.rating_max < 1:
            raise ValidationError(f"rating_max must be >= 1, got {self.rating_max}")
        if not self.tolerance > 0:
            raise ValidationError(f"tolerance must be > 0, got {self.tolerance}")

    def to_dict(self) -> dict:
        return {
            "emotion_dims": self.emotion_dims,
            "num_classes": self.num_classes,
            "rating_max": self.rating_max,
            "tolerance": self.tolerance,
        }


def load_config(path: str | Path) -> EngineConfig:
    """Read an :class:`EngineConfig` from a JSON file.

    Unknown keys are rejected so typos fail loudly.
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError(f"config {path} must be a JSON object")
    allowed = {"emotion_dims", "num_classes", "rating_max", "tolerance"}
    unknown = set(raw) - allowed
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return EngineConfig(**raw)
