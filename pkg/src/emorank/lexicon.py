"""Emotion lexicon: taxonomy, per-context word clusters, feature maps.

Lexicon file format (UTF-8 JSON, ``version: 1``)::

    {
      "version": 1,
      "taxonomy": ["devotion", "peace", ...],
      "words": [
        {"word": "sacred", "context": "news", "cluster": 1,
         "profile": [1.0, 0.0, 0.0, 0.0, 0.0]},
        ...
      ],
      "features": [
        {"kind": "color", "category": "white",
         "profile": [0.0, 1.0, 0.0, 0.0, 0.0]},
        ...
      ]
    }

Profiles must sum to 1 within 1e-6; they are renormalized exactly on load.
The lexicon is immutable after load and safe for concurrent reads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import EngineConfig
from .core import FEATURE_KINDS, EmotionVector, VariantFeatures
from .errors import (
    MissingProfile,
    ParseError,
    UnknownContext,
    ValidationError,
)
from .validation import as_emotion_vector

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class EmotionTaxonomy:
    """Ordered labels for the emotion dimensions."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise ValidationError("taxonomy must name at least one dimension")
        if any(not name for name in self.names):
            raise ValidationError("taxonomy labels must be non-empty")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("taxonomy labels must be unique")

    @property
    def dims(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class WordEntry:
    """One emotion-tagged word in one context's cluster."""

    word: str
    context_id: str
    cluster_id: int
    profile: EmotionVector

    def __post_init__(self) -> None:
        if not self.word:
            raise ValidationError("word must be non-empty")
        if not self.context_id:
            raise ValidationError("context_id must be non-empty")
        if self.cluster_id < 1:
            raise ValidationError("cluster_id must be >= 1")


@dataclass(frozen=True)
class Lexicon:
    """Immutable bundle of taxonomy, word entries, and feature profiles."""

    taxonomy: EmotionTaxonomy
    words: tuple[WordEntry, ...]
    features: dict[tuple[str, str], EmotionVector]

    def __post_init__(self) -> None:
        m = self.taxonomy.dims
        for entry in self.words:
            if entry.profile.dims != m:
                raise ValidationError(
                    f"word {entry.word!r} profile has {entry.profile.dims} dims, "
                    f"taxonomy has {m}"
                )
        for (kind, category), profile in self.features.items():
            if kind not in FEATURE_KINDS:
                raise ValidationError(f"unknown feature kind {kind!r}")
            if not category:
                raise ValidationError("feature category must be non-empty")
            if profile.dims != m:
                raise ValidationError(
                    f"feature {kind}/{category} profile has {profile.dims} dims"
                )

    @property
    def dims(self) -> int:
        return self.taxonomy.dims

    def contexts(self) -> list[str]:
        return sorted({w.context_id for w in self.words})

    def categories(self, kind: str) -> list[str]:
        """Mapped categories for one feature kind, sorted."""
        return sorted(cat for (k, cat) in self.features if k == kind)

    def feature_profile(self, kind: str, category: str) -> EmotionVector | None:
        return self.features.get((kind, category))


def load_lexicon(
    document: str | bytes | dict, config: EngineConfig | None = None
) -> Lexicon:
    """Parse and validate a lexicon document (JSON text or parsed dict)."""
    if isinstance(document, (str, bytes)):
        try:
            raw = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed lexicon document: {exc}") from exc
    else:
        raw = document
    if not isinstance(raw, dict):
        raise ParseError("lexicon document must be a JSON object")
    if raw.get("version") != SCHEMA_VERSION:
        raise ParseError(
            f"lexicon document must declare version {SCHEMA_VERSION}, "
            f"got {raw.get('version')!r}"
        )

    taxonomy_raw = raw.get("taxonomy")
    if not isinstance(taxonomy_raw, list) or not all(
        isinstance(t, str) for t in taxonomy_raw
    ):
        raise ParseError("taxonomy must be an array of strings")
    taxonomy = EmotionTaxonomy(tuple(taxonomy_raw))

    words_raw = raw.get("words", [])
    if not isinstance(words_raw, list):
        raise ParseError("words must be an array")
    words = []
    for i, entry in enumerate(words_raw):
        if not isinstance(entry, dict):
            raise ParseError(f"words[{i}] must be an object")
        try:
            profile = as_emotion_vector(entry["profile"])
            words.append(
                WordEntry(
                    word=entry["word"],
                    context_id=entry["context"],
                    cluster_id=int(entry["cluster"]),
                    profile=profile,
                )
            )
        except KeyError as exc:
            raise ParseError(f"words[{i}] missing key {exc}") from exc

    features_raw = raw.get("features", [])
    if not isinstance(features_raw, list):
        raise ParseError("features must be an array")
    features: dict[tuple[str, str], EmotionVector] = {}
    for i, entry in enumerate(features_raw):
        if not isinstance(entry, dict):
            raise ParseError(f"features[{i}] must be an object")
        try:
            key = (entry["kind"], entry["category"])
            profile = as_emotion_vector(entry["profile"])
        except KeyError as exc:
            raise ParseError(f"features[{i}] missing key {exc}") from exc
        if key in features:
            raise ValidationError(f"duplicate feature mapping {key}")
        features[key] = profile

    lexicon = Lexicon(taxonomy=taxonomy, words=tuple(words), features=features)
    if config is not None and lexicon.dims != config.emotion_dims:
        raise ValidationError(
            f"lexicon has {lexicon.dims} dims but config expects "
            f"{config.emotion_dims}"
        )
    if config is not None:
        for entry in lexicon.words:
            if entry.cluster_id > config.num_classes:
                raise ValidationError(
                    f"word {entry.word!r} cluster {entry.cluster_id} exceeds "
                    f"num_classes {config.num_classes}"
                )
    return lexicon


def load_lexicon_file(path: str | Path, config: EngineConfig | None = None) -> Lexicon:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read lexicon {path}: {exc}") from exc
    return load_lexicon(text, config)


def serialize_lexicon(lexicon: Lexicon) -> dict:
    """Inverse of load_lexicon; load(serialize(lex)) == lex."""
    return {
        "version": SCHEMA_VERSION,
        "taxonomy": list(lexicon.taxonomy.names),
        "words": [
            {
                "word": w.word,
                "context": w.context_id,
                "cluster": w.cluster_id,
                "profile": list(w.profile.values),
            }
            for w in lexicon.words
        ],
        "features": [
            {"kind": kind, "category": category, "profile": list(profile.values)}
            for (kind, category), profile in sorted(lexicon.features.items())
        ],
    }


def words_for_cluster(
    lexicon: Lexicon, context_id: str, cluster_id: int
) -> list[WordEntry]:
    """All entries for (context, cluster), sorted lexicographically by word."""
    in_context = [w for w in lexicon.words if w.context_id == context_id]
    if not in_context:
        raise UnknownContext(f"no lexicon entries for context {context_id!r}")
    matches = [w for w in in_context if w.cluster_id == cluster_id]
    return sorted(matches, key=lambda w: w.word)


def words_for_context(lexicon: Lexicon, context_id: str) -> list[WordEntry]:
    """All entries for a context regardless of cluster, sorted by word."""
    in_context = [w for w in lexicon.words if w.context_id == context_id]
    if not in_context:
        raise UnknownContext(f"no lexicon entries for context {context_id!r}")
    return sorted(in_context, key=lambda w: w.word)


def word_profile(lexicon: Lexicon, word: str) -> EmotionVector | None:
    """Profile for a word, averaged over every context it appears in."""
    profiles = [w.profile for w in lexicon.words if w.word == word]
    if not profiles:
        return None
    stacked = np.stack([p.as_array() for p in profiles])
    return EmotionVector.from_weights(stacked.mean(axis=0))


def cluster_profile(lexicon: Lexicon, cluster_id: int) -> EmotionVector | None:
    """Mean profile of every word tagged with a cluster id, any context."""
    profiles = [w.profile for w in lexicon.words if w.cluster_id == cluster_id]
    if not profiles:
        return None
    stacked = np.stack([p.as_array() for p in profiles])
    return EmotionVector.from_weights(stacked.mean(axis=0))


def variant_profile(features: VariantFeatures, lexicon: Lexicon) -> EmotionVector:
    """Emotion profile of a variant: equal-weight mean of resolved components.

    Components, in turn: mapped color/shape/background categories, each
    inscribed word found in the lexicon, and (only when no inscribed words
    are given) the mean profile of the text cluster's words. Unresolvable
    components are skipped; if none resolve, MissingProfile is raised.

    Inscribed words are accumulated in sorted order so the result is
    bit-identical under reordering.
    """
    components: list[np.ndarray] = []

    for kind in FEATURE_KINDS:
        category = getattr(features, kind)
        if category is None:
            continue
        profile = lexicon.feature_profile(kind, category)
        if profile is not None:
            components.append(profile.as_array())

    if features.inscribed_words:
        for word in sorted(features.inscribed_words):
            profile = word_profile(lexicon, word)
            if profile is not None:
                components.append(profile.as_array())
    elif features.text_cluster is not None:
        profile = cluster_profile(lexicon, features.text_cluster)
        if profile is not None:
            components.append(profile.as_array())

    if not components:
        raise MissingProfile(
            f"no component of {features.to_dict()} resolves to a profile"
        )
    mean = np.stack(components).mean(axis=0)
    return EmotionVector.from_weights(mean)
