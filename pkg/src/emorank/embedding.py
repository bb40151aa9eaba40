"""Emotion embedding: choose words and affective features for a target reader.

A headline template is an ordered mix of literal tokens and slots. Each
slot draws from one context's lexicon words; the filled combination whose
profile has the highest affinity with the target emotion vector wins.
Searches are exhaustive up to a combination budget and greedy per slot
beyond it; every tie breaks toward the lexicographically smaller word or
category so results are reproducible.

Template file format (UTF-8 JSON, ``version: 1``)::

    {"version": 1, "tokens": [{"literal": "Tonight:"},
                              {"slot": "theme", "context": "news"}]}
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path

from .config import EngineConfig
from .core import (
    FEATURE_KINDS,
    EmotionVector,
    VariantFeatures,
    profile_affinity,
)
from .errors import (
    EmptySlotVocabulary,
    InsufficientVocabulary,
    MissingProfile,
    NoMappedCategory,
    ParseError,
    UnknownContext,
    ValidationError,
)
from .lexicon import Lexicon, cluster_profile, variant_profile, words_for_context

TEMPLATE_SCHEMA_VERSION = 1

EXHAUSTIVE_LIMIT = 4096


@dataclass(frozen=True)
class SlotToken:
    """A template position to be filled from one context's words."""

    name: str
    context_id: str

    def __post_init__(self) -> None:
        if not self.name or not self.context_id:
            raise ValidationError("slot name and context must be non-empty")


@dataclass(frozen=True)
class HeadlineTemplate:
    """Ordered literal strings and slots; slot names unique."""

    tokens: tuple[str | SlotToken, ...]

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValidationError("template must have at least one token")
        names = [t.name for t in self.tokens if isinstance(t, SlotToken)]
        if len(set(names)) != len(names):
            raise ValidationError("slot names must be unique within a template")

    @property
    def slots(self) -> tuple[SlotToken, ...]:
        return tuple(t for t in self.tokens if isinstance(t, SlotToken))

    def to_dict(self) -> dict:
        tokens = []
        for token in self.tokens:
            if isinstance(token, SlotToken):
                tokens.append({"slot": token.name, "context": token.context_id})
            else:
                tokens.append({"literal": token})
        return {"version": TEMPLATE_SCHEMA_VERSION, "tokens": tokens}

    @classmethod
    def from_dict(cls, raw: dict) -> "HeadlineTemplate":
        if not isinstance(raw, dict) or raw.get("version") != TEMPLATE_SCHEMA_VERSION:
            raise ParseError(
                f"template document must declare version {TEMPLATE_SCHEMA_VERSION}"
            )
        tokens: list[str | SlotToken] = []
        for i, entry in enumerate(raw.get("tokens", [])):
            if not isinstance(entry, dict):
                raise ParseError(f"tokens[{i}] must be an object")
            if "literal" in entry:
                tokens.append(str(entry["literal"]))
            elif "slot" in entry:
                tokens.append(SlotToken(name=entry["slot"], context_id=entry["context"]))
            else:
                raise ParseError(f"tokens[{i}] must carry 'literal' or 'slot'")
        return cls(tuple(tokens))


def load_template_file(path: str | Path) -> HeadlineTemplate:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read template {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed template {path}: {exc}") from exc
    return HeadlineTemplate.from_dict(raw)


@dataclass(frozen=True)
class EmbeddedVariant:
    """A fully resolved variant: headline text, features, profile, score."""

    headline: tuple[str, ...]
    features: VariantFeatures
    profile: EmotionVector
    score: float

    @property
    def text(self) -> str:
        return " ".join(self.headline)


def _merge_features(
    base: VariantFeatures | None, chosen_words: tuple[str, ...]
) -> VariantFeatures:
    """Base features plus the chosen slot words as inscribed text."""
    existing = base.inscribed_words if base and base.inscribed_words else ()
    words = existing + chosen_words
    return VariantFeatures(
        color=base.color if base else None,
        shape=base.shape if base else None,
        background=base.background if base else None,
        presentation_order=base.presentation_order if base else None,
        text_cluster=base.text_cluster if base else None,
        inscribed_words=words if words else None,
    )


def _score_combination(
    target: EmotionVector,
    chosen: tuple[str, ...],
    base: VariantFeatures | None,
    lexicon: Lexicon,
) -> tuple[float, EmotionVector, VariantFeatures]:
    features = _merge_features(base, chosen)
    profile = variant_profile(features, lexicon)
    return profile_affinity(target, profile), profile, features


def embed_headline(
    template: HeadlineTemplate,
    target: EmotionVector,
    lexicon: Lexicon,
    config: EngineConfig = EngineConfig(),
    features: VariantFeatures | None = None,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
) -> EmbeddedVariant:
    """Fill template slots to maximize affinity with the target profile.

    Exhaustive over all word combinations when their count is within
    ``exhaustive_limit``, greedy per slot (in template order) beyond it.
    Optional base ``features`` contribute to the variant profile alongside
    the chosen words and are the only profile source for slot-free
    templates.
    """
    slots = template.slots
    vocab: list[list[str]] = []
    for slot in slots:
        try:
            entries = words_for_context(lexicon, slot.context_id)
        except UnknownContext as exc:
            raise EmptySlotVocabulary(
                f"slot {slot.name!r}: no words for context {slot.context_id!r}"
            ) from exc
        vocab.append(sorted({w.word for w in entries}))

    if not slots:
        if features is None:
            raise MissingProfile("slot-free template needs base features for a profile")
        chosen: tuple[str, ...] = ()
        score, profile, merged = _score_combination(target, chosen, features, lexicon)
    else:
        combinations = 1
        for words in vocab:
            combinations *= len(words)
        if combinations <= exhaustive_limit:
            best = None
            for combo in itertools.product(*vocab):
                score, profile, merged = _score_combination(
                    target, combo, features, lexicon
                )
                # strict > keeps the first (lexicographically smallest) max
                if best is None or score > best[0]:
                    best = (score, profile, merged, combo)
            assert best is not None
            score, profile, merged, chosen = best
        else:
            picked: list[str] = []
            for slot_words in vocab:
                best = None
                for word in slot_words:
                    combo = tuple(picked) + (word,)
                    score, profile, merged = _score_combination(
                        target, combo, features, lexicon
                    )
                    if best is None or score > best[0]:
                        best = (score, profile, merged, word)
                assert best is not None
                picked.append(best[3])
            chosen = tuple(picked)
            score, profile, merged = best[0], best[1], best[2]

    word_iter = iter(chosen)
    headline = tuple(
        next(word_iter) if isinstance(token, SlotToken) else token
        for token in template.tokens
    )
    return EmbeddedVariant(headline=headline, features=merged, profile=profile, score=score)


def select_features(
    target: EmotionVector,
    lexicon: Lexicon,
    kinds: set[str] | frozenset[str],
) -> VariantFeatures:
    """Per feature kind, the mapped category maximizing target affinity."""
    unknown = set(kinds) - set(FEATURE_KINDS)
    if unknown:
        raise ValidationError(f"unknown feature kinds: {sorted(unknown)}")
    selected: dict[str, str] = {}
    for kind in sorted(kinds):
        best: tuple[float, str] | None = None
        for category in lexicon.categories(kind):
            profile = lexicon.feature_profile(kind, category)
            assert profile is not None
            score = profile_affinity(target, profile)
            if best is None or score > best[0]:
                best = (score, category)
        if best is None:
            raise NoMappedCategory(f"no mapped categories for kind {kind!r}")
        selected[kind] = best[1]
    return VariantFeatures(**selected)


def _ranked_categories(
    target: EmotionVector, lexicon: Lexicon, kind: str
) -> list[str]:
    scored = [
        (-profile_affinity(target, lexicon.feature_profile(kind, cat)), cat)
        for cat in lexicon.categories(kind)
    ]
    return [cat for _, cat in sorted(scored)]


def _ranked_clusters(target: EmotionVector, lexicon: Lexicon) -> list[int]:
    cluster_ids = sorted({w.cluster_id for w in lexicon.words})
    scored = []
    for cid in cluster_ids:
        profile = cluster_profile(lexicon, cid)
        if profile is not None:
            scored.append((-profile_affinity(target, profile), cid))
    return [cid for _, cid in sorted(scored)]


@dataclass(frozen=True)
class CoveragePolicy:
    """Spread variant themes round-robin over every emotion dimension."""


@dataclass(frozen=True)
class DiscriminationPolicy:
    """Concentrate variants on the two currently most probable dimensions."""

    focus_dims: tuple[int, int]

    def __post_init__(self) -> None:
        if len(self.focus_dims) != 2:
            raise ValidationError("discrimination policy needs exactly two dims")
        if any(d < 0 for d in self.focus_dims):
            raise ValidationError("focus dims must be >= 0")


RoundPolicy = CoveragePolicy | DiscriminationPolicy


def _affective_key(features: VariantFeatures) -> tuple:
    """Identity of a variant's percept, ignoring presentation order."""
    return (
        features.color,
        features.shape,
        features.background,
        features.text_cluster,
        features.inscribed_words,
    )


def generate_variant_set(
    base_stimulus: str,
    lexicon: Lexicon,
    count: int,
    policy: RoundPolicy,
    config: EngineConfig = EngineConfig(),
) -> list[VariantFeatures]:
    """`count` distinct variants of one base stimulus.

    Variant j targets one emotion dimension (round-robin per policy) and
    combines the best available color, background, and word cluster for
    that dimension; when the first choice is already used, ranked
    alternatives are tried in deterministic order.
    """
    if count < 2:
        raise ValidationError(f"count must be >= 2, got {count}")
    m = config.emotion_dims
    if isinstance(policy, DiscriminationPolicy):
        if any(d >= m for d in policy.focus_dims):
            raise ValidationError("focus dims out of range")
        dim_cycle = list(policy.focus_dims)
    else:
        dim_cycle = list(range(m))

    used: set[tuple] = set()
    variants: list[VariantFeatures] = []
    for j in range(count):
        dim = dim_cycle[j % len(dim_cycle)]
        target = EmotionVector.one_hot(dim, m)
        colors = _ranked_categories(target, lexicon, "color") or [None]
        backgrounds = _ranked_categories(target, lexicon, "background") or [None]
        clusters = _ranked_clusters(target, lexicon) or [None]
        if colors == [None] and backgrounds == [None] and clusters == [None]:
            raise InsufficientVocabulary(
                "lexicon maps no colors, backgrounds, or word clusters"
            )
        candidate = None
        for color, background, cluster in itertools.product(
            colors, backgrounds, clusters
        ):
            features = VariantFeatures(
                color=color,
                background=background,
                text_cluster=cluster,
                presentation_order=j,
            )
            key = _affective_key(features)
            if key not in used:
                candidate = features
                used.add(key)
                break
        if candidate is None:
            raise InsufficientVocabulary(
                f"only {len(variants)} distinct variants available for "
                f"{base_stimulus!r}, need {count}"
            )
        variants.append(candidate)
    return variants
