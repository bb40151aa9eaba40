"""Evaluation: rank-match metrics, per-class accuracy, synthetic populations.

The published study's human dataset is not available, so pipeline-level
claims are checked on seeded synthetic populations: each emotional class
gets a one-hot prototype profile, candidates rate a battery of variants
with ratings ``clamp(round(R * affinity + gaussian(0, noise)))``, and an
experiment runner replays the full learn/classify/embed/rank loop against
the known prototypes.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .config import EngineConfig
from .core import (
    EmotionVector,
    ResponseExpression,
    VariantFeatures,
    profile_affinity,
)
from .embedding import (
    CoveragePolicy,
    HeadlineTemplate,
    SlotToken,
    embed_headline,
    generate_variant_set,
)
from .errors import (
    EmptyComparison,
    InvalidParams,
    UnclassifiedCandidate,
    ValidationError,
)
from .learning import ClusterModel, classify_candidate, cluster_candidates, derive_emotion_vector
from .lexicon import Lexicon, variant_profile
from .ranking import expected_rank, rank_items

DEFAULT_STIMULI_PER_CANDIDATE = 5

TEST_FRACTION_PERCENT = 20


@dataclass(frozen=True)
class RankComparison:
    """Expected-vs-actual rank rows for a set of recommendations."""

    rows: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for expected, actual in self.rows:
            if expected < 1 or actual < 1:
                raise ValidationError("ranks must be >= 1")


def exact_match_rate(cmp: RankComparison) -> float:
    """Fraction of rows whose actual rank equals the expected rank."""
    if not cmp.rows:
        raise EmptyComparison("rank comparison has no rows")
    matched = sum(1 for expected, actual in cmp.rows if expected == actual)
    return matched / len(cmp.rows)


def actual_rank_share(cmp: RankComparison, rank: int) -> float:
    """Fraction of rows whose actual rank equals ``rank``."""
    if not cmp.rows:
        raise EmptyComparison("rank comparison has no rows")
    return sum(1 for _, actual in cmp.rows if actual == rank) / len(cmp.rows)


def actual_rank_at_least_share(cmp: RankComparison, rank: int) -> float:
    """Fraction of rows whose actual rank is ``rank`` or worse."""
    if not cmp.rows:
        raise EmptyComparison("rank comparison has no rows")
    return sum(1 for _, actual in cmp.rows if actual >= rank) / len(cmp.rows)


def comparison_summary(cmp: RankComparison) -> dict:
    return {
        "rows": len(cmp.rows),
        "exact_match_rate": exact_match_rate(cmp),
        "rank_2_share": actual_rank_share(cmp, 2),
        "rank_3_plus_share": actual_rank_at_least_share(cmp, 3),
    }


@dataclass(frozen=True)
class AccuracyReport:
    """Per-class success percentages plus their candidate-weighted mean."""

    per_class: dict[int, float]
    per_class_counts: dict[int, int]
    overall: float

    def __post_init__(self) -> None:
        for label, pct in self.per_class.items():
            if not 0.0 <= pct <= 100.0:
                raise ValidationError(f"class {label} percentage {pct} out of range")
        if self.per_class:
            total = sum(self.per_class_counts.values())
            weighted = (
                sum(
                    self.per_class[label] * self.per_class_counts[label]
                    for label in self.per_class
                )
                / total
            )
            if abs(weighted - self.overall) > 1e-9:
                raise ValidationError(
                    f"overall {self.overall} is not the weighted mean {weighted}"
                )


def class_accuracy(
    results: list[tuple[str, int | None, bool]],
    model: ClusterModel | None = None,
) -> AccuracyReport:
    """Per-class percentage of candidates whose outcome succeeded.

    Each row is (candidate_id, class, success). A row without a class is
    looked up in the model's assignments; if it is nowhere, the candidate
    is unclassified and the report cannot be built.
    """
    successes: dict[int, int] = {}
    counts: dict[int, int] = {}
    for candidate_id, label, success in results:
        if label is None and model is not None:
            label = model.assignments.get(candidate_id)
        if label is None:
            raise UnclassifiedCandidate(f"candidate {candidate_id!r} has no class")
        counts[label] = counts.get(label, 0) + 1
        successes[label] = successes.get(label, 0) + int(success)
    per_class = {
        label: 100.0 * successes[label] / counts[label] for label in sorted(counts)
    }
    total = sum(counts.values())
    overall = (
        sum(per_class[label] * counts[label] for label in counts) / total
        if total
        else 0.0
    )
    return AccuracyReport(
        per_class=per_class,
        per_class_counts=dict(sorted(counts.items())),
        overall=overall,
    )


@dataclass(frozen=True)
class SyntheticCandidate:
    candidate_id: str
    true_class: int
    responses: tuple[ResponseExpression, ...]


@dataclass(frozen=True)
class SyntheticPopulation:
    """A seeded population with known class prototypes.

    ``variants`` maps every variant id used in the responses to its
    features so profiles can be re-derived downstream.
    """

    candidates: tuple[SyntheticCandidate, ...]
    prototypes: tuple[EmotionVector, ...]
    noise_level: float
    seed: int
    variants: dict[str, VariantFeatures]
    context_id: str = "news"

    @property
    def k(self) -> int:
        return len(self.prototypes)


def generate_population(
    k: int,
    per_class_count: int,
    noise_level: float,
    seed: int,
    lexicon: Lexicon,
    config: EngineConfig = EngineConfig(),
    stimuli_count: int = DEFAULT_STIMULI_PER_CANDIDATE,
    context_id: str = "news",
) -> SyntheticPopulation:
    """Deterministic synthetic population.

    Class c's prototype is one-hot on dimension c-1. Every candidate rates
    the same battery: ``stimuli_count`` stimuli, each shown in one variant
    per emotion dimension (coverage policy). A rating is
    ``clamp(round(R * affinity(prototype, variant profile) + noise * z))``
    with z drawn from a standard normal; the z-draws depend only on the
    seed, never on the noise level, so sweeps over noise reuse the same
    underlying randomness.
    """
    m = config.emotion_dims
    if k < 1 or k > m:
        raise InvalidParams(f"k must be in [1, {m}], got {k}")
    if per_class_count < 1:
        raise InvalidParams("per_class_count must be >= 1")
    if noise_level < 0:
        raise InvalidParams("noise_level must be >= 0")
    if stimuli_count < 1:
        raise InvalidParams("stimuli_count must be >= 1")

    prototypes = tuple(EmotionVector.one_hot(c - 1, m) for c in range(1, k + 1))

    base_features = generate_variant_set("battery", lexicon, max(m, 2), CoveragePolicy(), config)[:m]
    variants: dict[str, VariantFeatures] = {}
    battery: list[tuple[str, str, VariantFeatures]] = []  # (stimulus, variant, features)
    for s in range(1, stimuli_count + 1):
        stimulus_id = f"ad-{s}"
        for d, features in enumerate(base_features):
            variant_id = f"{stimulus_id}-v{d + 1}"
            variants[variant_id] = features
            battery.append((stimulus_id, variant_id, features))

    profiles = [variant_profile(features, lexicon) for _, _, features in battery]
    rng = np.random.default_rng(seed)
    r = config.rating_max

    candidates = []
    for c in range(1, k + 1):
        prototype = prototypes[c - 1]
        affinities = [profile_affinity(prototype, p) for p in profiles]
        for i in range(per_class_count):
            candidate_id = f"synth-c{c}-{i:04d}"
            noise = rng.standard_normal(len(battery))
            responses = tuple(
                ResponseExpression(
                    candidate_id=candidate_id,
                    stimulus_id=stimulus_id,
                    variant_id=variant_id,
                    context_id=context_id,
                    rating=int(np.clip(np.round(r * aff + noise_level * z), 0, r)),
                )
                for (stimulus_id, variant_id, _), aff, z in zip(
                    battery, affinities, noise
                )
            )
            candidates.append(
                SyntheticCandidate(
                    candidate_id=candidate_id, true_class=c, responses=responses
                )
            )
    return SyntheticPopulation(
        candidates=tuple(candidates),
        prototypes=prototypes,
        noise_level=noise_level,
        seed=seed,
        variants=variants,
        context_id=context_id,
    )


def in_test_split(candidate_id: str) -> bool:
    """Stable 80/20 split: a candidate lands in the test set by id hash."""
    digest = hashlib.sha256(candidate_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % 100 < TEST_FRACTION_PERCENT


@dataclass(frozen=True)
class ExperimentResult:
    """Outputs of one end-to-end experiment run."""

    rank_comparison: RankComparison
    accuracy_report: AccuracyReport
    classification_accuracy: float
    metadata: dict = field(default_factory=dict)


def run_experiment(
    population: SyntheticPopulation,
    lexicon: Lexicon,
    config: EngineConfig = EngineConfig(),
) -> ExperimentResult:
    """Replay the four-step pipeline on a synthetic population.

    Candidates split 80/20 by id hash; the training side is clustered and
    clusters are mapped to true classes by training majority. For every
    test candidate the engine derives their emotion vector, picks the best
    of one thematic item per dimension, embeds its headline, and records
    where the embedded recommendation lands in the candidate's true
    (prototype-defined) ranking: expected rank 1.
    """
    train = [c for c in population.candidates if not in_test_split(c.candidate_id)]
    test = [c for c in population.candidates if in_test_split(c.candidate_id)]
    if not train or not test:
        raise InvalidParams("population too small for an 80/20 split")

    train_responses = [r for c in train for r in c.responses]
    model = cluster_candidates(train_responses, population.k, config)

    # Map engine cluster numbers to true classes by training-set majority
    # (ties to the smaller true class).
    votes: dict[int, dict[int, int]] = {}
    for candidate in train:
        cluster = model.assignments[candidate.candidate_id]
        cluster_votes = votes.setdefault(cluster, {})
        cluster_votes[candidate.true_class] = (
            cluster_votes.get(candidate.true_class, 0) + 1
        )
    cluster_to_class = {
        cluster: min(
            class_votes, key=lambda label: (-class_votes[label], label)
        )
        for cluster, class_votes in votes.items()
    }

    m = config.emotion_dims
    item_ids = [f"item-{lexicon.taxonomy.names[d]}" for d in range(m)]
    base_profiles = {
        item_ids[d]: EmotionVector.one_hot(d, m) for d in range(m)
    }
    template = HeadlineTemplate(
        (SlotToken(name="theme", context_id=population.context_id), "news for you")
    )

    correct_class = 0
    rows: list[tuple[int, int]] = []
    outcomes: list[tuple[str, int | None, bool]] = []
    for candidate in test:
        responses = list(candidate.responses)
        cluster = classify_candidate(responses, model, config)
        if cluster_to_class.get(cluster) == candidate.true_class:
            correct_class += 1

        ev = derive_emotion_vector(responses, lexicon, population.variants, config)
        base_ranking = rank_items(ev, sorted(base_profiles.items()))
        recommended_id = base_ranking[0].item_id
        embedded = embed_headline(template, ev, lexicon, config)

        true_items = [
            (item_id, embedded.profile if item_id == recommended_id else profile)
            for item_id, profile in base_profiles.items()
        ]
        prototype = population.prototypes[candidate.true_class - 1]
        true_ranking = rank_items(prototype, true_items)
        actual = expected_rank(recommended_id, true_ranking)
        rows.append((1, actual))
        outcomes.append((candidate.candidate_id, candidate.true_class, actual == 1))

    comparison = RankComparison(tuple(rows))
    report = class_accuracy(outcomes)
    return ExperimentResult(
        rank_comparison=comparison,
        accuracy_report=report,
        classification_accuracy=correct_class / len(test),
        metadata={
            "train_size": len(train),
            "test_size": len(test),
            "noise_level": population.noise_level,
            "seed": population.seed,
            "k": population.k,
        },
    )
