"""Emotion-aware personalization engine.

Learn reader emotion profiles from rated stimulus variants, cluster
readers into emotional classes by affinity, embed emotions into headlines
and ad features for a target reader, and rank items per reader.
"""

from .config import EngineConfig, load_config
from .core import (
    CandidateProfile,
    EmotionVector,
    PersonalityVector,
    ResponseExpression,
    VariantFeatures,
    candidate_affinity,
    profile_affinity,
)
from .datastore import ProfileStore, load_table_fixtures
from .embedding import (
    CoveragePolicy,
    DiscriminationPolicy,
    EmbeddedVariant,
    HeadlineTemplate,
    SlotToken,
    embed_headline,
    generate_variant_set,
    select_features,
)
from .errors import EngineError
from .estimators import AffinityKMedoids, EmotionVectorizer
from .evaluation import (
    AccuracyReport,
    RankComparison,
    SyntheticPopulation,
    class_accuracy,
    exact_match_rate,
    generate_population,
    run_experiment,
)
from .learning import (
    ClusterModel,
    classify_candidate,
    classify_profile,
    cluster_candidates,
    derive_emotion_vector,
    derive_personality_vector,
)
from .lexicon import Lexicon, load_lexicon, load_lexicon_file, variant_profile, words_for_cluster
from .ranking import RankedItem, expected_rank, rank_items
from .sessions import SessionManager
from .server import create_app

__version__ = "0.1.0"

__all__ = [
    "AffinityKMedoids",
    "AccuracyReport",
    "CandidateProfile",
    "ClusterModel",
    "CoveragePolicy",
    "DiscriminationPolicy",
    "EmbeddedVariant",
    "EmotionVector",
    "EmotionVectorizer",
    "EngineConfig",
    "EngineError",
    "HeadlineTemplate",
    "Lexicon",
    "PersonalityVector",
    "ProfileStore",
    "RankComparison",
    "RankedItem",
    "ResponseExpression",
    "SessionManager",
    "SlotToken",
    "SyntheticPopulation",
    "VariantFeatures",
    "candidate_affinity",
    "class_accuracy",
    "classify_candidate",
    "classify_profile",
    "cluster_candidates",
    "create_app",
    "derive_emotion_vector",
    "derive_personality_vector",
    "embed_headline",
    "exact_match_rate",
    "expected_rank",
    "generate_population",
    "generate_variant_set",
    "load_config",
    "load_lexicon",
    "load_lexicon_file",
    "load_table_fixtures",
    "profile_affinity",
    "rank_items",
    "run_experiment",
    "select_features",
    "variant_profile",
    "words_for_cluster",
]
