"""Scikit-learn style wrappers over the learning pipeline.

``EmotionVectorizer`` turns raw response datasets into emotion-vector
rows; ``AffinityKMedoids`` is the fit/predict face of the affinity
clustering. Both take plain response lists instead of feature matrices,
but expose get_params/set_params and fitted attributes with trailing
underscores so they compose with the surrounding ecosystem (grid search,
cloning, pipelines fed by the vectorizer's output).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .config import EngineConfig
from .core import ResponseExpression, VariantFeatures
from .learning import (
    classify_candidate,
    cluster_candidates,
    derive_emotion_vector,
    derive_personality_vector,
)
from .lexicon import Lexicon
from .validation import check_dataset


class EmotionVectorizer(BaseEstimator, TransformerMixin):
    """Transform response datasets into per-candidate emotion vectors.

    ``transform`` returns an (n_candidates, emotion_dims) array whose rows
    follow sorted candidate-id order; ``candidate_ids_`` after ``fit``
    records that order for the fitted dataset.
    """

    def __init__(
        self,
        lexicon: Lexicon | None = None,
        variants: dict[str, VariantFeatures] | None = None,
        config: EngineConfig | None = None,
    ):
        self.lexicon = lexicon
        self.variants = variants
        self.config = config

    def _require_params(self) -> tuple[Lexicon, dict, EngineConfig]:
        if self.lexicon is None or self.variants is None:
            raise ValueError("lexicon and variants must be set before use")
        return self.lexicon, self.variants, self.config or EngineConfig()

    def fit(self, X: list[ResponseExpression], y=None):
        _, _, config = self._require_params()
        grouped = check_dataset(X, config)
        self.candidate_ids_ = sorted(grouped)
        self.n_features_out_ = config.emotion_dims
        return self

    def transform(self, X: list[ResponseExpression]) -> np.ndarray:
        lexicon, variants, config = self._require_params()
        grouped = check_dataset(X, config)
        rows = [
            derive_emotion_vector(grouped[cid], lexicon, variants, config).as_array()
            for cid in sorted(grouped)
        ]
        return np.vstack(rows)

    def personality_matrix(self, X: list[ResponseExpression]) -> np.ndarray:
        """Companion to transform: personality-vector rows, same ordering."""
        lexicon, variants, config = self._require_params()
        grouped = check_dataset(X, config)
        rows = [
            derive_personality_vector(grouped[cid], lexicon, variants, config).as_array()
            for cid in sorted(grouped)
        ]
        return np.vstack(rows)

    def get_feature_names_out(self, input_features=None):
        lexicon, _, _ = self._require_params()
        return np.asarray(lexicon.taxonomy.names, dtype=object)


class AffinityKMedoids(BaseEstimator, ClusterMixin):
    """K-medoids over candidates with rating-agreement affinity.

    fit(X) clusters the candidates contained in a flat response list;
    predict(X) assigns new candidates to the class of their most similar
    medoid. ``labels_`` follows sorted candidate-id order (classes are
    1-based, matching the engine's emotional classes).
    """

    def __init__(self, k: int = 5, config: EngineConfig | None = None):
        self.k = k
        self.config = config

    def fit(self, X: list[ResponseExpression], y=None):
        config = self.config or EngineConfig()
        self.model_ = cluster_candidates(X, self.k, config)
        self.candidate_ids_ = sorted(self.model_.assignments)
        self.labels_ = np.asarray(
            [self.model_.assignments[cid] for cid in self.candidate_ids_]
        )
        self.medoid_ids_ = [m.candidate_id for m in self.model_.medoids]
        self.objective_ = self.model_.objective
        return self

    def predict(self, X: list[ResponseExpression]) -> np.ndarray:
        check_is_fitted(self, "model_")
        config = self.config or EngineConfig()
        grouped = check_dataset(X, config)
        return np.asarray(
            [
                classify_candidate(grouped[cid], self.model_, config)
                for cid in sorted(grouped)
            ]
        )
