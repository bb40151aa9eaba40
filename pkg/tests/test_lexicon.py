import json

import numpy as np
import pytest

from emorank.config import EngineConfig
from emorank.core import VariantFeatures
from emorank.errors import (
    MissingProfile,
    ParseError,
    UnknownContext,
    ValidationError,
)
from emorank.lexicon import (
    load_lexicon,
    serialize_lexicon,
    variant_profile,
    words_for_cluster,
)

TAXONOMY = ["devotion", "peace", "excitement", "trust", "urgency"]


def one_hot(dim):
    profile = [0.0] * 5
    profile[dim] = 1.0
    return profile


def minimal_document(profile=None):
    return {
        "version": 1,
        "taxonomy": TAXONOMY,
        "words": [
            {"word": "calm", "context": "news", "cluster": 2,
             "profile": profile or one_hot(1)},
        ],
        "features": [],
    }


def table_shaped_document():
    """Five contexts, five clusters each, mirroring the published layout."""
    words = []
    for ctx in range(1, 6):
        for cluster in range(1, 6):
            for suffix in ("a", "b"):
                words.append(
                    {
                        "word": f"w{cluster}{suffix}",
                        "context": f"context-{ctx}",
                        "cluster": cluster,
                        "profile": one_hot(cluster - 1),
                    }
                )
    return {"version": 1, "taxonomy": TAXONOMY, "words": words, "features": []}


class TestLoadLexicon:
    def test_minimal_document(self):
        lex = load_lexicon(json.dumps(minimal_document()))
        assert len(lex.words) == 1
        assert lex.words[0].profile.values == (0.0, 1.0, 0.0, 0.0, 0.0)

    def test_profile_sum_half_rejected(self):
        doc = minimal_document(profile=[0.25, 0.25, 0.0, 0.0, 0.0])
        with pytest.raises(ValidationError):
            load_lexicon(doc)

    def test_near_one_profile_renormalized(self):
        third = 0.333333
        doc = minimal_document(profile=[third, third, 1 - 2 * third, 0.0, 0.0])
        lex = load_lexicon(doc)
        assert sum(lex.words[0].profile.values) == pytest.approx(1.0, abs=1e-12)

    def test_version_required(self):
        doc = minimal_document()
        del doc["version"]
        with pytest.raises(ParseError):
            load_lexicon(doc)

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            load_lexicon("{not json")

    def test_table_shaped_document(self):
        lex = load_lexicon(table_shaped_document())
        assert len(lex.words) == 50
        for ctx in range(1, 6):
            for cluster in range(1, 6):
                entries = words_for_cluster(lex, f"context-{ctx}", cluster)
                assert entries, (ctx, cluster)

    def test_config_dim_mismatch(self):
        with pytest.raises(ValidationError):
            load_lexicon(minimal_document(), EngineConfig(emotion_dims=3))

    def test_cluster_beyond_num_classes(self):
        doc = minimal_document()
        doc["words"][0]["cluster"] = 9
        with pytest.raises(ValidationError):
            load_lexicon(doc, EngineConfig())

    def test_round_trip(self):
        lex = load_lexicon(table_shaped_document())
        again = load_lexicon(json.dumps(serialize_lexicon(lex)))
        assert again == lex

    def test_default_lexicon_round_trip(self, lexicon):
        assert load_lexicon(serialize_lexicon(lexicon)) == lexicon


class TestWordsForCluster:
    def test_single_match(self):
        lex = load_lexicon(minimal_document())
        entries = words_for_cluster(lex, "news", 2)
        assert [w.word for w in entries] == ["calm"]

    def test_unknown_context(self):
        lex = load_lexicon(minimal_document())
        with pytest.raises(UnknownContext):
            words_for_cluster(lex, "nope", 1)

    def test_lexicographic_order(self):
        doc = minimal_document()
        doc["words"] = [
            {"word": w, "context": "news", "cluster": 2, "profile": one_hot(1)}
            for w in ("serene", "calm", "harmony")
        ]
        lex = load_lexicon(doc)
        assert [w.word for w in words_for_cluster(lex, "news", 2)] == [
            "calm",
            "harmony",
            "serene",
        ]

    def test_empty_cluster_in_known_context(self):
        lex = load_lexicon(minimal_document())
        assert words_for_cluster(lex, "news", 4) == []


class TestVariantProfile:
    def test_single_color(self, lexicon):
        profile = variant_profile(VariantFeatures(color="white"), lexicon)
        assert profile.values == (0.0, 1.0, 0.0, 0.0, 0.0)

    def test_two_components_average(self, lexicon):
        profile = variant_profile(
            VariantFeatures(color="saffron", background="meadow"), lexicon
        )
        assert profile.values == (0.5, 0.5, 0.0, 0.0, 0.0)

    def test_mixed_components_match_mean_oracle(self, lexicon):
        features = VariantFeatures(
            color="white", inscribed_words=("blessed", "breaking")
        )
        profile = variant_profile(features, lexicon)
        # independent oracle: plain mean of the three component profiles
        components = np.array(
            [
                [0.0, 1.0, 0.0, 0.0, 0.0],  # white
                [1.0, 0.0, 0.0, 0.0, 0.0],  # blessed
                [0.0, 0.0, 0.0, 0.0, 1.0],  # breaking
            ]
        )
        expected = components.mean(axis=0)
        assert np.allclose(profile.as_array(), expected, atol=1e-12)

    def test_word_order_does_not_matter(self, lexicon):
        forward = variant_profile(
            VariantFeatures(inscribed_words=("blessed", "breaking", "calm")), lexicon
        )
        backward = variant_profile(
            VariantFeatures(inscribed_words=("calm", "breaking", "blessed")), lexicon
        )
        assert forward.values == backward.values

    def test_text_cluster_uses_cluster_mean(self, lexicon):
        profile = variant_profile(VariantFeatures(text_cluster=2), lexicon)
        assert profile.values == (0.0, 1.0, 0.0, 0.0, 0.0)

    def test_inscribed_words_override_cluster(self, lexicon):
        profile = variant_profile(
            VariantFeatures(text_cluster=2, inscribed_words=("breaking",)), lexicon
        )
        assert profile.values == (0.0, 0.0, 0.0, 0.0, 1.0)

    def test_unresolvable_raises(self, lexicon):
        with pytest.raises(MissingProfile):
            variant_profile(VariantFeatures(color="chartreuse"), lexicon)

    def test_output_is_simplex(self, lexicon):
        profile = variant_profile(
            VariantFeatures(color="teal", inscribed_words=("saga",)), lexicon
        )
        assert sum(profile.values) == pytest.approx(1.0, abs=1e-9)
        assert all(v >= 0 for v in profile.values)
