import numpy as np
import pytest

from emorank.datastore import load_table_fixtures
from emorank.errors import (
    EmptyComparison,
    InvalidParams,
    UnclassifiedCandidate,
)
from emorank.evaluation import (
    RankComparison,
    actual_rank_at_least_share,
    actual_rank_share,
    class_accuracy,
    comparison_summary,
    exact_match_rate,
    generate_population,
    in_test_split,
    run_experiment,
)
from emorank.learning import cluster_candidates


class TestExactMatchRate:
    def test_published_rows_give_sixty_percent(self):
        fixtures = load_table_fixtures()
        assert exact_match_rate(fixtures.table2) == 0.6

    def test_all_matching(self):
        cmp = RankComparison(((1, 1), (2, 2), (3, 3)))
        assert exact_match_rate(cmp) == 1.0

    def test_rank_distribution_of_published_rows(self):
        fixtures = load_table_fixtures()
        # counted from the fixture column: three rows at 2, one at 3
        assert actual_rank_share(fixtures.table2, 2) == 0.3
        assert actual_rank_at_least_share(fixtures.table2, 3) == 0.1

    def test_empty_comparison(self):
        with pytest.raises(EmptyComparison):
            exact_match_rate(RankComparison(()))


class TestClassAccuracy:
    def test_published_per_class_values(self):
        fixtures = load_table_fixtures()
        outcomes = [
            (f"class{label}-c{i}", label, i < successes)
            for label, successes in fixtures.table3.items()
            for i in range(100)
        ]
        report = class_accuracy(outcomes)
        assert report.per_class == {0: 61.0, 1: 61.0, 2: 67.0, 3: 72.0, 4: 70.0}
        assert report.overall == pytest.approx(66.2, abs=1e-9)

    def test_single_candidate_success(self):
        report = class_accuracy([("only", 3, True)])
        assert report.per_class == {3: 100.0}
        assert report.overall == 100.0

    def test_matches_counting_oracle(self):
        rng = np.random.default_rng(23)
        outcomes = []
        for i in range(30):
            label = int(rng.integers(1, 4))
            outcomes.append((f"c{i}", label, bool(rng.integers(0, 2))))
        report = class_accuracy(outcomes)

        tally = {}
        for _, label, success in outcomes:
            total, good = tally.get(label, (0, 0))
            tally[label] = (total + 1, good + int(success))
        for label, (total, good) in tally.items():
            assert report.per_class[label] == pytest.approx(100.0 * good / total)
        expected_overall = 100.0 * sum(g for _, g in tally.values()) / 30
        assert report.overall == pytest.approx(expected_overall)

    def test_unclassified_candidate(self):
        with pytest.raises(UnclassifiedCandidate):
            class_accuracy([("ghost", None, True)])

    def test_class_lookup_via_model(self, config):
        from emorank.core import ResponseExpression

        dataset = []
        for cid, pattern in (("a", [4, 0]), ("b", [0, 4])):
            for i, rating in enumerate(pattern):
                dataset.append(
                    ResponseExpression(cid, f"s{i}", "v", "ctx", rating)
                )
        model = cluster_candidates(dataset, 2, config)
        report = class_accuracy([("a", None, True), ("b", None, False)], model)
        assert set(report.per_class) == {1, 2}

    def test_overall_is_weighted_mean(self):
        outcomes = [("a", 1, True), ("b", 1, False), ("c", 2, True)]
        report = class_accuracy(outcomes)
        assert report.overall == pytest.approx((50.0 * 2 + 100.0 * 1) / 3)


class TestGeneratePopulation:
    def test_zero_noise_ratings_are_extremes(self, lexicon, config):
        population = generate_population(5, 2, 0.0, 3, lexicon, config)
        for candidate in population.candidates:
            dim = candidate.true_class - 1
            for resp in candidate.responses:
                variant_dim = int(resp.variant_id.rsplit("v", 1)[1]) - 1
                if variant_dim == dim:
                    assert resp.rating == config.rating_max
                else:
                    assert resp.rating == 0

    def test_seeded_runs_are_identical(self, lexicon, config):
        a = generate_population(3, 4, 0.7, 99, lexicon, config)
        b = generate_population(3, 4, 0.7, 99, lexicon, config)
        assert a == b

    def test_different_seeds_differ(self, lexicon, config):
        a = generate_population(3, 4, 1.5, 1, lexicon, config)
        b = generate_population(3, 4, 1.5, 2, lexicon, config)
        assert a != b

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"k": 0},
            {"k": 6},
            {"per_class_count": 0},
            {"noise_level": -0.1},
        ],
    )
    def test_invalid_params(self, lexicon, config, kwargs):
        params = {"k": 3, "per_class_count": 2, "noise_level": 0.0, "seed": 1}
        params.update(kwargs)
        with pytest.raises(InvalidParams):
            generate_population(
                params["k"],
                params["per_class_count"],
                params["noise_level"],
                params["seed"],
                lexicon,
                config,
            )


class TestRunExperiment:
    def test_zero_noise_is_perfect(self, lexicon, config):
        population = generate_population(5, 10, 0.0, 7, lexicon, config)
        result = run_experiment(population, lexicon, config)
        assert exact_match_rate(result.rank_comparison) == 1.0
        assert result.classification_accuracy == 1.0
        for pct in result.accuracy_report.per_class.values():
            assert pct == 100.0

    def test_single_class_population(self, lexicon, config):
        population = generate_population(1, 12, 0.5, 5, lexicon, config)
        result = run_experiment(population, lexicon, config)
        assert set(result.accuracy_report.per_class) <= {1}
        assert result.metadata["train_size"] + result.metadata["test_size"] == 12

    def test_summary_fields(self, lexicon, config):
        population = generate_population(3, 8, 0.5, 11, lexicon, config)
        result = run_experiment(population, lexicon, config)
        summary = comparison_summary(result.rank_comparison)
        assert 0.0 <= summary["exact_match_rate"] <= 1.0
        assert summary["rows"] == result.metadata["test_size"]


class TestSplit:
    def test_split_is_stable(self):
        assert in_test_split("alpha") == in_test_split("alpha")

    def test_split_is_roughly_twenty_percent(self):
        ids = [f"cand-{i:05d}" for i in range(5000)]
        share = sum(in_test_split(cid) for cid in ids) / len(ids)
        assert 0.15 < share < 0.25
