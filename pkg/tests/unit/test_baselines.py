"""Unit tests for PersonalTop, TIFUKNN and the due-date oracle"""
import logging

import numpy as np
import pytest

from app.domain.baselines import (
    DueDateOracleRanker,
    PersonalTopRanker,
    TifuKnnRanker,
    TifuPopulation,
    personal_top_rank,
    tifu_build_vector,
    tifu_rank,
)
from app.domain.baselines.oracle import days_from_due
from app.domain.baselines.tifuknn import group_baskets, tifu_scores
from app.domain.services.signal_service import build_eval_set, build_example
from app.schemas.baselines import TifuConfig
from app.schemas.synth import PlantedCadence
from tests.conftest import make_history


@pytest.fixture
def five_users():
    return [
        make_history("u1", {0: ["a", "b"], 4: ["a"], 9: ["a", "c"]}),
        make_history("u2", {1: ["b"], 3: ["b", "d"], 8: ["d"]}),
        make_history("u3", {0: ["a"], 2: ["c"], 6: ["a", "c"], 12: ["e"]}),
        make_history("u4", {5: ["e", "b"], 7: ["e"]}),
        make_history("u5", {0: ["a", "d"], 10: ["a", "d", "e"]}),
    ]


class TestPersonalTop:
    def test_count_then_recency(self):
        history = make_history("u1", {0: ["milk", "jam"], 3: ["milk", "jam"], 5: ["milk", "eggs"], 8: ["eggs"]})
        assert personal_top_rank(history, 10, 3) == ["milk", "eggs", "jam"]

    def test_single_item(self):
        assert personal_top_rank(make_history("u1", {0: ["tea"], 4: ["tea"]}), 9, 5) == ["tea"]

    def test_only_days_before_query_count(self):
        history = make_history("u1", {0: ["a"], 1: ["b"], 2: ["b"], 3: ["a"], 4: ["a"]})
        assert personal_top_rank(history, 3, 2) == ["b", "a"]

    def test_ranker_agrees_with_direct_rule(self, grocery_histories):
        for example in build_eval_set(grocery_histories, None, 28, 512).examples:
            history = next(h for h in grocery_histories if h.user_id == example.user_id)
            assert PersonalTopRanker().rank(example, 10) == personal_top_rank(history, example.query_day, 10)

    def test_invariant_to_input_pair_order(self):
        pairs = [(0, ["a", "b"]), (3, ["b"]), (7, ["c", "a"])]
        forward = make_history("u", dict(pairs))
        backward = make_history("u", dict(reversed(pairs)))
        assert personal_top_rank(forward, 10, 3) == personal_top_rank(backward, 10, 3)


class TestTifuVector:
    def test_single_basket_is_indicator(self):
        vector = tifu_build_vector(make_history("u", {3: ["a", "b"], 9: ["c"]}), 9, TifuConfig())
        assert vector == {"a": 1.0, "b": 1.0}

    def test_decay_free_limit_is_frequency(self):
        history = make_history("u", {0: ["a", "b"], 1: ["a"], 2: ["a", "c"], 3: ["b"]})
        vector = tifu_build_vector(history, 4, TifuConfig(groups=2, within_decay=1.0, group_decay=1.0))
        assert vector == pytest.approx({"a": 3 / 4, "b": 2 / 4, "c": 1 / 4})

    def test_three_baskets_one_group(self):
        history = make_history("u", {0: ["a"], 1: ["a", "b"], 2: ["b"]})
        vector = tifu_build_vector(history, 3, TifuConfig(groups=1, within_decay=0.5))
        assert vector == pytest.approx({"a": (0.25 + 0.5) / 3, "b": (0.5 + 1.0) / 3})

    def test_matches_recurrence(self):
        days = {d: [chr(ord("a") + (d * 7) % 5), chr(ord("a") + d % 3)] for d in range(11)}
        history = make_history("u", days)
        config = TifuConfig(groups=3, within_decay=0.8, group_decay=0.6)
        baskets = history.before(11)
        # groups of sizes 5, 3, 3 (oldest absorbs the remainder)
        groups = [baskets[:5], baskets[5:8], baskets[8:]]
        expected: dict[str, float] = {}
        for g, group in enumerate(groups, start=1):
            group_vector: dict[str, float] = {}
            for j, basket in enumerate(group, start=1):
                for item in basket.items:
                    group_vector[item] = group_vector.get(item, 0.0) + 0.8 ** (len(group) - j) / len(group)
            for item, value in group_vector.items():
                expected[item] = expected.get(item, 0.0) + 0.6 ** (3 - g) * value / 3
        assert tifu_build_vector(history, 11, config) == pytest.approx(expected)

    def test_grouping(self):
        baskets = tuple(range(10))
        assert [len(g) for g in group_baskets(baskets, 3)] == [4, 3, 3]
        assert [len(g) for g in group_baskets(baskets[:2], 7)] == [1, 1]
        assert group_baskets((), 7) == []

    def test_entries_bounded(self, five_users):
        for history in five_users:
            vector = tifu_build_vector(history, history.target.day + 1, TifuConfig())
            assert all(0.0 < value <= 1.0 for value in vector.values())


class TestTifuRank:
    def test_alpha_one_sorts_own_vector(self, five_users):
        config = TifuConfig(alpha=1.0, k_nn=2)
        population = TifuPopulation.build(five_users[1:], config)
        example = build_example(five_users[0], five_users[0].target, 28, 512)
        own = tifu_build_vector(five_users[0], example.query_day, config)
        expected = sorted(example.candidates, key=lambda i: (-own[i], i))
        assert tifu_rank(own, population, config, example, 10) == expected

    def test_zero_neighbours_equals_own_vector(self, five_users):
        population = TifuPopulation.build(five_users[1:], TifuConfig())
        example = build_example(five_users[0], five_users[0].target, 28, 512)
        own = tifu_build_vector(five_users[0], example.query_day, TifuConfig())
        np.testing.assert_array_equal(
            tifu_scores(own, population, TifuConfig(k_nn=0), example.candidates),
            tifu_scores(own, population, TifuConfig(alpha=1.0), example.candidates),
        )

    def test_duplicate_user_is_nearest(self, five_users):
        config = TifuConfig()
        twin = make_history("twin", {b.day: b.items for b in five_users[2].baskets})
        population = TifuPopulation.build(five_users + [twin], config)
        own = tifu_build_vector(five_users[2], five_users[2].target.day + 1, config)
        nearest = population.nearest(own, 1, exclude="u3")
        assert population.user_ids[nearest[0]] == "twin"
        assert population.distances(own)[nearest[0]] == pytest.approx(0.0, abs=1e-6)

    def test_brute_force_oracle(self, five_users):
        config = TifuConfig(k_nn=2, alpha=0.6, groups=2)
        train, query = five_users[:4], five_users[4]
        population = TifuPopulation.build(train, config)
        example = build_example(query, query.target, 28, 512)
        own = tifu_build_vector(query, example.query_day, config)

        items = sorted({"a", "b", "c", "d", "e"})
        dense = {h.user_id: tifu_build_vector(h, h.target.day + 1, config) for h in train}
        own_dense = np.array([own.get(i, 0.0) for i in items])
        distances = {
            user: np.linalg.norm(own_dense - np.array([v.get(i, 0.0) for i in items])) for user, v in dense.items()
        }
        neighbours = sorted(distances, key=lambda u: (distances[u], u))[:2]
        mean = {i: np.mean([dense[u].get(i, 0.0) for u in neighbours]) for i in items}
        expected = [0.6 * own.get(i, 0.0) + 0.4 * mean[i] for i in example.candidates]

        np.testing.assert_allclose(tifu_scores(own, population, config, example.candidates), expected, rtol=1e-12)

    def test_self_excluded_from_neighbours(self, five_users):
        config = TifuConfig(k_nn=1, alpha=0.0)
        population = TifuPopulation.build(five_users, config)
        ranker = TifuKnnRanker(population, {h.user_id: h for h in five_users}, config)
        example = build_example(five_users[0], five_users[0].target, 28, 512)
        own = ranker.own_vector(example)
        assert population.user_ids[population.nearest(own, 1, exclude="u1")[0]] != "u1"
        assert ranker.rank(example, 10) == tifu_rank(own, population, config, example, 10, exclude="u1")

    def test_warns_when_population_is_small(self, five_users, caplog):
        with caplog.at_level(logging.WARNING):
            TifuKnnRanker(TifuPopulation.build(five_users, TifuConfig()), {}, TifuConfig(k_nn=300))
        assert "exceeds" in caplog.text


class TestDueDateOracle:
    def test_days_from_due(self):
        assert days_from_due(14, 7, 0) == 0
        assert days_from_due(15, 7, 0) == 1
        assert days_from_due(13, 7, 0) == 1
        assert days_from_due(17, 7, 0) == 3

    def test_due_items_first_and_unplanted_last(self):
        history = make_history("u1", {0: ["p1", "d1"], 3: ["p2"], 7: ["p1", "p2"], 14: ["p1"]})
        planted = [PlantedCadence(user="u1", item="p1", period=7, phase=0), PlantedCadence(user="u1", item="p2", period=4, phase=3)]
        example = build_example(history, history.target, 28, 512)
        assert DueDateOracleRanker(planted).rank(example, 3) == ["p1", "p2", "d1"]
