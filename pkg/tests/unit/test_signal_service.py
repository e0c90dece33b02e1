"""Unit tests for cadence signals and example construction"""
import numpy as np
import pytest

from app.data.models.history import Basket
from app.domain.exceptions import ArtifactMismatchError, ConfigurationError, DataError
from app.domain.services.signal_service import (
    batch_collate,
    build_eval_set,
    build_example,
    build_signal,
    build_train_set,
    vocab_index,
)
from tests.conftest import make_history


class TestBuildSignal:
    def test_recent_purchases_set_expected_bits(self):
        history = make_history("u1", {92: ["milk"], 99: ["milk"]})
        bits = build_signal(history, "milk", query_day=100, window=14).bits
        assert np.flatnonzero(bits).tolist() == [6, 13]

    def test_purchases_before_window_are_dropped(self):
        history = make_history("u1", {0: ["milk"], 1: ["milk"]})
        assert not build_signal(history, "milk", query_day=100, window=14).bits.any()

    def test_weekly_item_over_a_year(self):
        query_day = 400
        history = make_history("u1", {query_day - 1 - 7 * j: ["milk"] for j in range(57)})
        bits = build_signal(history, "milk", query_day, 364).bits
        assert bits.sum() == 52
        # 1-based positions 7, 14, ..., 364 counted back from the query day
        assert np.flatnonzero(bits).tolist() == [t - 1 for t in range(7, 365, 7)]

    def test_never_bought_item(self, grocery_histories):
        assert build_signal(grocery_histories[0], "caviar", 22, 28).bitstring() == "0" * 28

    def test_window_must_be_positive(self, grocery_histories):
        with pytest.raises(ConfigurationError):
            build_signal(grocery_histories[0], "milk", 22, 0)

    def test_causal(self):
        history = make_history("u1", {3: ["milk"], 10: ["milk"]})
        later = make_history("u1", {3: ["milk"], 10: ["milk"], 11: ["milk"], 40: ["milk"]})
        np.testing.assert_array_equal(build_signal(history, "milk", 11, 28).bits, build_signal(later, "milk", 11, 28).bits)

    def test_shift_invariant(self, grocery_histories):
        for offset in (1, 13, 365):
            shifted = grocery_histories[0].shifted(offset)
            for item in ("milk", "eggs", "jam"):
                np.testing.assert_array_equal(
                    build_signal(grocery_histories[0], item, 21, 28).bits,
                    build_signal(shifted, item, 21 + offset, 28).bits,
                )

    def test_bit_count_matches_in_window_purchase_days(self, grocery_histories):
        alice = grocery_histories[0]
        assert build_signal(alice, "milk", 21, 14).bits.sum() == 2
        assert build_signal(alice, "milk", 21, 28).bits.sum() == 3


class TestBuildExample:
    def test_labels_from_target(self):
        history = make_history("u1", {0: ["milk"], 7: ["eggs"], 14: ["milk"]})
        example = build_example(history, history.target, window=28, cap_n=512)
        assert example.candidates == ("eggs", "milk")
        assert example.labels.tolist() == [0, 1]
        assert example.query_day == 14
        assert example.truth == {"milk"}

    def test_only_new_items_in_target(self):
        history = make_history("u1", {0: ["milk"], 7: ["eggs"], 14: ["caviar"]})
        example = build_example(history, history.target, window=28, cap_n=512)
        assert example.labels.sum() == 0
        assert example.truth == set()

    def test_no_prior_purchases(self):
        history = make_history("u1", {5: ["milk"], 9: ["eggs"]})
        assert build_example(history, Basket(5, frozenset({"milk"})), 28, 512) is None

    def test_cap_keeps_most_recent(self):
        items = {day: [f"item{day:03d}"] for day in range(600)}
        items[600] = ["item000"]
        history = make_history("u1", items)
        example = build_example(history, history.target, window=28, cap_n=512)
        assert example.n == 512
        assert min(example.last_purchase_days) == 88
        assert "item087" not in example.candidates
        assert list(example.candidates) == sorted(example.candidates)

    def test_cap_tie_break_on_count_then_id(self):
        history = make_history("u1", {0: ["b"], 5: ["a", "b", "c"], 9: ["z"]})
        example = build_example(history, history.target, window=28, cap_n=2)
        assert example.candidates == ("a", "b")

    def test_aggregates_for_tie_breaks(self, grocery_histories):
        alice = grocery_histories[0]
        example = build_example(alice, alice.target, 28, 512)
        by_item = dict(zip(example.candidates, zip(example.purchase_counts, example.last_purchase_days)))
        assert by_item == {"bread": (1, 0), "eggs": (1, 7), "jam": (1, 14), "milk": (3, 14)}


class TestExampleSets:
    def test_one_example_per_user(self, grocery_histories):
        result = build_eval_set(grocery_histories, ["alice", "bob"], 28, 512)
        assert [(e.user_id, e.query_day) for e in result.examples] == [("alice", 21), ("bob", 17)]
        assert result.dropped == 0

    def test_unknown_split_user(self, grocery_histories):
        with pytest.raises(DataError, match="no history"):
            build_eval_set(grocery_histories, ["carol"], 28, 512)

    def test_sliding_targets(self, grocery_histories):
        result = build_train_set(grocery_histories, ["alice"], 28, 512, sliding_targets=True)
        assert [e.query_day for e in result.examples] == [7, 14, 21]

    def test_disjoint_users(self, grocery_histories):
        train = build_train_set(grocery_histories, ["alice"], 28, 512).examples
        test = build_eval_set(grocery_histories, ["bob"], 28, 512).examples
        assert {e.user_id for e in train}.isdisjoint(e.user_id for e in test)


class TestBatchCollate:
    def test_padding(self, grocery_histories):
        examples = build_eval_set(grocery_histories, None, 28, 512).examples
        index = vocab_index(["bread", "eggs", "jam", "milk", "soap", "tea"])
        batch = batch_collate(examples, index)
        assert batch.signals.shape == (2, 4, 28)
        assert batch.mask.tolist() == [[True] * 4, [True, True, False, False]]
        assert batch.item_index[1].tolist() == [index["soap"], index["tea"], 0, 0]
        assert batch.labels[1].tolist() == [1, 0, 0, 0]
        assert not batch.signals[1, 3].any()

    def test_unknown_item(self, grocery_histories):
        example = build_eval_set(grocery_histories, ["bob"], 28, 512).examples[0]
        with pytest.raises(ArtifactMismatchError, match="vocabulary"):
            batch_collate([example], vocab_index(["tea"]))

    def test_empty_batch(self):
        with pytest.raises(DataError):
            batch_collate([], {})
