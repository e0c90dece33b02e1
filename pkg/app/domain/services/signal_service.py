"""
Signal service - calendar-time cadence signals and labeled examples.

A candidate's signal covers the T days strictly before the query day:
index 0 is day ``query_day - T`` and index T-1 is ``query_day - 1``.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from app.data.models.batch import Batch
from app.data.models.example import CadenceSignal, Example
from app.data.models.history import Basket, UserHistory
from app.domain.autodiff.tensor import get_dtype
from app.domain.exceptions import ArtifactMismatchError, ConfigurationError, DataError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExampleSet:
    examples: list[Example]
    dropped: int


def _window_bits(days: Iterable[int], query_day: int, window: int) -> np.ndarray:
    bits = np.zeros(window, dtype=np.uint8)
    start = query_day - window
    for day in days:
        if start <= day < query_day:
            bits[day - start] = 1
    return bits


def build_signal(history: UserHistory, item: str, query_day: int, window: int) -> CadenceSignal:
    """Binary purchase indicator of ``item`` over the window ending the day before ``query_day``."""
    if window < 1:
        raise ConfigurationError(f"window T must be >= 1, got {window}")
    days = history.purchase_days(before_day=query_day).get(item, [])
    return CadenceSignal(_window_bits(days, query_day, window))


def build_example(
    history: UserHistory,
    target_basket: Basket,
    window: int,
    cap_n: int,
) -> Optional[Example]:
    """
    Build the candidate set, signals and labels for one target basket.

    Candidates are the distinct items bought before the target day. When more
    than ``cap_n`` exist, the most recently bought are kept (ties: higher
    purchase count, then item id).

    Returns:
        The example, or None when the user has no prior purchases
    """
    query_day = target_basket.day
    days_by_item = history.purchase_days(before_day=query_day)
    if not days_by_item:
        return None

    items = list(days_by_item)
    if len(items) > cap_n:
        items.sort(key=lambda i: (-days_by_item[i][-1], -len(days_by_item[i]), i))
        logger.info(
            "user %s: capped %d candidates to %d (dropped last bought before day %d)",
            history.user_id, len(items), cap_n, days_by_item[items[cap_n - 1]][-1],
        )
        items = items[:cap_n]
    items.sort()

    return Example(
        user_id=history.user_id,
        query_day=query_day,
        candidates=tuple(items),
        signals=np.stack([_window_bits(days_by_item[i], query_day, window) for i in items]),
        labels=np.array([item in target_basket.items for item in items], dtype=np.uint8),
        purchase_counts=np.array([len(days_by_item[i]) for i in items], dtype=np.int64),
        last_purchase_days=np.array([days_by_item[i][-1] for i in items], dtype=np.int64),
        target_items=target_basket.items,
    )


def _select(histories: Sequence[UserHistory], users: Optional[Iterable[str]]) -> list[UserHistory]:
    if users is None:
        return sorted(histories, key=lambda h: h.user_id)
    by_id = {h.user_id: h for h in histories}
    missing = [u for u in users if u not in by_id]
    if missing:
        raise DataError(f"{len(missing)} split users have no history (first: {missing[0]})")
    return [by_id[u] for u in sorted(users)]


def build_examples(
    histories: Sequence[UserHistory],
    users: Optional[Iterable[str]],
    window: int,
    cap_n: int,
    sliding_targets: bool = False,
) -> ExampleSet:
    """One example per user with the last basket as target, or one per basket after the first."""
    examples: list[Example] = []
    dropped = 0
    for history in _select(histories, users):
        targets = history.baskets[1:] if sliding_targets else history.baskets[-1:]
        built = [build_example(history, target, window, cap_n) for target in targets]
        kept = [e for e in built if e is not None]
        if not kept:
            dropped += 1
        examples.extend(kept)
    if dropped:
        logger.warning("Dropped %d users without purchases before their target basket", dropped)
    return ExampleSet(examples, dropped)


def build_train_set(
    histories: Sequence[UserHistory],
    users: Optional[Iterable[str]],
    window: int,
    cap_n: int,
    sliding_targets: bool = False,
) -> ExampleSet:
    return build_examples(histories, users, window, cap_n, sliding_targets)


def build_eval_set(
    histories: Sequence[UserHistory],
    users: Optional[Iterable[str]],
    window: int,
    cap_n: int,
) -> ExampleSet:
    return build_examples(histories, users, window, cap_n, sliding_targets=False)


def vocab_index(vocab: Sequence[str]) -> dict[str, int]:
    return {item: row for row, item in enumerate(vocab)}


def item_rows(example: Example, index: Mapping[str, int]) -> np.ndarray:
    try:
        return np.array([index[item] for item in example.candidates], dtype=np.int64)
    except KeyError as exc:
        raise ArtifactMismatchError(f"user {example.user_id}: item {exc.args[0]!r} is not in the model vocabulary")


def batch_collate(examples: Sequence[Example], index: Mapping[str, int]) -> Batch:
    """
    Pad a list of examples to the largest candidate count.

    Padded slots carry zero signals, embedding row 0, label 0 and mask False.
    """
    if not examples:
        raise DataError("cannot collate an empty batch")
    window = examples[0].window
    if any(e.window != window for e in examples):
        raise DataError("examples in one batch must share the window length")
    width = max(e.n for e in examples)
    size = len(examples)

    signals = np.zeros((size, width, window), dtype=get_dtype())
    rows = np.zeros((size, width), dtype=np.int64)
    labels = np.zeros((size, width), dtype=get_dtype())
    mask = np.zeros((size, width), dtype=bool)
    for b, example in enumerate(examples):
        n = example.n
        signals[b, :n] = example.signals
        rows[b, :n] = item_rows(example, index)
        labels[b, :n] = example.labels
        mask[b, :n] = True
    return Batch(signals=signals, item_index=rows, labels=labels, mask=mask, sizes=tuple(e.n for e in examples))
