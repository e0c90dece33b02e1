"""
Ingest service - raw transaction logs to per-user basket histories.

Pipeline: parse CSV rows (skipping and counting unusable ones), resolve
calendar days (directly, from dates, or by summing inter-order gaps), group
purchases into day-keyed baskets, and split users into train/val/test.
"""
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from app.data.models.history import UserHistory
from app.data.models.transaction import Transaction
from app.data.repositories.history_repository import HistoryRepository
from app.data.repositories.transaction_repository import CsvSource, TransactionRepository
from app.domain.autodiff.rng import Rng
from app.domain.enums import InputSchema
from app.domain.exceptions import DataError
from app.schemas.ingest import DatasetSummary, FormatSpec, SplitSpec, UserSplit

logger = logging.getLogger(__name__)

MIN_BASKETS = 2


@dataclass(frozen=True)
class ParseResult:
    transactions: list[Transaction]
    skipped_rows: int


@dataclass(frozen=True)
class HistoryBuildResult:
    histories: list[UserHistory]
    dropped_users: int


def _integral(values: pd.Series) -> pd.Series:
    return values.notna() & np.isfinite(values) & (values == np.floor(values))


def parse_transactions(
    source: CsvSource,
    format_spec: FormatSpec,
    repository: Optional[TransactionRepository] = None,
) -> ParseResult:
    """
    Parse a transaction CSV according to ``format_spec``.

    Rows with a missing or unparsable field are skipped and counted. For the
    gap schema, days stay unresolved and ``gap_days`` is filled instead; call
    ``resolve_gap_days`` afterwards.
    """
    repository = repository or TransactionRepository()
    frame = repository.read_frame(source, format_spec.required_columns())

    users = frame[format_spec.user_col].str.strip()
    items = frame[format_spec.item_col].str.strip()
    valid = (
        (users != "")
        & (items != "")
        & ~items.str.contains(r"[\t,\r\n]", regex=True)
        & ~users.str.contains(r"[\t\r\n]", regex=True)
    )

    gaps = None
    if format_spec.schema_kind == InputSchema.GAP:
        seqs = pd.to_numeric(frame[format_spec.order_col].str.strip(), errors="coerce")
        gap_text = frame[format_spec.gap_col].str.strip()
        gaps = pd.to_numeric(gap_text, errors="coerce")
        valid &= _integral(seqs) & (seqs >= 0)
        valid &= (gap_text == "") | _integral(gaps)
        days = None
    elif format_spec.schema_kind == InputSchema.DATE:
        dates = pd.to_datetime(frame[format_spec.date_col].str.strip(), format=format_spec.date_format, errors="coerce")
        valid &= dates.notna()
        origin = dates[valid].min()
        days = (dates - origin).dt.days
    else:
        days = pd.to_numeric(frame[format_spec.day_col].str.strip(), errors="coerce")
        valid &= _integral(days) & (days >= 0)

    skipped = int((~valid).sum())
    if skipped:
        logger.warning("Skipped %d of %d rows with missing or unparsable fields", skipped, len(frame))
    if not valid.any():
        raise DataError("no parsable transaction rows")

    users, items = users[valid], items[valid]
    if gaps is not None:
        seqs, gaps = seqs[valid], gaps[valid]
        transactions = [
            Transaction(u, i, int(s), None, None if math.isnan(g) else int(g))
            for u, i, s, g in zip(users, items, seqs, gaps)
        ]
    else:
        days = days[valid].astype(np.int64)
        seqs = days.groupby(users).rank(method="dense").astype(np.int64) - 1
        transactions = [Transaction(u, i, int(s), int(d)) for u, i, s, d in zip(users, items, seqs, days)]
    logger.info("Parsed %d transactions (%s schema)", len(transactions), format_spec.schema_kind.value)
    return ParseResult(transactions, skipped)


def reconstruct_days(
    orders: Mapping[str, Sequence[tuple[int, Optional[int]]]],
) -> dict[str, list[tuple[int, int]]]:
    """
    Cumulative-sum inter-order gaps into per-user day indices.

    ``orders`` maps user -> [(basket_seq, gap_days)] in order; the first order's
    gap may be None and is ignored. Day of the first order is 0.

    Raises:
        DataError: a negative gap, or a missing gap on a non-first order
    """
    resolved: dict[str, list[tuple[int, int]]] = {}
    for user, sequence in orders.items():
        day = 0
        out: list[tuple[int, int]] = []
        for position, (seq, gap) in enumerate(sequence):
            if gap is not None and gap < 0:
                raise DataError(f"user {user}: negative gap {gap} at order {seq}")
            if position > 0:
                if gap is None:
                    raise DataError(f"user {user}: missing days-since-prior-order at order {seq}")
                day += gap
            out.append((seq, day))
        resolved[user] = out
    return resolved


def resolve_gap_days(transactions: Sequence[Transaction]) -> list[Transaction]:
    """Fill ``day`` on gap-schema transactions via ``reconstruct_days``."""
    gap_by_order: dict[str, dict[int, Optional[int]]] = defaultdict(dict)
    for t in transactions:
        known = gap_by_order[t.user_id]
        if t.basket_seq in known and known[t.basket_seq] != t.gap_days:
            raise DataError(f"user {t.user_id}: order {t.basket_seq} has conflicting gaps")
        known[t.basket_seq] = t.gap_days
    orders = {user: sorted(seq_gaps.items()) for user, seq_gaps in gap_by_order.items()}
    day_of = {
        user: dict(pairs) for user, pairs in reconstruct_days(orders).items()
    }
    return [t.with_day(day_of[t.user_id][t.basket_seq]) for t in transactions]


def build_histories(transactions: Sequence[Transaction]) -> HistoryBuildResult:
    """Group purchases by user and day; drop users with fewer than two baskets."""
    by_user: dict[str, list[tuple[int, list[str]]]] = defaultdict(list)
    for t in transactions:
        if t.day is None:
            raise DataError(f"user {t.user_id}: transaction without a resolved day")
        by_user[t.user_id].append((t.day, [t.item_id]))

    histories: list[UserHistory] = []
    dropped = 0
    for user in sorted(by_user):
        history = UserHistory.from_day_items(user, by_user[user])
        if len(history.baskets) < MIN_BASKETS:
            dropped += 1
            continue
        histories.append(history)
    if dropped:
        logger.info("Dropped %d users with fewer than %d baskets", dropped, MIN_BASKETS)
    return HistoryBuildResult(histories, dropped)


def _round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


def split_users(histories: Sequence[UserHistory], spec: SplitSpec) -> UserSplit:
    """Seeded, disjoint and exhaustive user-level train/val/test partition."""
    users = sorted(h.user_id for h in histories)
    n = len(users)
    n_train = _round_half_up(n * spec.train_frac)
    n_val = _round_half_up(n * spec.val_frac)
    n_test = n - n_train - n_val
    test_frac = 1.0 - spec.train_frac - spec.val_frac
    for name, size, frac in (("train", n_train, spec.train_frac), ("val", n_val, spec.val_frac), ("test", n_test, test_frac)):
        if frac > 0 and size <= 0:
            raise DataError(f"{n} users are too few: the {name} split would be empty")
    order = Rng(spec.seed).child("split").permutation(n)
    shuffled = [users[i] for i in order]
    split = UserSplit(
        train=shuffled[:n_train],
        val=shuffled[n_train : n_train + n_val],
        test=shuffled[n_train + n_val :],
    )
    logger.info("Split %d users into train=%d val=%d test=%d", n, len(split.train), len(split.val), len(split.test))
    return split


def build_vocab(histories: Sequence[UserHistory]) -> list[str]:
    """Closed-world item vocabulary over the whole corpus, sorted."""
    return sorted(set().union(*(h.items() for h in histories))) if histories else []


def summarize(histories: Sequence[UserHistory], **extra) -> DatasetSummary:
    baskets = sum(len(h.baskets) for h in histories)
    purchases = sum(len(b.items) for h in histories for b in h.baskets)
    return DatasetSummary(
        users=len(histories),
        items=len(build_vocab(histories)),
        baskets=baskets,
        baskets_per_user=baskets / len(histories) if histories else 0.0,
        items_per_basket=purchases / baskets if baskets else 0.0,
        **extra,
    )


class IngestService:
    """File-level orchestration of the ingest pipeline."""

    def __init__(self, transactions: Optional[TransactionRepository] = None):
        self.transactions = transactions or TransactionRepository()

    def ingest(self, source: CsvSource, format_spec: FormatSpec) -> tuple[list[UserHistory], DatasetSummary]:
        parsed = parse_transactions(source, format_spec, self.transactions)
        rows = parsed.transactions
        if format_spec.schema_kind == InputSchema.GAP:
            rows = resolve_gap_days(rows)
        built = build_histories(rows)
        summary = summarize(
            built.histories,
            skipped_rows=parsed.skipped_rows,
            dropped_users=built.dropped_users,
            reconstructed_days=format_spec.schema_kind == InputSchema.GAP,
            source=str(getattr(source, "name", source)),
        )
        logger.info(
            "Ingested %d users, %d items, %.2f baskets/user, %.2f items/basket",
            summary.users, summary.items, summary.baskets_per_user, summary.items_per_basket,
        )
        return built.histories, summary

    def ingest_to_file(self, source: CsvSource, format_spec: FormatSpec, out: Path) -> DatasetSummary:
        histories, summary = self.ingest(source, format_spec)
        HistoryRepository(out).save(histories)
        return summary
