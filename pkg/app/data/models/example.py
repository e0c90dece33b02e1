"""Cadence signal and labeled example records"""
from dataclasses import dataclass, field

import numpy as np

from app.domain.exceptions import DataError


@dataclass(frozen=True, slots=True)
class CadenceSignal:
    """Binary calendar-day purchase indicator; bits[T-1] is the day before the query day."""
    bits: np.ndarray

    def __post_init__(self):
        if self.bits.ndim != 1:
            raise DataError(f"cadence signal must be 1-D, got shape {self.bits.shape}")
        if not np.isin(self.bits, (0, 1)).all():
            raise DataError("cadence signal entries must be 0 or 1")

    @property
    def length(self) -> int:
        return int(self.bits.shape[0])

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


@dataclass(frozen=True, slots=True)
class Example:
    """
    One (user, candidate set) instance.

    Arrays are aligned with ``candidates``: ``signals`` [n, T] (uint8),
    ``labels`` [n] (uint8), ``purchase_counts`` and ``last_purchase_days`` [n]
    (int64) feed the deterministic tie-breaks used by every ranker.
    """
    user_id: str
    query_day: int
    candidates: tuple[str, ...]
    signals: np.ndarray
    labels: np.ndarray
    purchase_counts: np.ndarray
    last_purchase_days: np.ndarray
    target_items: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        n = len(self.candidates)
        if n < 1:
            raise DataError(f"user {self.user_id}: example needs at least one candidate")
        for name in ("labels", "purchase_counts", "last_purchase_days"):
            if getattr(self, name).shape != (n,):
                raise DataError(f"user {self.user_id}: {name} not aligned with {n} candidates")
        if self.signals.ndim != 2 or self.signals.shape[0] != n:
            raise DataError(f"user {self.user_id}: signals shape {self.signals.shape} not aligned with {n} candidates")

    @property
    def n(self) -> int:
        return len(self.candidates)

    @property
    def window(self) -> int:
        return int(self.signals.shape[1])

    @property
    def truth(self) -> set[str]:
        """Target items that are also candidates (the repurchased items)."""
        return {item for item, label in zip(self.candidates, self.labels) if label}

    def signal(self, index: int) -> CadenceSignal:
        return CadenceSignal(self.signals[index])

    def permuted(self, order: np.ndarray) -> "Example":
        order = np.asarray(order)
        return Example(
            user_id=self.user_id,
            query_day=self.query_day,
            candidates=tuple(self.candidates[i] for i in order),
            signals=self.signals[order],
            labels=self.labels[order],
            purchase_counts=self.purchase_counts[order],
            last_purchase_days=self.last_purchase_days[order],
            target_items=self.target_items,
        )
