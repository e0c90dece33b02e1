"""Transaction record - one (user, item, day) purchase"""
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True, slots=True)
class Transaction:
    """
    A single purchase row.

    ``day`` is None until resolved for gap-based inputs, where ``gap_days`` holds
    the order's days-since-prior-order value (None for a user's first order).
    """
    user_id: str
    item_id: str
    basket_seq: int
    day: Optional[int] = None
    gap_days: Optional[int] = None

    def with_day(self, day: int) -> "Transaction":
        return Transaction(self.user_id, self.item_id, self.basket_seq, day, self.gap_days)
