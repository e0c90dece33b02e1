"""UserHistory record - a user's day-keyed basket sequence"""
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Optional

from app.domain.exceptions import DataError


@dataclass(frozen=True, slots=True)
class Basket:
    day: int
    items: frozenset[str]


@dataclass(frozen=True, slots=True)
class UserHistory:
    """Baskets in strictly increasing day order, one basket per day."""
    user_id: str
    baskets: tuple[Basket, ...]

    def __post_init__(self):
        previous = None
        for basket in self.baskets:
            if not basket.items:
                raise DataError(f"user {self.user_id}: empty basket on day {basket.day}")
            if basket.day < 0:
                raise DataError(f"user {self.user_id}: negative day {basket.day}")
            if previous is not None and basket.day <= previous:
                raise DataError(f"user {self.user_id}: basket days not strictly increasing at day {basket.day}")
            previous = basket.day

    @property
    def target(self) -> Basket:
        """The leave-one-out target: the basket with the maximal day."""
        return self.baskets[-1]

    def before(self, day: int) -> tuple[Basket, ...]:
        return tuple(b for b in self.baskets if b.day < day)

    def items(self) -> set[str]:
        return set().union(*(b.items for b in self.baskets))

    def purchase_days(self, before_day: Optional[int] = None) -> dict[str, list[int]]:
        """Ascending purchase days per item, optionally restricted to days < before_day."""
        days: dict[str, list[int]] = defaultdict(list)
        for basket in self.baskets:
            if before_day is not None and basket.day >= before_day:
                break
            for item in basket.items:
                days[item].append(basket.day)
        return dict(days)

    def shifted(self, offset: int) -> "UserHistory":
        return UserHistory(self.user_id, tuple(Basket(b.day + offset, b.items) for b in self.baskets))

    @classmethod
    def from_day_items(cls, user_id: str, pairs: Iterable[tuple[int, Iterable[str]]]) -> "UserHistory":
        """Group (day, items) pairs into merged, day-sorted baskets."""
        merged: dict[int, set[str]] = defaultdict(set)
        for day, items in pairs:
            merged[int(day)].update(items)
        return cls(user_id, tuple(Basket(day, frozenset(merged[day])) for day in sorted(merged)))
