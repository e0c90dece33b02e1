"""Canonical history file repository

One line per basket: ``user_id<TAB>day<TAB>item1,item2,...``. Lines are written
user by user in day order; items within a basket are sorted.
"""
from collections import defaultdict
from pathlib import Path
from typing import Iterable

from app.data.models.history import UserHistory
from app.domain.exceptions import DataError, ResourceNotFoundError

RESERVED_CHARS = ("\t", ",", "\n", "\r")


class HistoryRepository:
    def __init__(self, path: Path):
        self.path = Path(path)

    def save(self, histories: Iterable[UserHistory]) -> int:
        """Write all histories; returns the number of basket lines."""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        lines = 0
        with self.path.open("w", encoding="utf-8", newline="\n") as fh:
            for history in histories:
                for basket in history.baskets:
                    for item in basket.items:
                        if any(c in item for c in RESERVED_CHARS):
                            raise DataError(f"item id {item!r} contains a reserved separator")
                    fh.write(f"{history.user_id}\t{basket.day}\t{','.join(sorted(basket.items))}\n")
                    lines += 1
        return lines

    def load(self) -> list[UserHistory]:
        """Read histories back, grouped by user in first-seen order."""
        if not self.path.exists():
            raise ResourceNotFoundError("History file", self.path)
        grouped: dict[str, list[tuple[int, list[str]]]] = defaultdict(list)
        with self.path.open("r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise DataError(f"{self.path}:{line_no}: expected 3 tab-separated fields")
                user, day, items = parts
                try:
                    day_value = int(day)
                except ValueError:
                    raise DataError(f"{self.path}:{line_no}: day {day!r} is not an integer")
                grouped[user].append((day_value, [i for i in items.split(",") if i]))
        return [UserHistory.from_day_items(user, pairs) for user, pairs in grouped.items()]
