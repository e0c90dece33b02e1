"""PersonalTop: a user's own items by historical purchase count"""
import numpy as np

from app.data.models.example import Example
from app.data.models.history import UserHistory
from app.domain.ranking import Ranker


def personal_top_rank(history: UserHistory, query_day: int, k: int) -> list[str]:
    """Items bought before ``query_day`` by count, then most recent purchase, then item id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    days = history.purchase_days(before_day=query_day)
    ranked = sorted(days, key=lambda item: (-len(days[item]), -days[item][-1], item))
    return ranked[:k]


class PersonalTopRanker(Ranker):
    name = "personal_top"

    def scores(self, example: Example) -> np.ndarray:
        return example.purchase_counts.astype(np.float64)
