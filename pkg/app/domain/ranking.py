"""Ranker interface shared by the model, the baselines and the evaluation driver"""
from typing import Sequence

import numpy as np

from app.data.models.example import Example


def rank_by_scores(scores: Sequence[float], example: Example, k: int, by_recency: bool = False) -> list[str]:
    """
    Top-min(k, n) candidates by descending score.

    Ties go to the higher historical purchase count, then (when ``by_recency``)
    the more recent last purchase, then the smaller item id.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (example.n,):
        raise ValueError(f"expected {example.n} scores, got shape {scores.shape}")

    def key(i: int) -> tuple:
        recency = -int(example.last_purchase_days[i]) if by_recency else 0
        return (-scores[i], -int(example.purchase_counts[i]), recency, example.candidates[i])

    order = sorted(range(example.n), key=key)
    return [example.candidates[i] for i in order[:k]]


class Ranker:
    """Base class: subclasses implement ``scores``; batched rankers may override ``rank_many``."""

    name = "ranker"
    tie_break_by_recency = True

    def scores(self, example: Example) -> np.ndarray:
        raise NotImplementedError

    def rank(self, example: Example, k: int) -> list[str]:
        return rank_by_scores(self.scores(example), example, k, self.tie_break_by_recency)

    def rank_many(self, examples: Sequence[Example], k: int) -> list[list[str]]:
        return [self.rank(example, k) for example in examples]
