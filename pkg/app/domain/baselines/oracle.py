"""Due-date oracle for synthetic corpora with known planted cadences"""
import math
from typing import Iterable

import numpy as np

from app.data.models.example import Example
from app.domain.ranking import Ranker
from app.schemas.synth import PlantedCadence


def days_from_due(query_day: int, period: int, phase: int) -> int:
    """Distance in days from ``query_day`` to the nearest purchase date phase + k * period."""
    offset = (query_day - phase) % period
    return min(offset, period - offset)


class DueDateOracleRanker(Ranker):
    """Planted items closest to their due date first; unplanted items last."""

    name = "oracle"

    def __init__(self, planted: Iterable[PlantedCadence]):
        self.cadence = {(p.user, p.item): (p.period, p.phase) for p in planted}

    def scores(self, example: Example) -> np.ndarray:
        scores = np.empty(example.n)
        for i, item in enumerate(example.candidates):
            planted = self.cadence.get((example.user_id, item))
            scores[i] = -days_from_due(example.query_day, *planted) if planted else -math.inf
        return scores
