"""Ranker backed by a trained CASE network"""
from typing import Sequence

import numpy as np

from app.data.models.example import Example
from app.domain.autodiff.tensor import no_grad
from app.domain.model.network import CaseNetwork, case_forward, score_examples
from app.domain.ranking import Ranker, rank_by_scores
from app.domain.services.signal_service import vocab_index

DEFAULT_SCORING_BATCH = 64


def rank(scores: Sequence[float], example: Example, k: int) -> list[str]:
    """Descending score; ties by purchase count, then item id."""
    return rank_by_scores(scores, example, k, by_recency=False)


class CaseRanker(Ranker):
    name = "case"
    tie_break_by_recency = False

    def __init__(self, network: CaseNetwork, vocab: Sequence[str], batch_size: int = DEFAULT_SCORING_BATCH):
        self.network = network.eval()
        self.vocab = list(vocab)
        self.index = vocab_index(self.vocab)
        self.batch_size = batch_size

    def scores(self, example: Example) -> np.ndarray:
        with no_grad():
            return case_forward(self.network, example, self.index)

    def score_many(self, examples: Sequence[Example]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        with no_grad():
            for start in range(0, len(examples), self.batch_size):
                out.extend(score_examples(self.network, examples[start : start + self.batch_size], self.index))
        return out

    def rank_many(self, examples: Sequence[Example], k: int) -> list[list[str]]:
        return [rank(scores, example, k) for scores, example in zip(self.score_many(examples), examples)]
