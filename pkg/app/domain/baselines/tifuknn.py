"""
TIFUKNN reference reimplementation.

A user's baskets are split into contiguous groups, each basket decayed within
its group and each group decayed by age, giving a non-negative item vector.
Scores fuse the user's own vector with the mean vector of the k nearest train
users (exact Euclidean scan over a sparse matrix).
"""
import logging
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from app.data.models.example import Example
from app.data.models.history import Basket, UserHistory
from app.domain.exceptions import ResourceNotFoundError
from app.domain.ranking import Ranker, rank_by_scores
from app.schemas.baselines import TifuConfig

logger = logging.getLogger(__name__)

UserVector = dict[str, float]


def group_baskets(baskets: Sequence[Basket], groups: int) -> list[Sequence[Basket]]:
    """Contiguous groups, oldest first; the oldest group absorbs the remainder."""
    count = min(groups, len(baskets))
    if count == 0:
        return []
    size, extra = divmod(len(baskets), count)
    bounds = [0, size + extra]
    while len(bounds) <= count:
        bounds.append(bounds[-1] + size)
    return [baskets[bounds[g] : bounds[g + 1]] for g in range(count)]


def tifu_build_vector(history: UserHistory, query_day: int, config: TifuConfig) -> UserVector:
    """Temporally decayed item weights over the baskets before ``query_day``."""
    grouped = group_baskets(history.before(query_day), config.groups)
    vector: dict[str, float] = {}
    n_groups = len(grouped)
    for g, group in enumerate(grouped, start=1):
        group_weight = config.group_decay ** (n_groups - g) / n_groups
        size = len(group)
        for j, basket in enumerate(group, start=1):
            weight = group_weight * config.within_decay ** (size - j) / size
            for item in basket.items:
                vector[item] = vector.get(item, 0.0) + weight
    return vector


class TifuPopulation:
    """Sparse matrix of train-user vectors plus the item index it is laid out on."""

    def __init__(self, user_ids: Sequence[str], vectors: Sequence[UserVector]):
        self.user_ids = list(user_ids)
        self.row_of = {user: row for row, user in enumerate(self.user_ids)}
        self.items = sorted(set().union(*vectors)) if vectors else []
        self.column_of = {item: col for col, item in enumerate(self.items)}
        rows, cols, values = [], [], []
        for row, vector in enumerate(vectors):
            for item, weight in vector.items():
                rows.append(row)
                cols.append(self.column_of[item])
                values.append(weight)
        self.matrix = sp.csr_matrix((values, (rows, cols)), shape=(len(self.user_ids), len(self.items)), dtype=np.float64)
        self.squared_norms = np.asarray(self.matrix.multiply(self.matrix).sum(axis=1)).ravel()

    @classmethod
    def build(cls, histories: Sequence[UserHistory], config: TifuConfig) -> "TifuPopulation":
        """Each train user's vector over all of its baskets."""
        ordered = sorted(histories, key=lambda h: h.user_id)
        vectors = [tifu_build_vector(h, h.target.day + 1, config) for h in ordered]
        return cls([h.user_id for h in ordered], vectors)

    def __len__(self) -> int:
        return len(self.user_ids)

    def _row(self, vector: UserVector) -> sp.csr_matrix:
        known = [(self.column_of[i], w) for i, w in vector.items() if i in self.column_of]
        cols = [c for c, _ in known]
        values = [w for _, w in known]
        return sp.csr_matrix((values, ([0] * len(cols), cols)), shape=(1, len(self.items)), dtype=np.float64)

    def distances(self, vector: UserVector) -> np.ndarray:
        """Euclidean distance from ``vector`` to every train user."""
        own_norm = sum(w * w for w in vector.values())
        cross = np.asarray((self.matrix @ self._row(vector).T).todense()).ravel()
        return np.sqrt(np.maximum(own_norm + self.squared_norms - 2.0 * cross, 0.0))

    def nearest(self, vector: UserVector, k_nn: int, exclude: Optional[str] = None) -> np.ndarray:
        """Row indices of the k_nn nearest users, ties by row order."""
        distances = self.distances(vector)
        order = np.argsort(distances, kind="stable")
        if exclude is not None and exclude in self.row_of:
            order = order[order != self.row_of[exclude]]
        return order[:k_nn]

    def mean_vector(self, rows: np.ndarray) -> np.ndarray:
        return np.asarray(self.matrix[rows].mean(axis=0)).ravel()


def tifu_scores(
    own: UserVector,
    population: TifuPopulation,
    config: TifuConfig,
    candidates: Sequence[str],
    exclude: Optional[str] = None,
) -> np.ndarray:
    """alpha * own + (1 - alpha) * mean(neighbours), for each candidate."""
    own_scores = np.array([own.get(item, 0.0) for item in candidates])
    if config.k_nn == 0 or config.alpha == 1.0 or len(population) == 0:
        return own_scores
    rows = population.nearest(own, config.k_nn, exclude)
    if len(rows) == 0:
        return own_scores
    neighbours = population.mean_vector(rows)
    neighbour_scores = np.array(
        [neighbours[population.column_of[item]] if item in population.column_of else 0.0 for item in candidates]
    )
    return config.alpha * own_scores + (1.0 - config.alpha) * neighbour_scores


def tifu_rank(
    own: UserVector,
    population: TifuPopulation,
    config: TifuConfig,
    example: Example,
    k: int,
    exclude: Optional[str] = None,
) -> list[str]:
    return rank_by_scores(tifu_scores(own, population, config, example.candidates, exclude), example, k, by_recency=True)


class TifuKnnRanker(Ranker):
    name = "tifuknn"

    def __init__(
        self,
        population: TifuPopulation,
        histories: Mapping[str, UserHistory],
        config: TifuConfig,
        exclude_self: bool = True,
    ):
        self.population = population
        self.histories = histories
        self.config = config
        self.exclude_self = exclude_self
        if 0 < len(population) < config.k_nn:
            logger.warning(
                "k_nn=%d exceeds the %d train users; using all of them", config.k_nn, len(population)
            )

    def own_vector(self, example: Example) -> UserVector:
        history = self.histories.get(example.user_id)
        if history is None:
            raise ResourceNotFoundError("User history", example.user_id)
        return tifu_build_vector(history, example.query_day, self.config)

    def scores(self, example: Example) -> np.ndarray:
        exclude = example.user_id if self.exclude_self else None
        return tifu_scores(self.own_vector(example), self.population, self.config, example.candidates, exclude)
