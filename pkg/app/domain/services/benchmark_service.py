"""Inference timing versus train-population size"""
import logging
import time
from typing import Callable, Mapping, Sequence

import numpy as np

from app.data.models.example import Example
from app.data.models.history import UserHistory
from app.domain.exceptions import ConfigurationError
from app.domain.ranking import Ranker
from app.schemas.evaluation import BenchReport, BenchRow

logger = logging.getLogger(__name__)

RankerFactory = Callable[[Sequence[UserHistory]], Ranker]

BENCH_K = 10


def bench_inference(
    factories: Mapping[str, RankerFactory],
    population: Sequence[UserHistory],
    queries: Sequence[Example],
    sizes: Sequence[int],
    repeats: int = 1,
) -> BenchReport:
    """
    Per-query ranking time of each ranker built on the first ``size`` train users.

    Ranker construction is not timed. ``slopes`` holds the least-squares slope of
    seconds-per-query against population size; ``ratios`` the largest over the
    smallest population's per-query time.
    """
    sizes = list(sizes)
    if not sizes or sizes != sorted(sizes):
        raise ConfigurationError("population sizes must be given in ascending order")
    if sizes[-1] > len(population):
        raise ConfigurationError(f"largest population {sizes[-1]} exceeds the {len(population)} available users")
    if not queries:
        raise ConfigurationError("bench needs at least one query example")

    rows: list[BenchRow] = []
    slopes: dict[str, float] = {}
    ratios: dict[str, float] = {}
    for name, factory in factories.items():
        per_query = []
        for size in sizes:
            ranker = factory(population[:size])
            best = np.inf
            for _ in range(repeats):
                started = time.perf_counter()
                ranker.rank_many(queries, BENCH_K)
                best = min(best, time.perf_counter() - started)
            per_query.append(best / len(queries))
            rows.append(BenchRow(ranker=name, population=size, queries=len(queries), seconds_per_query=per_query[-1]))
            logger.info("%s population=%d: %.3e s/query", name, size, per_query[-1])
        slopes[name] = float(np.polyfit(sizes, per_query, 1)[0]) if len(sizes) > 1 else 0.0
        ratios[name] = per_query[-1] / per_query[0] if per_query[0] > 0 else float("nan")
    return BenchReport(rows=rows, slopes=slopes, ratios=ratios)
