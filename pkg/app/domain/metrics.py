"""
Ranking metrics and the leave-one-out evaluation driver.

Truth is the target basket intersected with the candidate set. Examples whose
truth is empty are skipped and counted, never scored as zero.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import AbstractSet, Iterable, Sequence

from app.data.models.example import Example
from app.domain.enums import MetricName
from app.domain.ranking import Ranker
from app.schemas.evaluation import DEFAULT_KS, EvalReport, MetricRow

logger = logging.getLogger(__name__)


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")


def hits_at_k(ranked: Sequence[str], truth: AbstractSet[str], k: int) -> int:
    return sum(1 for item in ranked[:k] if item in truth)


def precision_at_k(ranked: Sequence[str], truth: AbstractSet[str], k: int) -> float:
    """Hits in the top-k divided by k, also when fewer than k items are ranked."""
    _check_k(k)
    return hits_at_k(ranked, truth, k) / k


def recall_at_k(ranked: Sequence[str], truth: AbstractSet[str], k: int) -> float:
    _check_k(k)
    if not truth:
        raise ValueError("recall is undefined for empty truth")
    return hits_at_k(ranked, truth, k) / len(truth)


def _discount(position: int) -> float:
    """Gain discount for a 1-based rank position."""
    return 1.0 / math.log2(position + 1)


def ndcg_at_k(ranked: Sequence[str], truth: AbstractSet[str], k: int) -> float:
    """Binary-gain NDCG with log2(p + 1) discounts."""
    _check_k(k)
    if not truth:
        raise ValueError("ndcg is undefined for empty truth")
    dcg = sum(_discount(p) for p, item in enumerate(ranked[:k], start=1) if item in truth)
    idcg = sum(_discount(p) for p in range(1, min(k, len(truth)) + 1))
    return dcg / idcg


METRIC_FUNCTIONS = {
    MetricName.PRECISION: precision_at_k,
    MetricName.RECALL: recall_at_k,
    MetricName.NDCG: ndcg_at_k,
}


def _chunks(items: Sequence[Example], parts: int) -> list[Sequence[Example]]:
    size = max(1, math.ceil(len(items) / parts))
    return [items[i : i + size] for i in range(0, len(items), size)]


def rank_all(ranker: Ranker, examples: Sequence[Example], k: int, workers: int = 1) -> list[list[str]]:
    """Rank every example, splitting the list across worker threads when workers > 1."""
    if workers <= 1 or len(examples) < 2:
        return ranker.rank_many(examples, k)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(lambda chunk: ranker.rank_many(chunk, k), _chunks(examples, workers))
        return [ranked for part in parts for ranked in part]


def evaluate(
    ranker: Ranker,
    examples: Sequence[Example],
    ks: Iterable[int] = DEFAULT_KS,
    workers: int = 1,
) -> EvalReport:
    """Mean precision/recall/ndcg at each k over examples with non-empty truth."""
    ks = sorted(set(ks))
    for k in ks:
        _check_k(k)
    scored = [e for e in examples if e.truth]
    skipped = len(examples) - len(scored)
    if skipped:
        logger.info("%s: skipped %d examples with no repurchased items", ranker.name, skipped)

    totals = {(metric, k): 0.0 for metric in METRIC_FUNCTIONS for k in ks}
    if scored:
        for example, ranked in zip(scored, rank_all(ranker, scored, max(ks), workers)):
            truth = example.truth
            for (metric, k) in totals:
                totals[(metric, k)] += METRIC_FUNCTIONS[metric](ranked, truth, k)
    else:
        logger.warning("%s: no example has a repurchased item; metrics are undefined", ranker.name)

    rows = [
        MetricRow(metric=metric, k=k, value=(totals[(metric, k)] / len(scored)) if scored else math.nan)
        for metric in METRIC_FUNCTIONS
        for k in ks
    ]
    report = EvalReport(ranker=ranker.name, rows=rows, n_evaluated=len(scored), n_skipped=skipped)
    logger.info("%s: evaluated %d examples", ranker.name, report.n_evaluated)
    return report
