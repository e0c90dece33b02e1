"""
Synthetic corpora with planted per-item cadences.

Every user's final basket falls on day ``horizon`` and holds exactly the
planted items that are due then (within one day of a purchase date of their
cadence). Distractor items are bought on random days more often than the
periodic ones, so purchase counts alone point at the wrong items.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from app.data.models.history import UserHistory
from app.data.repositories.history_repository import HistoryRepository
from app.data.repositories.report_repository import ReportRepository
from app.domain.autodiff.rng import Rng
from app.schemas.synth import PlantedCadence, SynthSpec

logger = logging.getLogger(__name__)

HISTORY_FILE = "histories.tsv"
TRUTH_FILE = "truth.csv"


@dataclass(frozen=True)
class SynthCorpus:
    histories: list[UserHistory]
    planted: list[PlantedCadence]


def plant_item_purchases(period: int, phase: int, horizon: int, jitter: float, p_miss: float, rng: Rng) -> list[int]:
    """Days phase + k * period (+ rounded Gaussian jitter) before ``horizon``, each missed with p_miss."""
    nominal = np.arange(phase, horizon, period)
    if nominal.size == 0:
        return []
    offsets = np.rint(rng.normal(0.0, jitter, nominal.size)).astype(np.int64) if jitter > 0 else 0
    kept = rng.random(nominal.size) >= p_miss
    days = (nominal + offsets)[kept]
    return sorted({int(d) for d in days if 0 <= d < horizon})


def is_due(day: int, period: int, phase: int) -> bool:
    return (day - phase) % period in (0, 1, period - 1)


def _generate_user(user_id: str, spec: SynthSpec, rng: Rng) -> tuple[UserHistory, list[PlantedCadence]]:
    horizon = spec.horizon
    items = [f"p{i:03d}" for i in rng.choice(spec.n_periodic_items, spec.items_per_user, replace=False)]
    periods = [int(spec.periods[i]) for i in rng.integers(0, len(spec.periods), spec.items_per_user)]
    phases = [int(rng.integers(0, p)) for p in periods]
    if not any(is_due(horizon, p, ph) for p, ph in zip(periods, phases)):
        slot = int(rng.integers(0, spec.items_per_user))
        phases[slot] = horizon % periods[slot]

    pairs: list[tuple[int, list[str]]] = []
    counts = []
    for item, period, phase in zip(items, periods, phases):
        days = plant_item_purchases(period, phase, horizon, spec.jitter_sd, spec.p_miss, rng)
        counts.append(len(days))
        pairs.extend((day, [item]) for day in days)

    distractor_count = min(horizon, max(1, int(round(spec.distractor_rate_multiplier * float(np.mean(counts))))))
    for i in rng.choice(spec.n_distractor_items, spec.distractors_per_user, replace=False):
        days = rng.choice(horizon, distractor_count, replace=False)
        pairs.extend((int(day), [f"d{i:03d}"]) for day in days)

    due = [item for item, period, phase in zip(items, periods, phases) if is_due(horizon, period, phase)]
    pairs.append((horizon, due))
    planted = [PlantedCadence(user=user_id, item=i, period=p, phase=ph) for i, p, ph in zip(items, periods, phases)]
    return UserHistory.from_day_items(user_id, pairs), planted


def generate(spec: SynthSpec, rng: Rng) -> SynthCorpus:
    """Deterministic corpus: each user draws from its own child stream of ``rng``."""
    histories: list[UserHistory] = []
    planted: list[PlantedCadence] = []
    for index in range(spec.n_users):
        user_id = f"u{index:05d}"
        history, cadences = _generate_user(user_id, spec, rng.child(user_id))
        histories.append(history)
        planted.extend(cadences)
    logger.info(
        "Generated %d users with %d planted cadences over %d days", len(histories), len(planted), spec.horizon
    )
    return SynthCorpus(histories, planted)


def write_corpus(corpus: SynthCorpus, directory: Path) -> tuple[Path, Path]:
    """Canonical history file plus the ``user,item,period,phase`` truth table."""
    directory = Path(directory)
    history_path = directory / HISTORY_FILE
    HistoryRepository(history_path).save(corpus.histories)
    truth_path = ReportRepository(directory).write_truth(corpus.planted, TRUTH_FILE)
    return history_path, truth_path
