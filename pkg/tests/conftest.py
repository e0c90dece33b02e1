"""Pytest configuration and shared fixtures."""
from typing import Iterable, Mapping

import numpy as np
import pytest

from app.data.models.history import UserHistory
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import precision
from app.domain.enums import Precision
from app.domain.services.synth_service import generate
from app.schemas.model import ModelConfig
from app.schemas.synth import SynthSpec


def make_history(user_id: str, baskets: Mapping[int, Iterable[str]]) -> UserHistory:
    """UserHistory from {day: items}."""
    return UserHistory.from_day_items(user_id, [(day, list(items)) for day, items in baskets.items()])


@pytest.fixture
def history_factory():
    return make_history


@pytest.fixture
def float64():
    """Run the test body with 64-bit tensors."""
    with precision(Precision.FLOAT64):
        yield


@pytest.fixture
def tiny_model_config() -> ModelConfig:
    """Toy dimensions, 64-bit: T=28, scales {7, 14}."""
    return ModelConfig(
        window=28,
        scales=[7, 14],
        filters_per_scale=1,
        d_c=4,
        d_e=4,
        d_h=8,
        n_induced=3,
        n_heads=2,
        n_set_layers=2,
        precision=Precision.FLOAT64,
    )


@pytest.fixture
def rng() -> Rng:
    return Rng(1234, ("tests",))


@pytest.fixture
def small_synth_spec() -> SynthSpec:
    return SynthSpec(
        n_users=60,
        items_per_user=3,
        periods=[7, 14],
        n_periodic_items=12,
        n_distractor_items=8,
        distractors_per_user=2,
        horizon=120,
        seed=7,
    )


@pytest.fixture
def small_corpus(small_synth_spec):
    return generate(small_synth_spec, Rng(7, ("synth",)))


@pytest.fixture
def grocery_histories() -> list[UserHistory]:
    """Two hand-built users used across ingest, signal and baseline tests."""
    return [
        make_history("alice", {0: ["milk", "bread"], 7: ["milk", "eggs"], 14: ["milk", "jam"], 21: ["milk", "eggs"]}),
        make_history("bob", {3: ["tea"], 10: ["tea", "soap"], 17: ["soap", "jam"]}),
    ]


def random_signals(rng: Rng, shape: tuple[int, ...], density: float = 0.3) -> np.ndarray:
    return (rng.random(shape) < density).astype(np.uint8)
