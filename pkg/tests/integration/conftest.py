"""
Pytest configuration for integration tests.

Integration tests train real models on generated corpora; they are deselected
by default (``-m "not integration and not slow"``). Run them with
``pytest -m integration``.

The TaFeng run is SKIPPED unless CASE_TAFENG_CSV points to a local copy of the
transaction file (columns TRANSACTION_DT, CUSTOMER_ID, PRODUCT_ID).
"""
import os
from pathlib import Path

import pytest

from app.domain.autodiff.rng import Rng
from app.domain.services.dataset_service import prepare
from app.domain.services.synth_service import generate
from app.infrastructure.config import RunConfig, load_config

ACCEPTANCE_OVERRIDES = {
    "seed": 0,
    "model": {"window": 112, "scales": [7, 14, 28], "d_c": 16, "d_e": 16, "d_h": 32, "n_induced": 8, "n_heads": 2},
    "train": {"epochs": 12, "batch_size": 32, "lr": 0.003},
    "synth": {"n_users": 600, "periods": [7, 14, 28], "horizon": 364},
}


@pytest.fixture(scope="session")
def acceptance_config() -> RunConfig:
    return load_config(overrides=ACCEPTANCE_OVERRIDES)


@pytest.fixture(scope="session")
def synth_corpus(acceptance_config):
    return generate(acceptance_config.synth, Rng(acceptance_config.seed).child("synth"))


@pytest.fixture(scope="session")
def synth_data(acceptance_config, synth_corpus):
    return prepare(synth_corpus.histories, acceptance_config)


@pytest.fixture(scope="session")
def tafeng_csv() -> Path:
    """
    Path to the TaFeng transaction CSV.

    SKIPS if CASE_TAFENG_CSV is not set or the file is missing.
    """
    raw = os.getenv("CASE_TAFENG_CSV")
    if not raw:
        pytest.skip("CASE_TAFENG_CSV not set - skipping TaFeng run")
    path = Path(raw)
    if not path.exists():
        pytest.skip(f"CASE_TAFENG_CSV points to a missing file: {path}")
    return path
