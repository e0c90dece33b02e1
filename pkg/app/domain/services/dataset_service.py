"""Dataset preparation shared by train, eval, predict and export-emb"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from app.data.models.history import UserHistory
from app.data.repositories.history_repository import HistoryRepository
from app.domain.exceptions import ArtifactMismatchError, DataError
from app.domain.services.ingest_service import build_vocab, split_users
from app.domain.services.signal_service import ExampleSet, build_eval_set, build_train_set
from app.infrastructure.config import RunConfig
from app.schemas.checkpoint import ModelManifest, vocab_hash
from app.schemas.ingest import UserSplit

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PreparedData:
    histories: list[UserHistory]
    vocab: list[str]
    split: UserSplit
    train: ExampleSet
    val: ExampleSet
    test: ExampleSet


def load_histories(path: Path) -> list[UserHistory]:
    histories = HistoryRepository(path).load()
    if not histories:
        raise DataError(f"history file {path} holds no users")
    logger.info("Loaded %d user histories from %s", len(histories), path)
    return histories


def prepare(histories: Sequence[UserHistory], config: RunConfig) -> PreparedData:
    """Vocabulary, user split and the three example sets for one configuration."""
    data, model = config.data, config.model
    split = split_users(histories, data.split_spec(config.seed))
    train = build_train_set(histories, split.train, model.window, data.cap_n, config.train.sliding_targets)
    val = build_eval_set(histories, split.val, model.window, data.cap_n)
    test = build_eval_set(histories, split.test, model.window, data.cap_n)
    logger.info(
        "Examples: train=%d val=%d test=%d (users dropped: %d/%d/%d)",
        len(train.examples), len(val.examples), len(test.examples), train.dropped, val.dropped, test.dropped,
    )
    return PreparedData(list(histories), build_vocab(histories), split, train, val, test)


def check_manifest(manifest: ModelManifest, vocab: Sequence[str]) -> None:
    """Refuse to pair a checkpoint with data built on a different item vocabulary."""
    if manifest.vocab_hash != vocab_hash(list(vocab)):
        raise ArtifactMismatchError(
            f"checkpoint vocabulary ({len(manifest.vocab)} items) does not match the data ({len(vocab)} items)"
        )
