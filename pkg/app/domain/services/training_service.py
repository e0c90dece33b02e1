"""
Training service - mini-batch BCE training with Adam and post-hoc model selection.

Every epoch is trained; the epoch whose validation metric is highest is kept
(earliest on ties) and written as the ``best`` checkpoint.
"""
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from app.data.models.example import Example
from app.data.repositories.checkpoint_repository import CheckpointRepository
from app.data.repositories.report_repository import ReportRepository
from app.domain.autodiff.optim import Adam
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import precision
from app.domain.exceptions import DataError, NumericalError, TrainingError
from app.domain.metrics import evaluate
from app.domain.model.network import CaseNetwork
from app.domain.model.ranker import CaseRanker
from app.domain.services.signal_service import batch_collate, vocab_index
from app.schemas.checkpoint import ModelManifest
from app.schemas.training import EpochLog, TrainConfig

logger = logging.getLogger(__name__)

BEST_CHECKPOINT = "best"
TRAINING_LOG = "training_log.csv"


def epoch_checkpoint_name(epoch: int) -> str:
    return f"epoch_{epoch:03d}"


@dataclass
class TrainingResult:
    network: CaseNetwork
    best_epoch: int
    best_metric: Optional[float]
    log: list[EpochLog] = field(default_factory=list)
    best_path: Optional[Path] = None
    steps: int = 0


class TrainingService:
    """
    Owns the optimizer and the training loop for one network.

    Args:
        train_config: train.* settings
        shuffle_rng: stream used to order examples each epoch
        dropout_rng: stream consumed by dropout masks
        checkpoints: where epoch and best checkpoints go (None keeps everything in memory)
        reports: where the training log CSV goes
        workers: thread cap for validation scoring
    """

    def __init__(
        self,
        train_config: TrainConfig,
        shuffle_rng: Rng,
        dropout_rng: Rng,
        checkpoints: Optional[CheckpointRepository] = None,
        reports: Optional[ReportRepository] = None,
        workers: int = 1,
    ):
        self.config = train_config
        self.shuffle_rng = shuffle_rng
        self.dropout_rng = dropout_rng
        self.checkpoints = checkpoints
        self.reports = reports
        self.workers = workers

    def _manifest(self, network: CaseNetwork, vocab: Sequence[str], epoch: int, metric: Optional[float]) -> ModelManifest:
        return ModelManifest.build(network.config, self.config.dropout, list(vocab), epoch=epoch, val_metric=metric)

    def _validate(self, network: CaseNetwork, vocab: Sequence[str], val_examples: Sequence[Example]) -> Optional[float]:
        if not val_examples:
            return None
        report = evaluate(CaseRanker(network, vocab), val_examples, [self.config.selection_k], self.workers)
        value = report.value(self.config.selection_metric, self.config.selection_k)
        return None if math.isnan(value) else value

    def _run_epoch(self, network: CaseNetwork, optimizer: Adam, examples: Sequence[Example], index: dict, epoch: int) -> tuple[float, int]:
        network.train()
        order = self.shuffle_rng.permutation(len(examples))
        losses = []
        size = self.config.batch_size
        for batch_id, start in enumerate(range(0, len(examples), size)):
            batch = batch_collate([examples[i] for i in order[start : start + size]], index)
            optimizer.zero_grad()
            try:
                loss = network.loss(batch, self.dropout_rng)
            except NumericalError as e:
                raise TrainingError(f"epoch {epoch} batch {batch_id}: {e.message}")
            if not np.isfinite(loss.data).all():
                raise TrainingError(f"epoch {epoch} batch {batch_id}: non-finite loss")
            loss.backward()
            optimizer.step()
            losses.append(loss.item())
        return float(np.mean(losses)), len(losses)

    def train(
        self,
        network: CaseNetwork,
        vocab: Sequence[str],
        train_examples: Sequence[Example],
        val_examples: Sequence[Example] = (),
    ) -> TrainingResult:
        """
        Train for ``epochs`` epochs and restore the selected epoch's weights.

        Returns:
            TrainingResult with the network holding the best weights
        """
        if not train_examples:
            raise DataError("training set is empty")
        index = vocab_index(vocab)
        cfg = self.config
        optimizer = Adam(
            network.named_parameters(),
            lr=cfg.lr,
            weight_decay=cfg.weight_decay,
            decoupled=cfg.decoupled_weight_decay,
            clip_norm=cfg.clip_norm,
        )
        log: list[EpochLog] = []
        best_epoch, best_metric, best_state = 0, None, None
        steps = 0

        with precision(network.config.precision):
            for epoch in range(1, cfg.epochs + 1):
                started = time.perf_counter()
                loss, batches = self._run_epoch(network, optimizer, train_examples, index, epoch)
                steps += batches
                metric = self._validate(network, vocab, val_examples)
                seconds = time.perf_counter() - started
                log.append(EpochLog(epoch=epoch, loss=loss, val_metric=metric, seconds=seconds))
                logger.info(
                    "epoch %d/%d loss=%.5f val_%s@%d=%s (%.1fs)",
                    epoch, cfg.epochs, loss, cfg.selection_metric.value, cfg.selection_k,
                    "n/a" if metric is None else f"{metric:.4f}", seconds,
                )

                if self.checkpoints is not None and cfg.save_every_epoch:
                    self.checkpoints.save(epoch_checkpoint_name(epoch), self._manifest(network, vocab, epoch, metric), network.state_dict())
                improved = best_state is None or (
                    metric is not None and (best_metric is None or metric > best_metric)
                )
                if improved or (metric is None and best_metric is None):
                    best_epoch, best_metric, best_state = epoch, metric, network.state_dict()

        network.load_state_dict(best_state)
        network.eval()
        best_path = None
        if self.checkpoints is not None:
            best_path = self.checkpoints.save(
                BEST_CHECKPOINT, self._manifest(network, vocab, best_epoch, best_metric), best_state
            )
        if self.reports is not None:
            self.reports.write_training_log(log, TRAINING_LOG)
        logger.info("Selected epoch %d (val metric %s) after %d optimizer steps", best_epoch, best_metric, steps)
        return TrainingResult(network, best_epoch, best_metric, log, best_path, steps)
