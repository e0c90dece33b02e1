"""train: history file -> epoch checkpoints, best.ckpt and training_log.csv"""
import argparse
import logging
from pathlib import Path

from app.data.repositories.checkpoint_repository import CheckpointRepository
from app.data.repositories.report_repository import ReportRepository
from app.domain.exceptions import DataError
from app.domain.model.network import build_network
from app.domain.services.dataset_service import load_histories, prepare
from app.domain.services.training_service import TrainingService
from app.infrastructure.config import write_resolved_config
from app.presentation.cli.common import resolve_config

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("train", help="train a CASE model")
    parser.add_argument("--data", type=Path, required=True, help="canonical history file")
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--epochs", type=int, help="overrides train.epochs")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args, train__epochs=args.epochs)
    data = prepare(load_histories(args.data), config)
    if not data.train.examples:
        raise DataError("no training examples could be built")

    network = build_network(config.model, len(data.vocab), config.train.dropout, config.rng("init"))
    service = TrainingService(
        config.train,
        shuffle_rng=config.rng("shuffle"),
        dropout_rng=config.rng("dropout"),
        checkpoints=CheckpointRepository(args.out),
        reports=ReportRepository(args.out),
        workers=config.threads,
    )
    result = service.train(network, data.vocab, data.train.examples, data.val.examples)
    write_resolved_config(config, args.out)
    metric = "n/a" if result.best_metric is None else f"{result.best_metric:.4f}"
    print(f"best epoch {result.best_epoch} ({config.train.selection_metric.value}@{config.train.selection_k}={metric}) -> {result.best_path}")
    return 0
