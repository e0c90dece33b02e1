"""
Experiment service - train-then-evaluate runs and ablation comparisons.

Used by the ablation sweep script and the acceptance tests; the CLI train and
eval commands cover the same steps one at a time.
"""
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

from app.data.repositories.checkpoint_repository import CheckpointRepository
from app.data.repositories.report_repository import ReportRepository
from app.domain.autodiff.flops import count_flops
from app.domain.autodiff.tensor import no_grad
from app.domain.enums import MetricName, SetEncoderKind
from app.domain.metrics import evaluate
from app.domain.model.network import CaseNetwork, build_network, case_forward
from app.domain.model.ranker import CaseRanker
from app.domain.services.dataset_service import PreparedData
from app.domain.services.signal_service import vocab_index
from app.domain.services.training_service import TrainingResult, TrainingService
from app.infrastructure.config import RunConfig
from app.schemas.evaluation import EvalReport

logger = logging.getLogger(__name__)

FULL_MODEL = "case"
ABLATIONS: dict[str, dict] = {
    FULL_MODEL: {},
    "no_cnn": {"use_cnn": False},
    "no_set_encoder": {"use_set_encoder": False},
    "no_item_embedding": {"use_item_embedding": False},
    "perm_eq_mean": {"set_encoder_kind": SetEncoderKind.PERM_EQ_MEAN},
}


@dataclass(frozen=True)
class ExperimentRun:
    name: str
    training: TrainingResult
    report: EvalReport


def with_ablation(config: RunConfig, flags: Mapping[str, object]) -> RunConfig:
    model = config.model.model_validate({**config.model.model_dump(), **flags})
    return config.model_copy(update={"model": model})


def train_and_evaluate(
    name: str,
    config: RunConfig,
    data: PreparedData,
    out: Optional[Path] = None,
) -> ExperimentRun:
    """Train on the train split, select on val, evaluate on test."""
    network = build_network(config.model, len(data.vocab), config.train.dropout, config.rng("init"))
    service = TrainingService(
        config.train,
        shuffle_rng=config.rng("shuffle"),
        dropout_rng=config.rng("dropout"),
        checkpoints=CheckpointRepository(out) if out else None,
        reports=ReportRepository(out) if out else None,
        workers=config.threads,
    )
    training = service.train(network, data.vocab, data.train.examples, data.val.examples)
    ranker = CaseRanker(training.network, data.vocab)
    ranker.name = name
    report = evaluate(ranker, data.test.examples, config.eval.ks, workers=config.threads)
    if out:
        ReportRepository(out).write_eval_report(report)
    return ExperimentRun(name, training, report)


def largest_drop(reports: Mapping[str, EvalReport], metric: MetricName, k: int) -> str:
    """Name of the ablation whose score falls furthest below the full model's."""
    full = reports[FULL_MODEL].value(metric, k)
    drops = {name: full - report.value(metric, k) for name, report in reports.items() if name != FULL_MODEL}
    return max(sorted(drops), key=lambda name: drops[name])


def majority(votes: Sequence[str]) -> tuple[str, int]:
    """Most frequent vote, earliest first among equals."""
    counts = Counter(votes)
    winner = max(votes, key=lambda v: (counts[v], -votes.index(v)))
    return winner, counts[winner]


def forward_flops(network: CaseNetwork, examples: Sequence, vocab: Sequence[str]) -> list[int]:
    """Floating-point operations of one eval-mode forward pass per example."""
    index = vocab_index(vocab)
    network.eval()
    counts = []
    for example in examples:
        with no_grad(), count_flops() as counter:
            case_forward(network, example, index)
        counts.append(counter.total)
    return counts
