"""eval: leave-one-out metrics for a checkpoint or a baseline"""
import argparse
import logging
from pathlib import Path
from typing import Optional

from app.data.models.history import UserHistory
from app.data.repositories.report_repository import ReportRepository, read_truth
from app.domain.baselines import DueDateOracleRanker, PersonalTopRanker, TifuKnnRanker, TifuPopulation
from app.domain.enums import BaselineKind
from app.domain.exceptions import ConfigurationError
from app.domain.metrics import evaluate
from app.domain.model.network import restore_network
from app.domain.model.ranker import CaseRanker
from app.domain.ranking import Ranker
from app.domain.services.dataset_service import PreparedData, check_manifest, load_histories, prepare
from app.infrastructure.config import RunConfig, write_resolved_config
from app.presentation.cli.common import load_checkpoint, parse_int_list, resolve_config, with_model

logger = logging.getLogger(__name__)

SPLITS = ("test", "val", "train")


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("eval", help="evaluate a checkpoint or baseline on held-out users")
    parser.add_argument("--data", type=Path, required=True, help="canonical history file")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--checkpoint", type=Path, help="CASE checkpoint")
    source.add_argument("--baseline", choices=[b.value for b in BaselineKind])
    parser.add_argument("--truth", type=Path, help="truth CSV of a synthetic corpus (oracle baseline)")
    parser.add_argument("--ks", type=parse_int_list, help="comma-separated cutoffs, e.g. 1,3,5,10")
    parser.add_argument("--split", choices=SPLITS, default="test")
    parser.add_argument("--out", type=Path, default=Path("eval_out"), help="output directory")
    parser.add_argument("--dump-signals", action="store_true", help="also write signals.tsv for the evaluated examples")
    parser.set_defaults(handler=run)


def build_baseline(kind: BaselineKind, data: PreparedData, config: RunConfig, truth: Optional[Path] = None) -> Ranker:
    kind = BaselineKind(kind)
    if kind == BaselineKind.PERSONAL_TOP:
        return PersonalTopRanker()
    if kind == BaselineKind.TIFUKNN:
        by_user: dict[str, UserHistory] = {h.user_id: h for h in data.histories}
        population = TifuPopulation.build([by_user[u] for u in data.split.train], config.tifu)
        return TifuKnnRanker(population, by_user, config.tifu)
    if truth is None:
        raise ConfigurationError("--truth is required for the oracle baseline")
    return DueDateOracleRanker(read_truth(truth))


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args, eval__ks=args.ks)
    histories = load_histories(args.data)
    if args.checkpoint is not None:
        manifest, state = load_checkpoint(args.checkpoint)
        config = with_model(config, manifest)
        data = prepare(histories, config)
        check_manifest(manifest, data.vocab)
        ranker: Ranker = CaseRanker(restore_network(manifest.model, len(manifest.vocab), manifest.dropout, state), manifest.vocab)
    else:
        data = prepare(histories, config)
        ranker = build_baseline(args.baseline, data, config, args.truth)

    examples = getattr(data, args.split).examples
    report = evaluate(ranker, examples, config.eval.ks, workers=config.threads)
    reports = ReportRepository(args.out)
    reports.write_eval_report(report)
    if args.dump_signals:
        reports.write_signal_dump(examples)
    write_resolved_config(config, args.out)
    print(report.render_table())
    return 0
