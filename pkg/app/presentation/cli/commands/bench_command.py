"""bench: per-query inference time of CASE and TIFUKNN against train-population size"""
import argparse
import logging
from pathlib import Path
from typing import Sequence

from app.data.models.history import UserHistory
from app.data.repositories.report_repository import ReportRepository
from app.domain.baselines import TifuKnnRanker, TifuPopulation
from app.domain.model.network import build_network
from app.domain.model.ranker import CaseRanker
from app.domain.services.benchmark_service import bench_inference
from app.domain.services.ingest_service import build_vocab
from app.domain.services.signal_service import build_eval_set
from app.domain.services.synth_service import generate
from app.infrastructure.config import write_resolved_config
from app.presentation.cli.common import parse_int_list, resolve_config

logger = logging.getLogger(__name__)

DEFAULT_POPULATIONS = "1000,2000,4000"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("bench", help="inference timing versus train-population size")
    parser.add_argument("--populations", type=parse_int_list, default=parse_int_list(DEFAULT_POPULATIONS))
    parser.add_argument("--queries", type=int, default=100, help="held-out users scored per population")
    parser.add_argument("--repeats", type=int, default=3, help="timing repeats; the fastest is kept")
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    populations = sorted(args.populations)
    config = resolve_config(args, synth__n_users=populations[-1] + args.queries)
    corpus = generate(config.synth, config.rng("bench").child("synth"))
    histories = corpus.histories
    population, held_out = histories[: populations[-1]], histories[populations[-1] :]
    queries = build_eval_set(histories, [h.user_id for h in held_out], config.model.window, config.data.cap_n).examples

    vocab = build_vocab(histories)
    network = build_network(config.model, len(vocab), config.train.dropout, config.rng("init"))
    by_user = {h.user_id: h for h in histories}

    def case_factory(_: Sequence[UserHistory]) -> CaseRanker:
        return CaseRanker(network, vocab)

    def tifu_factory(users: Sequence[UserHistory]) -> TifuKnnRanker:
        return TifuKnnRanker(TifuPopulation.build(users, config.tifu), by_user, config.tifu)

    report = bench_inference(
        {"case": case_factory, "tifuknn": tifu_factory}, population, queries, populations, repeats=args.repeats
    )
    ReportRepository(args.out).write_bench(report)
    write_resolved_config(config, args.out)
    for name in report.slopes:
        print(f"{name}: slope={report.slopes[name]:.3e} s/query/user ratio(largest/smallest)={report.ratios[name]:.2f}")
    return 0
