"""predict: rank one user's items as of an arbitrary day"""
import argparse
import logging
from pathlib import Path

from app.data.models.history import Basket
from app.domain.exceptions import DataError
from app.domain.model.network import restore_network
from app.domain.model.ranker import CaseRanker, rank
from app.domain.services.dataset_service import check_manifest, load_histories
from app.domain.services.ingest_service import build_vocab
from app.domain.services.signal_service import build_example
from app.presentation.cli.common import load_checkpoint, resolve_config

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("predict", help="top-k items for one user")
    parser.add_argument("--data", type=Path, required=True, help="canonical history file")
    parser.add_argument("--checkpoint", type=Path, required=True)
    parser.add_argument("--user", required=True)
    parser.add_argument("--as-of-day", type=int, help="query day (default: the day after the user's last basket)")
    parser.add_argument("--k", type=int, default=10)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    if args.k < 1:
        raise DataError(f"--k must be >= 1, got {args.k}")
    config = resolve_config(args)
    manifest, state = load_checkpoint(args.checkpoint)
    histories = load_histories(args.data)
    check_manifest(manifest, build_vocab(histories))
    history = next((h for h in histories if h.user_id == args.user), None)
    if history is None:
        raise DataError(f"user {args.user!r} is not in {args.data}")

    as_of = args.as_of_day if args.as_of_day is not None else history.target.day + 1
    example = build_example(history, Basket(as_of, frozenset()), manifest.model.window, config.data.cap_n)
    if example is None:
        raise DataError(f"user {args.user!r} has no purchases before day {as_of}: no candidates")

    ranker = CaseRanker(restore_network(manifest.model, len(manifest.vocab), manifest.dropout, state), manifest.vocab)
    scores = ranker.scores(example)
    ranked = rank(scores, example, args.k)
    position = {item: i for i, item in enumerate(example.candidates)}
    print(f"user {args.user} as of day {as_of} ({example.n} candidates)")
    for place, item in enumerate(ranked, start=1):
        print(f"{place:>3}  {item}\t{float(scores[position[item]]):.6f}")
    return 0
