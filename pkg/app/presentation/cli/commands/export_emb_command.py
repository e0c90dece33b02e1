"""export-emb: per-candidate c and z vectors with labels, as CSV"""
import argparse
import logging
from pathlib import Path

from app.data.repositories.report_repository import ReportRepository
from app.domain.model.network import restore_network
from app.domain.services.dataset_service import check_manifest, load_histories, prepare
from app.domain.services.embedding_service import export_embeddings
from app.infrastructure.config import write_resolved_config
from app.presentation.cli.common import load_checkpoint, resolve_config, with_model

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("export-emb", help="dump cadence and set-encoded vectors for plotting")
    parser.add_argument("--checkpoint", type=Path, required=True)
    parser.add_argument("--data", type=Path, required=True, help="canonical history file")
    parser.add_argument("--out", type=Path, required=True, help="CSV file to write")
    parser.add_argument("--split", choices=("test", "val", "train"), default="test")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    manifest, state = load_checkpoint(args.checkpoint)
    config = with_model(resolve_config(args), manifest)
    data = prepare(load_histories(args.data), config)
    check_manifest(manifest, data.vocab)
    network = restore_network(manifest.model, len(manifest.vocab), manifest.dropout, state)
    export = export_embeddings(network, manifest.vocab, getattr(data, args.split).examples)
    target = ReportRepository(args.out.parent).write_embeddings(export.rows, export.cadence, export.encoded, args.out.name)
    write_resolved_config(config, args.out.parent)
    print(f"{len(export.rows)} candidate rows -> {target}")
    return 0
