"""ingest: transaction CSV -> canonical history file + summary.json"""
import argparse
import logging
from pathlib import Path

from app.data.repositories.report_repository import ReportRepository
from app.domain.enums import InputSchema
from app.domain.services.ingest_service import IngestService
from app.infrastructure.config import write_resolved_config
from app.presentation.cli.common import resolve_config

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.json"


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ingest", help="parse a transaction CSV into the canonical history file")
    parser.add_argument("--input", type=Path, required=True, help="transaction CSV")
    parser.add_argument(
        "--schema",
        choices=[s.value for s in InputSchema],
        help="day: user,item,day | gap: user,item,order_seq,days_since_prior_order | date: user,item,date",
    )
    parser.add_argument("--out", type=Path, required=True, help="history file to write")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    config = resolve_config(args, data__schema=args.schema)
    summary = IngestService().ingest_to_file(args.input, config.data.format_spec(), args.out)
    out_dir = args.out.parent
    ReportRepository(out_dir).write_json(SUMMARY_FILE, summary)
    write_resolved_config(config, out_dir)
    print(
        f"users={summary.users} items={summary.items} baskets={summary.baskets} "
        f"baskets/user={summary.baskets_per_user:.2f} items/basket={summary.items_per_basket:.2f} "
        f"skipped_rows={summary.skipped_rows} dropped_users={summary.dropped_users}"
    )
    return 0
