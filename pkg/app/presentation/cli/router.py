"""CLI router - aggregates all subcommands"""
import argparse
from pathlib import Path

from app.presentation.cli.commands import (
    bench_command,
    eval_command,
    export_emb_command,
    ingest_command,
    predict_command,
    synth_command,
    train_command,
)

COMMANDS = (
    ingest_command,
    train_command,
    eval_command,
    predict_command,
    synth_command,
    export_emb_command,
    bench_command,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="case",
        description="Cadence-aware set-encoding next-basket repurchase recommender",
    )
    parser.add_argument("--config", type=Path, help="TOML or JSON run configuration")
    parser.add_argument(
        "--set",
        action="append",
        metavar="SECTION.KEY=VALUE",
        help="override one config key (repeatable); values are parsed as JSON when possible",
    )
    parser.add_argument("--threads", type=int, help="cap on worker threads")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    parser.add_argument("--log-file", type=Path)

    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for command in COMMANDS:
        command.register(subparsers)
    return parser
