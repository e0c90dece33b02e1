"""synth: generate a corpus with planted cadences"""
import argparse
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any

from app.domain.exceptions import ConfigurationError
from app.domain.services.synth_service import generate, write_corpus
from app.infrastructure.config import write_resolved_config
from app.presentation.cli.common import resolve_config

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("synth", help="generate a synthetic corpus and its truth table")
    parser.add_argument("--spec", type=Path, help="TOML/JSON file with synth.* keys (top level or under [synth])")
    parser.add_argument("--out", type=Path, required=True, help="output directory")
    parser.add_argument("--users", type=int, help="overrides synth.n_users")
    parser.set_defaults(handler=run)


def read_spec_file(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise ConfigurationError(f"spec file {path} does not exist")
    try:
        if path.suffix == ".toml":
            values = tomllib.loads(path.read_text(encoding="utf-8"))
        elif path.suffix == ".json":
            values = json.loads(path.read_text(encoding="utf-8"))
        else:
            raise ConfigurationError(f"spec file {path} must be .toml or .json")
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"cannot parse spec file {path}: {e}")
    return values.get("synth", values)


def run(args: argparse.Namespace) -> int:
    spec_values = read_spec_file(args.spec) if args.spec else {}
    flags = {f"synth__{key}": value for key, value in spec_values.items()}
    flags["synth__n_users"] = args.users
    config = resolve_config(args, **flags)
    corpus = generate(config.synth, config.rng("synth"))
    history_path, truth_path = write_corpus(corpus, args.out)
    write_resolved_config(config, args.out)
    print(f"{len(corpus.histories)} users -> {history_path}, truth -> {truth_path}")
    return 0
