"""Helpers shared by the CLI commands"""
import argparse
import logging
from pathlib import Path
from typing import Any

import numpy as np

from app.data.repositories.checkpoint_repository import CheckpointRepository
from app.infrastructure.config import RunConfig, load_config, merge_values, parse_overrides
from app.schemas.checkpoint import ModelManifest

logger = logging.getLogger(__name__)


def resolve_config(args: argparse.Namespace, **flag_overrides: Any) -> RunConfig:
    """
    Config file, then ``--set`` pairs, then dedicated flags (``section__key=value``
    keyword arguments; None values are ignored).
    """
    overrides = parse_overrides(args.set or [])
    if args.threads is not None:
        overrides["threads"] = args.threads
    for dotted, value in flag_overrides.items():
        if value is None:
            continue
        section, key = dotted.split("__", 1)
        overrides = merge_values(overrides, {section: {key: value}})
    return load_config(args.config, overrides)


def load_checkpoint(path: Path) -> tuple[ModelManifest, dict[str, np.ndarray]]:
    manifest, state = CheckpointRepository.load(path)
    logger.info("Loaded checkpoint %s (epoch %s, %d tensors)", path, manifest.epoch, len(state))
    return manifest, state


def with_model(config: RunConfig, manifest: ModelManifest) -> RunConfig:
    """The run config with model.* replaced by what the checkpoint was trained with."""
    return config.model_copy(update={"model": manifest.model})


def parse_int_list(raw: str) -> list[int]:
    try:
        values = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {raw!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values
