#!/usr/bin/env python3
"""
Ablation Sweep
==============

Trains full CASE and its four ablations (w/o CNN, w/o set encoder, w/o item
embedding, PermEqMean in place of ISAB) on one history file over several
seeds, then reports which ablation loses the most against full CASE on each
seed and the majority across seeds.

Usage:
    python scripts/ablation_sweep.py --data corpus/histories.tsv --out sweep/ [--seeds 0,1,2]

Options:
    --data      Canonical history file (from `case ingest` or `case synth`)
    --out       Output directory; one sub-directory per seed and variant
    --seeds     Comma-separated root seeds (default 0,1,2)
    --config    TOML/JSON run configuration shared by every variant
    --metric    precision | recall | ndcg (default precision)
    --k         Cutoff for the comparison (default 1)
"""

import argparse
import logging
import os
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pandas as pd

from app.domain.enums import MetricName
from app.domain.exceptions import DomainException
from app.domain.services.dataset_service import load_histories, prepare
from app.domain.services.experiment_service import (
    ABLATIONS,
    FULL_MODEL,
    largest_drop,
    majority,
    train_and_evaluate,
    with_ablation,
)
from app.infrastructure.config import load_config, write_resolved_config
from app.infrastructure.logging_setup import configure_logging

logger = logging.getLogger("ablation_sweep")


def run_sweep(args: argparse.Namespace) -> pd.DataFrame:
    histories = load_histories(args.data)
    metric = MetricName(args.metric)
    rows = []
    votes = []
    for seed in args.seeds:
        config = load_config(args.config, {"seed": seed})
        data = prepare(histories, config)
        reports = {}
        for name, flags in ABLATIONS.items():
            variant = with_ablation(config, flags)
            out = args.out / f"seed_{seed}" / name
            run = train_and_evaluate(name, variant, data, out)
            write_resolved_config(variant, out)
            reports[name] = run.report
            rows.append(
                {
                    "seed": seed,
                    "variant": name,
                    "best_epoch": run.training.best_epoch,
                    "value": run.report.value(metric, args.k),
                }
            )
        votes.append(largest_drop(reports, metric, args.k))
        print(f"seed {seed}: largest drop -> {votes[-1]}")

    winner, count = majority(votes)
    print("\n" + "=" * 60)
    print(f"ABLATION SWEEP ({metric.value}@{args.k}, {len(args.seeds)} seeds)")
    print("=" * 60)
    table = pd.DataFrame(rows).pivot(index="variant", columns="seed", values="value")
    table["mean"] = table.mean(axis=1)
    print(table.loc[list(ABLATIONS)].to_string(float_format=lambda v: f"{v:.4f}"))
    print(f"\nLargest drop vs {FULL_MODEL}: {winner} ({count}/{len(votes)} seeds)")
    return pd.DataFrame(rows)


def main():
    """Run the sweep and write sweep.csv"""
    parser = argparse.ArgumentParser(description='Train CASE and its ablations over several seeds')
    parser.add_argument('--data', type=Path, required=True, help='canonical history file')
    parser.add_argument('--out', type=Path, required=True, help='output directory')
    parser.add_argument(
        '--seeds',
        type=lambda raw: [int(s) for s in raw.split(',') if s.strip()],
        default=[0, 1, 2],
        help='comma-separated root seeds',
    )
    parser.add_argument('--config', type=Path, help='run configuration shared by every variant')
    parser.add_argument('--metric', choices=[m.value for m in MetricName], default=MetricName.PRECISION.value)
    parser.add_argument('--k', type=int, default=1)
    parser.add_argument('--log-level', default='INFO')
    args = parser.parse_args()

    configure_logging(args.log_level)
    try:
        frame = run_sweep(args)
    except DomainException as e:
        logger.error("%s: %s", type(e).__name__, e.message)
        sys.exit(e.exit_code)
    args.out.mkdir(parents=True, exist_ok=True)
    frame.to_csv(args.out / "sweep.csv", index=False, float_format="%.6f")
    sys.exit(0)


if __name__ == "__main__":
    main()
