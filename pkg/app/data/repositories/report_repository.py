"""Report repository: CSV/JSON artifacts written by the pipeline"""
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from app.data.models.example import Example
from app.schemas.evaluation import BenchReport, EvalReport
from app.schemas.synth import PlantedCadence
from app.schemas.training import EpochLog


class ReportRepository:
    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def _target(self, name: str) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        return self.directory / name

    def write_json(self, name: str, payload: BaseModel) -> Path:
        target = self._target(name)
        target.write_text(payload.model_dump_json(indent=2), encoding="utf-8")
        return target

    def write_eval_report(self, report: EvalReport, name: str = "eval_report.csv") -> Path:
        """``metric,k,value,n_evaluated`` plus a text table next to it."""
        target = self._target(name)
        frame = pd.DataFrame(
            [(row.metric.value, row.k, row.value, report.n_evaluated) for row in report.rows],
            columns=["metric", "k", "value", "n_evaluated"],
        )
        frame.to_csv(target, index=False, float_format="%.6f")
        target.with_suffix(".txt").write_text(report.render_table() + "\n", encoding="utf-8")
        return target

    def write_training_log(self, log: Sequence[EpochLog], name: str = "training_log.csv") -> Path:
        target = self._target(name)
        pd.DataFrame([row.model_dump() for row in log], columns=["epoch", "loss", "val_metric", "seconds"]).to_csv(
            target, index=False
        )
        return target

    def write_truth(self, planted: Iterable[PlantedCadence], name: str = "truth.csv") -> Path:
        target = self._target(name)
        pd.DataFrame([p.model_dump() for p in planted], columns=["user", "item", "period", "phase"]).to_csv(
            target, index=False
        )
        return target

    def write_embeddings(
        self,
        rows: Sequence[tuple[str, str, int]],
        cadence: np.ndarray,
        encoded: np.ndarray,
        name: str = "embeddings.csv",
    ) -> Path:
        """One row per candidate: user, item, label, c_0..c_{d_c-1}, z_0..z_{d_h-1}."""
        target = self._target(name)
        frame = pd.DataFrame(rows, columns=["user", "item", "label"])
        c_frame = pd.DataFrame(cadence, columns=[f"c_{i}" for i in range(cadence.shape[1])])
        z_frame = pd.DataFrame(encoded, columns=[f"z_{i}" for i in range(encoded.shape[1])])
        pd.concat([frame, c_frame, z_frame], axis=1).to_csv(target, index=False, float_format="%.6g")
        return target

    def write_signal_dump(self, examples: Iterable[Example], name: str = "signals.tsv") -> Path:
        """Debug dump: ``user<TAB>item<TAB>label<TAB>bitstring`` per candidate."""
        target = self._target(name)
        with target.open("w", encoding="utf-8", newline="\n") as fh:
            for example in examples:
                for index, item in enumerate(example.candidates):
                    bits = example.signal(index).bitstring()
                    fh.write(f"{example.user_id}\t{item}\t{int(example.labels[index])}\t{bits}\n")
        return target

    def write_bench(self, report: BenchReport, name: str = "bench.csv") -> Path:
        target = self._target(name)
        pd.DataFrame([row.model_dump() for row in report.rows]).to_csv(target, index=False)
        self.write_json(Path(name).with_suffix(".json").name, report)
        return target


def read_truth(path: Path) -> list[PlantedCadence]:
    frame = pd.read_csv(path, dtype={"user": str, "item": str, "period": int, "phase": int})
    return [
        PlantedCadence(user=row.user, item=row.item, period=int(row.period), phase=int(row.phase))
        for row in frame.itertuples(index=False)
    ]
