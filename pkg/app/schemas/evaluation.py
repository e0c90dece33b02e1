"""Evaluation configuration and report schemas"""
import math

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.domain.enums import MetricName

DEFAULT_KS = [1, 3, 5, 10]


class EvalConfig(BaseModel):
    """eval.* keys"""
    model_config = ConfigDict(extra="forbid")

    ks: list[int] = Field(default_factory=lambda: list(DEFAULT_KS))

    @field_validator("ks")
    @classmethod
    def validate_ks(cls, v: list[int]) -> list[int]:
        if not v or any(k < 1 for k in v):
            raise ValueError("every k must be >= 1")
        return sorted(set(v))


class MetricRow(BaseModel):
    metric: MetricName
    k: int
    value: float


class EvalReport(BaseModel):
    """Mean precision/recall/ndcg per k over examples with non-empty truth."""
    ranker: str
    rows: list[MetricRow]
    n_evaluated: int
    n_skipped: int

    def value(self, metric: MetricName, k: int) -> float:
        for row in self.rows:
            if row.metric == MetricName(metric) and row.k == k:
                return row.value
        raise KeyError(f"{metric}@{k} not in report")

    @property
    def ks(self) -> list[int]:
        return sorted({row.k for row in self.rows})

    def render_table(self) -> str:
        """Columns per k (Prec, Rec, NDCG), one line per ranker."""
        header = ["Method".ljust(14)]
        line = [self.ranker.ljust(14)]
        for k in self.ks:
            for metric, label in ((MetricName.PRECISION, "Prec"), (MetricName.RECALL, "Rec"), (MetricName.NDCG, "NDCG")):
                header.append(f"{label}@{k}".rjust(9))
                value = self.value(metric, k)
                line.append(("nan" if math.isnan(value) else f"{value:.4f}").rjust(9))
        footer = f"evaluated={self.n_evaluated} skipped_empty_truth={self.n_skipped}"
        return "\n".join([" ".join(header), " ".join(line), footer])


class BenchRow(BaseModel):
    ranker: str
    population: int
    queries: int
    seconds_per_query: float


class BenchReport(BaseModel):
    rows: list[BenchRow]
    slopes: dict[str, float]
    ratios: dict[str, float]
