"""Training configuration and log schemas"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from app.domain.enums import MetricName


class TrainConfig(BaseModel):
    """train.* keys"""
    model_config = ConfigDict(extra="forbid")

    epochs: int = Field(30, ge=1)
    lr: float = Field(1e-3, gt=0)
    weight_decay: float = Field(1e-5, ge=0)
    batch_size: int = Field(64, ge=1)
    dropout: float = Field(0.1, ge=0, lt=1)
    seed: Optional[int] = Field(None, ge=0, description="overrides the seed derived from the root seed")
    selection_metric: MetricName = MetricName.RECALL
    selection_k: int = Field(10, ge=1)
    clip_norm: Optional[float] = Field(None, gt=0)
    decoupled_weight_decay: bool = False
    sliding_targets: bool = False
    save_every_epoch: bool = True


class EpochLog(BaseModel):
    epoch: int
    loss: float
    val_metric: Optional[float]
    seconds: float
