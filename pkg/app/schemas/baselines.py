"""Baseline configuration schemas"""
from pydantic import BaseModel, ConfigDict, Field


class TifuConfig(BaseModel):
    """tifu.* keys (reference reimplementation defaults)"""
    model_config = ConfigDict(extra="forbid")

    groups: int = Field(7, ge=1, description="m, number of basket groups")
    within_decay: float = Field(0.9, gt=0, le=1, description="r_b, decay inside a group")
    group_decay: float = Field(0.7, gt=0, le=1, description="r_g, decay across groups")
    k_nn: int = Field(300, ge=0)
    alpha: float = Field(0.7, ge=0, le=1, description="weight of the user's own vector")
