"""Synthetic corpus specification"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class SynthSpec(BaseModel):
    """synth.* keys"""
    model_config = ConfigDict(extra="forbid")

    n_users: int = Field(2000, ge=1)
    items_per_user: int = Field(4, ge=1, description="planted periodic items per user")
    periods: list[int] = Field(default_factory=lambda: [7, 14, 28])
    jitter_sd: float = Field(1.0, ge=0, description="phase jitter sigma in days")
    p_miss: float = Field(0.1, ge=0, le=1)
    distractors_per_user: int = Field(3, ge=0)
    distractor_rate_multiplier: float = Field(2.0, gt=0, description="distractor purchases relative to the mean periodic item")
    n_periodic_items: int = Field(60, ge=1, description="size of the shared periodic item pool")
    n_distractor_items: int = Field(30, ge=1, description="size of the shared distractor item pool")
    horizon: int = Field(730, ge=2)
    seed: Optional[int] = Field(None, ge=0)

    @field_validator("periods")
    @classmethod
    def validate_periods(cls, v: list[int]) -> list[int]:
        if not v or any(p < 2 for p in v):
            raise ValueError("periods must be >= 2")
        return v

    @model_validator(mode="after")
    def check_horizon(self):
        if self.horizon < 2 * max(self.periods):
            raise ValueError(f"horizon {self.horizon} must be at least twice the longest period {max(self.periods)}")
        if self.items_per_user > self.n_periodic_items:
            raise ValueError("items_per_user cannot exceed n_periodic_items")
        if self.distractors_per_user > self.n_distractor_items:
            raise ValueError("distractors_per_user cannot exceed n_distractor_items")
        return self


class PlantedCadence(BaseModel):
    user: str
    item: str
    period: int
    phase: int
