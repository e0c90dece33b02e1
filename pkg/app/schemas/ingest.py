"""Ingestion schemas: CSV column mapping, split fractions, dataset summary"""
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.domain.enums import InputSchema


class FormatSpec(BaseModel):
    """Which CSV columns carry user, item and calendar information."""
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_kind: InputSchema = Field(InputSchema.DAY, alias="schema")
    user_col: str = "user"
    item_col: str = "item"
    day_col: str = "day"
    order_col: str = "order_seq"
    gap_col: str = "days_since_prior_order"
    date_col: str = "date"
    date_format: str = "%Y-%m-%d"

    def required_columns(self) -> list[str]:
        if self.schema_kind == InputSchema.DAY:
            return [self.user_col, self.item_col, self.day_col]
        if self.schema_kind == InputSchema.GAP:
            return [self.user_col, self.item_col, self.order_col, self.gap_col]
        return [self.user_col, self.item_col, self.date_col]


class SplitSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    train_frac: float = Field(0.8, gt=0.0, lt=1.0)
    val_frac: float = Field(0.1, ge=0.0, lt=1.0)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_fractions(self):
        if self.train_frac + self.val_frac >= 1.0:
            raise ValueError("train_frac + val_frac must be < 1")
        return self


class DataConfig(FormatSpec):
    """data.* keys: column mapping plus split fractions and candidate cap."""
    train_frac: float = Field(0.8, gt=0.0, lt=1.0)
    val_frac: float = Field(0.1, ge=0.0, lt=1.0)
    cap_n: int = Field(512, ge=1)

    @model_validator(mode="after")
    def check_fractions(self):
        if self.train_frac + self.val_frac >= 1.0:
            raise ValueError("data.train_frac + data.val_frac must be < 1")
        return self

    def format_spec(self) -> FormatSpec:
        return FormatSpec.model_validate(self.model_dump(include=set(FormatSpec.model_fields), by_alias=True))

    def split_spec(self, seed: int) -> SplitSpec:
        return SplitSpec(train_frac=self.train_frac, val_frac=self.val_frac, seed=seed)


class UserSplit(BaseModel):
    train: list[str]
    val: list[str]
    test: list[str]


class DatasetSummary(BaseModel):
    users: int
    items: int
    baskets: int
    baskets_per_user: float
    items_per_basket: float
    skipped_rows: int = 0
    dropped_users: int = 0
    reconstructed_days: bool = False
    source: Optional[str] = None
