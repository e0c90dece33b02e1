"""Model configuration schemas: dimensions, scales, ablation flags"""
import logging
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.domain.enums import Precision, SetEncoderKind

logger = logging.getLogger(__name__)

DEFAULT_SCALES = [7, 14, 28, 91, 182]


class AblationFlags(BaseModel):
    model_config = ConfigDict(frozen=True)

    use_cnn: bool = True
    use_set_encoder: bool = True
    use_item_embedding: bool = True
    set_encoder_kind: SetEncoderKind = SetEncoderKind.ISAB

    @model_validator(mode="after")
    def check_inputs(self):
        if not (self.use_cnn or self.use_item_embedding):
            raise ValueError("at least one of use_cnn / use_item_embedding must be enabled")
        return self


class ModelConfig(BaseModel):
    """model.* keys"""
    model_config = ConfigDict(extra="forbid")

    window: int = Field(364, ge=1, description="T, calendar days per cadence signal")
    scales: list[int] = Field(default_factory=lambda: list(DEFAULT_SCALES))
    filters_per_scale: int = Field(1, ge=1)
    d_c: int = Field(128, ge=1)
    d_e: int = Field(128, ge=1)
    d_h: int = Field(256, ge=1)
    n_induced: int = Field(32, ge=1)
    n_heads: int = Field(4, ge=1)
    n_set_layers: int = Field(2, ge=1)
    scorer_hidden: Optional[int] = Field(None, ge=1, description="defaults to d_h // 2")
    precision: Precision = Precision.FLOAT32

    use_cnn: bool = True
    use_set_encoder: bool = True
    use_item_embedding: bool = True
    set_encoder_kind: SetEncoderKind = SetEncoderKind.ISAB

    @field_validator("scales")
    @classmethod
    def validate_scales(cls, v: list[int]) -> list[int]:
        if not v:
            raise ValueError("at least one kernel scale is required")
        if any(w < 1 for w in v):
            raise ValueError("kernel scales must be positive")
        if len(set(v)) != len(v):
            raise ValueError("kernel scales must be distinct")
        return v

    @model_validator(mode="after")
    def check_shapes(self):
        too_wide = [w for w in self.scales if w > self.window]
        if too_wide:
            raise ValueError(f"kernel scales {too_wide} exceed window T={self.window}")
        ragged = [w for w in self.scales if self.window % w]
        if ragged:
            logger.info("Window T=%d not divisible by scales %s; trailing days are ignored", self.window, ragged)
        if self.d_h % self.n_heads:
            raise ValueError(f"d_h={self.d_h} must be divisible by n_heads={self.n_heads}")
        if not (self.use_cnn or self.use_item_embedding):
            raise ValueError("at least one of use_cnn / use_item_embedding must be enabled")
        return self

    @property
    def flags(self) -> AblationFlags:
        return AblationFlags(
            use_cnn=self.use_cnn,
            use_set_encoder=self.use_set_encoder,
            use_item_embedding=self.use_item_embedding,
            set_encoder_kind=self.set_encoder_kind,
        )

    @property
    def hidden(self) -> int:
        return self.scorer_hidden or max(1, self.d_h // 2)

    @property
    def cadence_features(self) -> int:
        """Width of the concatenated conv activations."""
        return sum(self.filters_per_scale * (self.window // w) for w in self.scales)

    @property
    def needs_adapter(self) -> bool:
        return self.d_c + self.d_e != self.d_h
