"""Checkpoint manifest schema"""
import hashlib
from typing import Optional

from pydantic import BaseModel

from app.schemas.model import ModelConfig

CHECKPOINT_FORMAT_VERSION = 1


def vocab_hash(vocab: list[str]) -> str:
    digest = hashlib.sha256()
    for item in vocab:
        digest.update(item.encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


class ModelManifest(BaseModel):
    """Everything needed to rebuild the network and refuse mismatched data."""
    format_version: int = CHECKPOINT_FORMAT_VERSION
    model: ModelConfig
    dropout: float
    vocab: list[str]
    vocab_hash: str
    epoch: Optional[int] = None
    val_metric: Optional[float] = None

    @classmethod
    def build(cls, model: ModelConfig, dropout: float, vocab: list[str], **extra) -> "ModelManifest":
        return cls(model=model, dropout=dropout, vocab=list(vocab), vocab_hash=vocab_hash(list(vocab)), **extra)
