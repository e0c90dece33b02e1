"""Per-candidate cadence (c) and set-encoded (z) vectors for external plotting"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from app.data.models.example import Example
from app.domain.autodiff.tensor import no_grad, precision
from app.domain.model.network import CaseNetwork
from app.domain.services.signal_service import batch_collate, vocab_index

EXPORT_BATCH = 64


@dataclass(frozen=True)
class EmbeddingExport:
    rows: list[tuple[str, str, int]]
    cadence: np.ndarray
    encoded: np.ndarray


def export_embeddings(network: CaseNetwork, vocab: Sequence[str], examples: Sequence[Example]) -> EmbeddingExport:
    index = vocab_index(vocab)
    network.eval()
    rows: list[tuple[str, str, int]] = []
    cadence, encoded = [], []
    with no_grad(), precision(network.config.precision):
        for start in range(0, len(examples), EXPORT_BATCH):
            chunk = examples[start : start + EXPORT_BATCH]
            out = network.forward(batch_collate(chunk, index))
            for b, example in enumerate(chunk):
                rows.extend((example.user_id, item, int(label)) for item, label in zip(example.candidates, example.labels))
                cadence.append(out.cadence.data[b, : example.n])
                encoded.append(out.encoded.data[b, : example.n])
    config = network.config
    return EmbeddingExport(
        rows=rows,
        cadence=np.concatenate(cadence) if cadence else np.zeros((0, config.d_c)),
        encoded=np.concatenate(encoded) if encoded else np.zeros((0, config.d_h)),
    )
