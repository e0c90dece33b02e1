"""
The CASE network.

Per candidate: x_i = [c_i || e_i] where c_i comes from the cadence encoder and
e_i from the item embedding table. Disabled parts contribute a zero slice of
the same width, so every ablation keeps the downstream shapes. The stacked
candidates go through the set encoder (or straight through when it is
disabled) and a two-layer scorer yields one logit per candidate.
"""
import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from app.data.models.batch import Batch
from app.data.models.example import Example
from app.domain.autodiff import ops
from app.domain.autodiff.nn import Dense, Module, normal_init
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor, get_dtype, precision
from app.domain.model.cadence import CadenceEncoder
from app.domain.model.set_encoders import build_set_encoder
from app.domain.services.signal_service import batch_collate
from app.schemas.model import ModelConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CaseOutput:
    scores: Tensor
    cadence: Tensor
    encoded: Tensor


class Scorer(Module):
    def __init__(self, width: int, hidden: int, dropout: float, rng: Rng):
        self.hidden = Dense(width, hidden, rng.child("hidden"))
        self.out = Dense(hidden, 1, rng.child("out"))
        self.dropout = dropout

    def __call__(self, z: Tensor, rng: Optional[Rng] = None) -> Tensor:
        h = ops.dropout(ops.relu(self.hidden(z)), self.dropout, rng, self.training)
        logits = self.out(h)
        return ops.reshape(logits, logits.shape[:-1])


class CaseNetwork(Module):
    def __init__(self, config: ModelConfig, vocab_size: int, dropout: float, rng: Rng):
        ops.check_dropout_rate(dropout)
        self.config = config
        self.vocab_size = vocab_size
        self.dtype = get_dtype()
        self.cadence = (
            CadenceEncoder(config.window, config.scales, config.filters_per_scale, config.d_c, rng.child("cadence"))
            if config.use_cnn
            else None
        )
        self.item_embedding = (
            normal_init(rng.child("item_embedding"), (vocab_size, config.d_e)) if config.use_item_embedding else None
        )
        self.adapter = Dense(config.d_c + config.d_e, config.d_h, rng.child("adapter")) if config.needs_adapter else None
        self.set_encoder = (
            build_set_encoder(
                config.set_encoder_kind,
                config.d_h,
                config.n_heads,
                config.n_induced,
                config.n_set_layers,
                dropout,
                rng.child("set_encoder"),
            )
            if config.use_set_encoder
            else None
        )
        self.scorer = Scorer(config.d_h, config.hidden, dropout, rng.child("scorer"))

    def _zeros(self, batch: Batch, width: int) -> Tensor:
        return Tensor(np.zeros(batch.mask.shape + (width,)), dtype=self.dtype)

    def forward(self, batch: Batch, rng: Optional[Rng] = None) -> CaseOutput:
        """Scores [B, n_max] plus the intermediate c [B, n_max, d_c] and z [B, n_max, d_h]."""
        if self.cadence is not None:
            cadence = self.cadence(Tensor(batch.signals, dtype=self.dtype))
        else:
            cadence = self._zeros(batch, self.config.d_c)
        if self.item_embedding is not None:
            embedded = ops.embedding(self.item_embedding, batch.item_index)
        else:
            embedded = self._zeros(batch, self.config.d_e)
        x = ops.concat([cadence, embedded], axis=-1)
        if self.adapter is not None:
            x = self.adapter(x)
        encoded = self.set_encoder(x, batch.mask, rng) if self.set_encoder is not None else x
        return CaseOutput(scores=self.scorer(encoded, rng), cadence=cadence, encoded=encoded)

    def __call__(self, batch: Batch, rng: Optional[Rng] = None) -> Tensor:
        return self.forward(batch, rng).scores

    def loss(self, batch: Batch, rng: Optional[Rng] = None) -> Tensor:
        """Per-example mean BCE over real candidates, averaged over the batch."""
        return ops.bce_with_logits(self(batch, rng), batch.labels, batch.mask)


def build_network(config: ModelConfig, vocab_size: int, dropout: float, rng: Rng) -> CaseNetwork:
    """Initialise a network in the configured precision."""
    with precision(config.precision):
        network = CaseNetwork(config, vocab_size, dropout, rng)
    logger.info("Built CASE network: %d parameters (%s)", network.num_parameters(), config.flags)
    return network


def restore_network(config: ModelConfig, vocab_size: int, dropout: float, state: Mapping[str, np.ndarray]) -> CaseNetwork:
    network = build_network(config, vocab_size, dropout, Rng(0, ("restore",)))
    network.load_state_dict(state)
    return network.eval()


def case_forward(
    network: CaseNetwork,
    example: Example,
    index: Mapping[str, int],
    rng: Optional[Rng] = None,
) -> np.ndarray:
    """Scores for one example's candidates, in candidate order."""
    with precision(network.config.precision):
        scores = network(batch_collate([example], index), rng)
    return scores.data[0, : example.n].copy()


def score_examples(network: CaseNetwork, examples: Sequence[Example], index: Mapping[str, int]) -> list[np.ndarray]:
    """Scores for a list of examples collated into one padded batch."""
    with precision(network.config.precision):
        scores = network(batch_collate(examples, index))
    return [scores.data[b, : e.n].copy() for b, e in enumerate(examples)]
