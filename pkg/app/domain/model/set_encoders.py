"""Permutation-equivariant set encoders over the candidate axis"""
from typing import Optional

import numpy as np

from app.domain.autodiff import ops
from app.domain.autodiff.nn import Dense, Module, glorot_uniform
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor
from app.domain.enums import SetEncoderKind
from app.domain.model.attention import InducedSetAttentionBlock


class IsabEncoder(Module):
    def __init__(self, width: int, heads: int, induced: int, layers: int, dropout: float, rng: Rng):
        self.blocks = [
            InducedSetAttentionBlock(width, heads, induced, rng.child(f"block{i}")) for i in range(layers)
        ]
        self.dropout = dropout

    def __call__(self, x: Tensor, mask: np.ndarray, rng: Optional[Rng] = None) -> Tensor:
        for block in self.blocks:
            x = ops.dropout(block(x, mask), self.dropout, rng, self.training)
        return x


class PermEqMeanLayer(Module):
    """out_i = relu(x_i W1 + mean_j(x_j) W2 + b), the mean taken over real candidates only."""

    def __init__(self, width: int, rng: Rng):
        self.item = Dense(width, width, rng.child("item"))
        self.pooled = glorot_uniform(rng.child("pooled"), width, width, (width, width))

    def __call__(self, x: Tensor, mask: np.ndarray) -> Tensor:
        pooled = ops.matmul(ops.masked_mean(x, mask), self.pooled)
        return ops.relu(ops.add(self.item(x), pooled))


class PermEqMeanEncoder(Module):
    def __init__(self, width: int, layers: int, dropout: float, rng: Rng):
        self.layers = [PermEqMeanLayer(width, rng.child(f"layer{i}")) for i in range(layers)]
        self.dropout = dropout

    def __call__(self, x: Tensor, mask: np.ndarray, rng: Optional[Rng] = None) -> Tensor:
        for layer in self.layers:
            x = ops.dropout(layer(x, mask), self.dropout, rng, self.training)
        return x


def build_set_encoder(
    kind: SetEncoderKind,
    width: int,
    heads: int,
    induced: int,
    layers: int,
    dropout: float,
    rng: Rng,
) -> Module:
    if SetEncoderKind(kind) == SetEncoderKind.PERM_EQ_MEAN:
        return PermEqMeanEncoder(width, layers, dropout, rng)
    return IsabEncoder(width, heads, induced, layers, dropout, rng)
