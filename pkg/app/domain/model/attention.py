"""
Multihead attention blocks for the set encoder.

All tensors are batched: queries x [B, a, d], keys/values y [B, b, d]. An
optional key mask [B, b] (True = real element) keeps padded candidates out of
every softmax.
"""
from typing import Optional

import numpy as np

from app.domain.autodiff import ops
from app.domain.autodiff.nn import Dense, LayerNorm, Module, normal_init
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor
from app.domain.exceptions import ConfigurationError


class MultiHeadAttention(Module):
    def __init__(self, width: int, heads: int, rng: Rng):
        if width % heads:
            raise ConfigurationError(f"width {width} is not divisible by {heads} heads")
        self.width = width
        self.heads = heads
        self.query = Dense(width, width, rng.child("query"))
        self.key = Dense(width, width, rng.child("key"))
        self.value = Dense(width, width, rng.child("value"))
        self.output = Dense(width, width, rng.child("output"))

    @property
    def head_width(self) -> int:
        return self.width // self.heads

    def _split(self, x: Tensor) -> Tensor:
        batch, rows, _ = x.shape
        return ops.transpose(ops.reshape(x, (batch, rows, self.heads, self.head_width)), (0, 2, 1, 3))

    def weights(self, x: Tensor, y: Tensor, key_mask: Optional[np.ndarray] = None) -> Tensor:
        """Attention weights [B, H, a, b]."""
        q = self._split(self.query(x))
        k = self._split(self.key(y))
        logits = ops.scale(ops.matmul(q, ops.transpose(k, (0, 1, 3, 2))), ops.attention_scale(self.head_width))
        mask = None if key_mask is None else key_mask[:, None, None, :]
        return ops.softmax_rows(logits, mask)

    def __call__(self, x: Tensor, y: Tensor, key_mask: Optional[np.ndarray] = None) -> Tensor:
        batch, rows, _ = x.shape
        v = self._split(self.value(y))
        heads = ops.matmul(self.weights(x, y, key_mask), v)
        merged = ops.reshape(ops.transpose(heads, (0, 2, 1, 3)), (batch, rows, self.width))
        return self.output(merged)


class MultiheadAttentionBlock(Module):
    """out = LN(A + relu(A W + b)) with A = LN(x + attention(x, y, y))."""

    def __init__(self, width: int, heads: int, rng: Rng):
        self.attention = MultiHeadAttention(width, heads, rng.child("attention"))
        self.norm1 = LayerNorm(width)
        self.feed_forward = Dense(width, width, rng.child("feed_forward"))
        self.norm2 = LayerNorm(width)

    def __call__(self, x: Tensor, y: Tensor, key_mask: Optional[np.ndarray] = None) -> Tensor:
        attended = self.norm1(ops.add(x, self.attention(x, y, key_mask)))
        return self.norm2(ops.add(attended, ops.relu(self.feed_forward(attended))))


class InducedSetAttentionBlock(Module):
    """K learned induced points attend to the set, then the set attends back: O(nK) per block."""

    def __init__(self, width: int, heads: int, induced: int, rng: Rng):
        self.induced_points = normal_init(rng.child("induced_points"), (induced, width))
        self.induced_mab = MultiheadAttentionBlock(width, heads, rng.child("induced_mab"))
        self.item_mab = MultiheadAttentionBlock(width, heads, rng.child("item_mab"))

    def __call__(self, x: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
        summary = self.induced_mab(ops.expand_batch(self.induced_points, x.shape[0]), x, mask)
        return self.item_mab(x, summary)
