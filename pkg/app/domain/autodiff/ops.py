"""
Differentiable ops.

Every op takes Tensors (plus plain numpy masks/indices where noted), computes
its output eagerly and registers a backward closure. Shapes follow numpy
conventions; leading batch dimensions are carried through untouched.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np
from scipy.special import expit

from app.domain.autodiff import flops
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor
from app.domain.exceptions import ConfigurationError, ShapeError

LAYER_NORM_EPS = 1e-5


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to ``shape``."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def add(a: Tensor, b: Tensor) -> Tensor:
    try:
        out = a.data + b.data
    except ValueError:
        raise ShapeError("add", a.shape, b.shape)
    flops.record("add", out.size)

    def backward(g: np.ndarray) -> None:
        a.accumulate(_unbroadcast(g, a.shape))
        b.accumulate(_unbroadcast(g, b.shape))

    return Tensor.from_op(out, (a, b), backward, "add")


def mul(a: Tensor, b: Tensor) -> Tensor:
    try:
        out = a.data * b.data
    except ValueError:
        raise ShapeError("mul", a.shape, b.shape)
    flops.record("mul", out.size)

    def backward(g: np.ndarray) -> None:
        a.accumulate(_unbroadcast(g * b.data, a.shape))
        b.accumulate(_unbroadcast(g * a.data, b.shape))

    return Tensor.from_op(out, (a, b), backward, "mul")


def scale(a: Tensor, factor: float) -> Tensor:
    out = a.data * factor
    flops.record("scale", out.size)

    def backward(g: np.ndarray) -> None:
        a.accumulate(g * factor)

    return Tensor.from_op(out, (a,), backward, "scale")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product over the last two axes; leading axes broadcast."""
    if a.data.ndim < 2 or b.data.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul", a.shape, b.shape)
    try:
        out = np.matmul(a.data, b.data)
    except ValueError:
        raise ShapeError("matmul", a.shape, b.shape)
    flops.record("matmul", 2 * out.size * a.shape[-1])

    def backward(g: np.ndarray) -> None:
        if a.requires_grad:
            a.accumulate(_unbroadcast(np.matmul(g, np.swapaxes(b.data, -1, -2)), a.shape))
        if b.requires_grad:
            b.accumulate(_unbroadcast(np.matmul(np.swapaxes(a.data, -1, -2), g), b.shape))

    return Tensor.from_op(out, (a, b), backward, "matmul")


def relu(a: Tensor) -> Tensor:
    positive = a.data > 0
    out = np.where(positive, a.data, 0).astype(a.data.dtype)
    flops.record("relu", out.size)

    def backward(g: np.ndarray) -> None:
        a.accumulate(g * positive)

    return Tensor.from_op(out, (a,), backward, "relu")


def concat(tensors: Sequence[Tensor], axis: int = -1) -> Tensor:
    try:
        out = np.concatenate([t.data for t in tensors], axis=axis)
    except ValueError:
        raise ShapeError("concat", *[t.shape for t in tensors])
    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum(sizes)[:-1]

    def backward(g: np.ndarray) -> None:
        for t, piece in zip(tensors, np.split(g, bounds, axis=axis)):
            t.accumulate(piece)

    return Tensor.from_op(out, tuple(tensors), backward, "concat")


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    try:
        out = a.data.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", a.shape, tuple(shape))

    def backward(g: np.ndarray) -> None:
        a.accumulate(g.reshape(a.shape))

    return Tensor.from_op(out, (a,), backward, "reshape")


def transpose(a: Tensor, axes: Sequence[int]) -> Tensor:
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    out = np.transpose(a.data, axes)

    def backward(g: np.ndarray) -> None:
        a.accumulate(np.transpose(g, inverse))

    return Tensor.from_op(out, (a,), backward, "transpose")


def expand_batch(a: Tensor, batch: int) -> Tensor:
    """Repeat a parameter block [K, d] into [batch, K, d]."""
    out = np.broadcast_to(a.data, (batch,) + a.shape).copy()

    def backward(g: np.ndarray) -> None:
        a.accumulate(g.sum(axis=0))

    return Tensor.from_op(out, (a,), backward, "expand_batch")


def conv1d_strided(signal: Tensor, kernel: Tensor, bias: Tensor, stride: Optional[int] = None) -> Tensor:
    """
    Non-overlapping 1-D convolution.

    signal [..., T], kernel [F, w], bias [F] -> out [..., F, T // w] with
    out[f, j] = bias[f] + sum_u kernel[f, u] * signal[j*w + u]. The trailing
    T mod w samples are ignored.
    """
    filters, width = kernel.shape
    length = signal.shape[-1]
    if stride is not None and stride != width:
        raise ConfigurationError(f"conv1d_strided requires stride == kernel width ({stride} != {width})")
    if width > length:
        raise ConfigurationError(f"conv1d_strided: kernel width {width} exceeds signal length {length}")
    if bias.shape != (filters,):
        raise ShapeError("conv1d_strided bias", bias.shape, (filters,))
    windows = length // width
    lead = signal.shape[:-1]
    blocks = signal.data[..., : windows * width].reshape(lead + (windows, width))
    out = np.einsum("...jw,fw->...fj", blocks, kernel.data) + bias.data[:, None]
    flops.record("conv1d", 2 * int(np.prod(lead, dtype=np.int64)) * filters * windows * width)

    def backward(g: np.ndarray) -> None:
        if kernel.requires_grad:
            flat_g = g.reshape(-1, filters, windows)
            flat_blocks = blocks.reshape(-1, windows, width)
            kernel.accumulate(np.einsum("bfj,bjw->fw", flat_g, flat_blocks))
        if bias.requires_grad:
            bias.accumulate(g.reshape(-1, filters, windows).sum(axis=(0, 2)))
        if signal.requires_grad:
            grad_blocks = np.einsum("...fj,fw->...jw", g, kernel.data).reshape(lead + (windows * width,))
            grad_signal = np.zeros_like(signal.data)
            grad_signal[..., : windows * width] = grad_blocks
            signal.accumulate(grad_signal)

    return Tensor.from_op(out, (signal, kernel, bias), backward, "conv1d_strided")


def softmax_rows(x: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Softmax over the last axis with the row max subtracted.

    ``mask`` is a boolean array broadcastable to x (True = keep); masked entries
    get an additive -inf before normalizing, so their weight is exactly 0.
    """
    logits = x.data if mask is None else np.where(mask, x.data, -np.inf)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exps = np.exp(shifted)
    out = (exps / exps.sum(axis=-1, keepdims=True)).astype(x.data.dtype)
    flops.record("softmax", 4 * out.size)

    def backward(g: np.ndarray) -> None:
        x.accumulate(out * (g - (g * out).sum(axis=-1, keepdims=True)))

    return Tensor.from_op(out, (x,), backward, "softmax_rows")


def layer_norm(x: Tensor, gain: Tensor, shift: Tensor, eps: float = LAYER_NORM_EPS) -> Tensor:
    """Per-row zero-mean unit-variance normalization (population variance), then affine."""
    width = x.shape[-1]
    if gain.shape != (width,) or shift.shape != (width,):
        raise ShapeError("layer_norm", x.shape, gain.shape, shift.shape)
    mean = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mean
    inv_std = 1.0 / np.sqrt((centered ** 2).mean(axis=-1, keepdims=True) + eps)
    normed = centered * inv_std
    out = normed * gain.data + shift.data
    flops.record("layer_norm", 8 * out.size)

    def backward(g: np.ndarray) -> None:
        if gain.requires_grad:
            gain.accumulate((g * normed).reshape(-1, width).sum(axis=0))
        if shift.requires_grad:
            shift.accumulate(g.reshape(-1, width).sum(axis=0))
        if x.requires_grad:
            d_normed = g * gain.data
            x.accumulate(
                inv_std
                * (
                    d_normed
                    - d_normed.mean(axis=-1, keepdims=True)
                    - normed * (d_normed * normed).mean(axis=-1, keepdims=True)
                )
            )

    return Tensor.from_op(out, (x, gain, shift), backward, "layer_norm")


def check_dropout_rate(p: float) -> None:
    if not 0.0 <= p < 1.0:
        raise ConfigurationError(f"dropout rate must be in [0, 1), got {p}")


def dropout(x: Tensor, p: float, rng: Optional[Rng], training: bool) -> Tensor:
    """Inverted dropout; identity in evaluation mode or when p == 0."""
    check_dropout_rate(p)
    if not training or p == 0.0:
        return x
    if rng is None:
        raise ConfigurationError("dropout in training mode needs an Rng")
    keep = rng.random(x.shape) >= p
    factor = 1.0 / (1.0 - p)
    out = np.where(keep, x.data * factor, 0).astype(x.data.dtype)
    flops.record("dropout", out.size)

    def backward(g: np.ndarray) -> None:
        x.accumulate(np.where(keep, g * factor, 0))

    return Tensor.from_op(out, (x,), backward, "dropout")


def embedding(table: Tensor, indices: np.ndarray) -> Tensor:
    """Gather rows of ``table`` [V, d] at integer ``indices`` of any shape."""
    indices = np.asarray(indices, dtype=np.int64)
    out = table.data[indices]

    def backward(g: np.ndarray) -> None:
        grad = np.zeros_like(table.data)
        np.add.at(grad, indices.reshape(-1), g.reshape(-1, table.shape[-1]))
        table.accumulate(grad)

    return Tensor.from_op(out, (table,), backward, "embedding")


def masked_mean(x: Tensor, mask: np.ndarray) -> Tensor:
    """Mean over axis 1 of x [B, n, d] counting only rows where mask [B, n] is True -> [B, 1, d]."""
    weights = mask.astype(x.data.dtype)[..., None]
    counts = weights.sum(axis=1, keepdims=True)
    out = (x.data * weights).sum(axis=1, keepdims=True) / counts
    flops.record("masked_mean", 2 * x.size)

    def backward(g: np.ndarray) -> None:
        x.accumulate(np.broadcast_to(g / counts, x.shape) * weights)

    return Tensor.from_op(out, (x,), backward, "masked_mean")


def bce_with_logits(scores: Tensor, labels: np.ndarray, mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Binary cross-entropy on logits, stable form max(s,0) - s*y + log(1+exp(-|s|)).

    1-D scores: mean over the n entries. 2-D scores [B, n]: mean over each row's
    unmasked entries, then mean over rows.
    """
    s = scores.data
    y = np.asarray(labels, dtype=s.dtype)
    if y.shape != s.shape:
        raise ShapeError("bce_with_logits", s.shape, y.shape)
    if mask is None:
        mask = np.ones(s.shape, dtype=bool)
    valid = mask.astype(s.dtype)
    per_item = np.maximum(s, 0) - s * y + np.log1p(np.exp(-np.abs(s)))
    if s.ndim == 1:
        weights = valid / valid.sum()
    else:
        weights = valid / valid.sum(axis=-1, keepdims=True) / s.shape[0]
    out = np.asarray((per_item * weights).sum(), dtype=s.dtype)
    flops.record("bce", 6 * s.size)

    def backward(g: np.ndarray) -> None:
        scores.accumulate(g * (expit(s) - y) * weights)

    return Tensor.from_op(out, (scores,), backward, "bce_with_logits")


def attention_scale(head_width: int) -> float:
    return 1.0 / math.sqrt(head_width)
