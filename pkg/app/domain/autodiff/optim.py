"""Adam optimizer and global-norm gradient clipping"""
from __future__ import annotations

import logging
from typing import Mapping, Optional

import numpy as np

from app.domain.autodiff.tensor import Tensor

logger = logging.getLogger(__name__)


def adam_step(
    param: np.ndarray,
    grad: np.ndarray,
    m: np.ndarray,
    v: np.ndarray,
    *,
    lr: float,
    t: int,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.0,
    decoupled: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    One Adam update with bias correction.

    Coupled (classic) weight decay adds ``weight_decay * param`` to the gradient
    before the moment updates; the decoupled variant shrinks the parameter
    directly instead.

    Returns:
        (new_param, new_m, new_v)
    """
    if t < 1:
        raise ValueError("Adam step counter starts at 1")
    if weight_decay and not decoupled:
        grad = grad + weight_decay * param
    m = beta1 * m + (1.0 - beta1) * grad
    v = beta2 * v + (1.0 - beta2) * grad * grad
    m_hat = m / (1.0 - beta1 ** t)
    v_hat = v / (1.0 - beta2 ** t)
    update = lr * m_hat / (np.sqrt(v_hat) + eps)
    if weight_decay and decoupled:
        update = update + lr * weight_decay * param
    return (param - update).astype(param.dtype), m.astype(param.dtype), v.astype(param.dtype)


def clip_grad_norm(params: Mapping[str, Tensor], max_norm: float) -> float:
    """Rescale all gradients in place so their joint L2 norm is at most ``max_norm``."""
    total = float(np.sqrt(sum(float((p.grad.astype(np.float64) ** 2).sum()) for p in params.values() if p.grad is not None)))
    if total > max_norm:
        factor = max_norm / (total + 1e-12)
        for p in params.values():
            if p.grad is not None:
                p.grad = p.grad * factor
    return total


class Adam:
    """
    Stateful Adam over a named parameter set.

    The optimizer is the single owner of parameter updates; callers compute
    gradients and then call ``step``.
    """

    def __init__(
        self,
        params: Mapping[str, Tensor],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
        decoupled: bool = False,
        clip_norm: Optional[float] = None,
    ):
        self.params = dict(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.weight_decay = weight_decay
        self.decoupled = decoupled
        self.clip_norm = clip_norm
        self.t = 0
        self.m = {name: np.zeros_like(p.data) for name, p in self.params.items()}
        self.v = {name: np.zeros_like(p.data) for name, p in self.params.items()}

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self) -> None:
        if self.clip_norm is not None:
            norm = clip_grad_norm(self.params, self.clip_norm)
            if norm > self.clip_norm:
                logger.debug("Clipped gradient norm %.4f to %.4f", norm, self.clip_norm)
        self.t += 1
        for name, p in self.params.items():
            grad = p.grad if p.grad is not None else np.zeros_like(p.data)
            p.data, self.m[name], self.v[name] = adam_step(
                p.data,
                grad,
                self.m[name],
                self.v[name],
                lr=self.lr,
                t=self.t,
                beta1=self.beta1,
                beta2=self.beta2,
                eps=self.eps,
                weight_decay=self.weight_decay,
                decoupled=self.decoupled,
            )
