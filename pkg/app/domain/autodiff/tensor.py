"""
Tensor and reverse-mode tape.

A Tensor wraps a contiguous numpy array. Ops in ``ops.py`` build new tensors
and attach a backward closure; ``Tensor.backward`` walks the graph once in
reverse topological order and accumulates gradients into every tensor that
requires them. Graph execution is eager; nothing is fused.
"""
from __future__ import annotations

import contextlib
import threading
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from app.domain.enums import Precision
from app.domain.exceptions import NumericalError, ShapeError

_DTYPES = {
    Precision.FLOAT32: np.float32,
    Precision.FLOAT64: np.float64,
}


class _TapeState(threading.local):
    """Per-thread dtype and recording flag; every thread starts at the defaults."""

    def __init__(self) -> None:
        self.dtype: type = np.float32
        self.grad_enabled: bool = True


_state = _TapeState()


def set_default_precision(precision: Precision) -> None:
    _state.dtype = _DTYPES[Precision(precision)]


def get_dtype() -> type:
    return _state.dtype


@contextlib.contextmanager
def precision(value: Precision) -> Iterator[None]:
    """Temporarily switch the dtype used for newly created tensors."""
    previous = _state.dtype
    set_default_precision(value)
    try:
        yield
    finally:
        _state.dtype = previous


@contextlib.contextmanager
def no_grad() -> Iterator[None]:
    """Run ops without recording the tape (inference)."""
    previous = _state.grad_enabled
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def is_grad_enabled() -> bool:
    return _state.grad_enabled


BackwardFn = Callable[[np.ndarray], None]


class Tensor:
    """Array value plus the bookkeeping needed for reverse-mode differentiation."""

    __slots__ = ("data", "grad", "requires_grad", "op", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False, dtype: Optional[type] = None):
        self.data = np.ascontiguousarray(data, dtype=dtype or get_dtype())
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self.op = "leaf"
        self._parents: tuple[Tensor, ...] = ()
        self._backward: Optional[BackwardFn] = None
        if not np.isfinite(self.data).all():
            raise NumericalError("tensor")

    @classmethod
    def from_op(
        cls,
        data: np.ndarray,
        parents: Sequence["Tensor"],
        backward: BackwardFn,
        op: str,
    ) -> "Tensor":
        """Build an op output, checking finiteness and wiring the tape if needed."""
        if not np.isfinite(data).all():
            raise NumericalError(op)
        out = cls.__new__(cls)
        out.data = np.ascontiguousarray(data)
        out.grad = None
        out.op = op
        needs_grad = _state.grad_enabled and any(p.requires_grad for p in parents)
        out.requires_grad = needs_grad
        out._parents = tuple(parents) if needs_grad else ()
        out._backward = backward if needs_grad else None
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    def accumulate(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        if grad.shape != self.data.shape:
            raise ShapeError(f"gradient of {self.op}", grad.shape, self.data.shape)
        self.grad = grad.astype(self.data.dtype, copy=True) if self.grad is None else self.grad + grad

    def zero_grad(self) -> None:
        self.grad = None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def backward(self) -> None:
        """Backpropagate from a scalar output through the recorded graph."""
        if self.data.size != 1:
            raise ShapeError("backward requires a scalar", self.data.shape)
        order = _topological_order(self)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}, op={self.op})"


def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in visited:
                stack.append((parent, False))
    return order
