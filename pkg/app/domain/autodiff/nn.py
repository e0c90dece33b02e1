"""
Parameter containers and the two reusable layers (dense, layer norm).

``Module`` discovers parameters by walking instance attributes in definition
order, which gives every parameter a stable dotted name such as
``set_encoder.blocks.0.induced_mab.query.weight``. Checkpoints are keyed by
those names.
"""
from __future__ import annotations

import math
from typing import Iterator, Mapping

import numpy as np

from app.domain.autodiff import ops
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor, get_dtype
from app.domain.exceptions import ArtifactMismatchError

EMBEDDING_INIT_STD = 0.02


def parameter(values: np.ndarray) -> Tensor:
    return Tensor(values, requires_grad=True)


def glorot_uniform(rng: Rng, fan_in: int, fan_out: int, shape: tuple[int, ...]) -> Tensor:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return parameter(rng.uniform(-limit, limit, shape).astype(get_dtype()))


def normal_init(rng: Rng, shape: tuple[int, ...], std: float = EMBEDDING_INIT_STD) -> Tensor:
    return parameter(rng.normal(0.0, std, shape).astype(get_dtype()))


def zeros_init(shape: tuple[int, ...]) -> Tensor:
    return parameter(np.zeros(shape, dtype=get_dtype()))


class Module:
    training: bool = True

    def _children(self) -> Iterator[tuple[str, object]]:
        for name, value in vars(self).items():
            if isinstance(value, (Tensor, Module)):
                yield name, value
            elif isinstance(value, (list, tuple)):
                for index, item in enumerate(value):
                    if isinstance(item, (Tensor, Module)):
                        yield f"{name}.{index}", item

    def named_parameters(self, prefix: str = "") -> dict[str, Tensor]:
        found: dict[str, Tensor] = {}
        for name, value in self._children():
            full = f"{prefix}{name}"
            if isinstance(value, Tensor):
                if value.requires_grad:
                    found[full] = value
            else:
                found.update(value.named_parameters(prefix=f"{full}."))
        return found

    def parameters(self) -> list[Tensor]:
        return list(self.named_parameters().values())

    def modules(self) -> Iterator["Module"]:
        yield self
        for _, value in self._children():
            if isinstance(value, Module):
                yield from value.modules()

    def train(self, mode: bool = True) -> "Module":
        for module in self.modules():
            module.training = mode
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.zero_grad()

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters().items()}

    def load_state_dict(self, state: Mapping[str, np.ndarray]) -> None:
        params = self.named_parameters()
        missing = sorted(set(params) - set(state))
        unexpected = sorted(set(state) - set(params))
        if missing or unexpected:
            raise ArtifactMismatchError(
                f"checkpoint tensors do not match model (missing={missing[:5]}, unexpected={unexpected[:5]})"
            )
        for name, param in params.items():
            values = np.asarray(state[name])
            if values.shape != param.shape:
                raise ArtifactMismatchError(
                    f"checkpoint tensor {name} has shape {values.shape}, model expects {param.shape}"
                )
            param.data = np.ascontiguousarray(values, dtype=param.data.dtype)


class Dense(Module):
    """y = x W + b with Glorot-uniform W and zero b."""

    def __init__(self, in_features: int, out_features: int, rng: Rng):
        self.weight = glorot_uniform(rng, in_features, out_features, (in_features, out_features))
        self.bias = zeros_init((out_features,))

    def __call__(self, x: Tensor) -> Tensor:
        return ops.add(ops.matmul(x, self.weight), self.bias)


class LayerNorm(Module):
    def __init__(self, width: int):
        self.gain = parameter(np.ones(width, dtype=get_dtype()))
        self.shift = zeros_init((width,))

    def __call__(self, x: Tensor) -> Tensor:
        return ops.layer_norm(x, self.gain, self.shift)
