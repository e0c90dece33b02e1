"""Multi-scale cadence encoder: strided convolutions over the purchase signal, then two dense layers"""
from typing import Sequence

from app.domain.autodiff import ops
from app.domain.autodiff.nn import Dense, Module, glorot_uniform, zeros_init
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor
from app.domain.exceptions import ConfigurationError


class CadenceEncoder(Module):
    """
    signals [..., T] -> cadence vectors [..., d_c].

    Each scale w has F filters of width w applied with stride w; activations are
    flattened filter-major and concatenated in the configured scale order.
    """

    def __init__(self, window: int, scales: Sequence[int], filters: int, d_c: int, rng: Rng):
        too_wide = [w for w in scales if w > window]
        if too_wide:
            raise ConfigurationError(f"kernel scales {too_wide} exceed window T={window}")
        self.window = window
        self.scales = tuple(scales)
        self.filters = filters
        self.kernels = [glorot_uniform(rng.child(f"kernel{w}"), w, filters, (filters, w)) for w in self.scales]
        self.biases = [zeros_init((filters,)) for _ in self.scales]
        self.fc1 = Dense(self.features, d_c, rng.child("fc1"))
        self.fc2 = Dense(d_c, d_c, rng.child("fc2"))

    @property
    def features(self) -> int:
        return sum(self.filters * (self.window // w) for w in self.scales)

    def conv_features(self, signals: Tensor) -> Tensor:
        lead = signals.shape[:-1]
        pieces = []
        for w, kernel, bias in zip(self.scales, self.kernels, self.biases):
            activations = ops.relu(ops.conv1d_strided(signals, kernel, bias, stride=w))
            pieces.append(ops.reshape(activations, lead + (self.filters * (self.window // w),)))
        return ops.concat(pieces, axis=-1)

    def __call__(self, signals: Tensor) -> Tensor:
        if signals.shape[-1] != self.window:
            raise ConfigurationError(f"signal length {signals.shape[-1]} does not match window T={self.window}")
        return self.fc2(ops.relu(self.fc1(self.conv_features(signals))))
