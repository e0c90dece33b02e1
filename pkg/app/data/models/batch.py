"""Padded mini-batch of examples"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class Batch:
    """
    Examples padded to the largest candidate count in the batch.

    signals [B, n_max, T] float, item_index [B, n_max] int64, labels [B, n_max]
    float, mask [B, n_max] bool (True for real candidates).
    """
    signals: np.ndarray
    item_index: np.ndarray
    labels: np.ndarray
    mask: np.ndarray
    sizes: tuple[int, ...]

    @property
    def batch_size(self) -> int:
        return int(self.mask.shape[0])

    @property
    def width(self) -> int:
        return int(self.mask.shape[1])
