"""Minimal reverse-mode autodiff over numpy arrays"""
from app.domain.autodiff.flops import count_flops
from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor, get_dtype, no_grad, precision, set_default_precision

__all__ = [
    "Rng",
    "Tensor",
    "count_flops",
    "get_dtype",
    "no_grad",
    "precision",
    "set_default_precision",
]
