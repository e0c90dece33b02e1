"""Central finite-difference check of backward rules"""
from __future__ import annotations

import logging
from typing import Callable, Mapping, Optional

import numpy as np

from app.domain.autodiff.rng import Rng
from app.domain.autodiff.tensor import Tensor
from app.domain.exceptions import ConfigurationError, NumericalError

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
DEFAULT_COORDINATES = 200
# Gradients smaller than this are compared in absolute terms.
ABS_FLOOR = 1e-5


def _evaluate(loss_fn: Callable[[], Tensor]) -> float:
    value = float(loss_fn().data)
    if not np.isfinite(value):
        raise NumericalError("grad_check loss")
    return value


def grad_check(
    loss_fn: Callable[[], Tensor],
    params: Mapping[str, Tensor],
    h: float = DEFAULT_STEP,
    n_coordinates: int = DEFAULT_COORDINATES,
    rng: Optional[Rng] = None,
) -> float:
    """
    Compare analytic gradients with central differences.

    ``loss_fn`` must rebuild the graph from the current parameter values on every
    call and return a scalar. Each parameter tensor is checked at all coordinates,
    or at a random subsample of ``n_coordinates`` when it is larger.

    Returns:
        The maximum relative error over all checked coordinates.
    """
    for name, p in params.items():
        if p.data.dtype != np.float64:
            raise ConfigurationError(f"grad_check needs 64-bit parameters, {name} is {p.data.dtype}")
    rng = rng or Rng(0, ("grad_check",))

    for p in params.values():
        p.zero_grad()
    loss = loss_fn()
    if not np.isfinite(loss.data).all():
        raise NumericalError("grad_check loss")
    loss.backward()
    analytic = {name: (p.grad.copy() if p.grad is not None else np.zeros_like(p.data)) for name, p in params.items()}

    worst = 0.0
    for name, p in params.items():
        flat = p.data.reshape(-1)
        if flat.size <= n_coordinates:
            coordinates = np.arange(flat.size)
        else:
            coordinates = np.sort(rng.choice(flat.size, n_coordinates, replace=False))
        grad_flat = analytic[name].reshape(-1)
        for index in coordinates:
            original = flat[index]
            flat[index] = original + h
            plus = _evaluate(loss_fn)
            flat[index] = original - h
            minus = _evaluate(loss_fn)
            flat[index] = original
            numeric = (plus - minus) / (2.0 * h)
            exact = grad_flat[index]
            error = abs(exact - numeric) / max(abs(exact), abs(numeric), ABS_FLOOR)
            if error > worst:
                worst = error
                logger.debug("grad_check %s[%d]: analytic=%.6e numeric=%.6e", name, index, exact, numeric)
    return worst
