"""Plain SGD with step decay on development-loss plateaus."""

from __future__ import annotations

import numpy as np

from app.errors import TrainingError, UsageError
from app.managers.logger import get_logger
from app.numerics.params import ParamStore

log = get_logger(__name__)


def sgd_step(params: ParamStore, learning_rate: float) -> ParamStore:
    """``tensor -= learning_rate * grad`` for every entry, then zero the grads.

    Raises :class:`TrainingError` naming the first parameter whose gradient
    holds NaN/Inf; no tensor is modified in that case.
    """
    if learning_rate <= 0:
        raise UsageError(f"learning rate must be > 0, got {learning_rate}")
    for name in params.names():
        if not np.all(np.isfinite(params.grad(name))):
            raise TrainingError("non-finite gradient", parameter=name)
    for name, tensor in params.items():
        tensor -= learning_rate * params.grad(name)
    params.zero_grad()
    params.version += 1
    return params


def clip_grad_norm(params: ParamStore, max_norm: float) -> float:
    """Rescale all gradients so their global L2 norm is at most ``max_norm``.

    Returns the norm before clipping.  ``max_norm <= 0`` disables clipping.
    """
    norm = params.grad_norm()
    if max_norm > 0 and norm > max_norm:
        params.scale_grads(max_norm / norm)
    return norm


class PlateauDecay:
    """Multiply the learning rate by ``decay`` when the dev loss stalls.

    The loss "stalls" after ``patience`` consecutive epochs without a new
    best value; the counter restarts after each decay.
    """

    def __init__(self, base_lr: float, decay: float, patience: int) -> None:
        if base_lr <= 0:
            raise UsageError("base learning rate must be > 0")
        self.lr = base_lr
        self.decay = decay
        self.patience = max(1, patience)
        self.best = float("inf")
        self._stalled = 0

    def step(self, dev_loss: float) -> bool:
        """Record one epoch's dev loss; return True when the rate was decayed."""
        if dev_loss < self.best:
            self.best = dev_loss
            self._stalled = 0
            return False
        self._stalled += 1
        if self._stalled >= self.patience:
            self.lr *= self.decay
            self._stalled = 0
            log.info("dev loss stalled for %d epoch(s); learning rate → %.6g",
                     self.patience, self.lr)
            return True
        return False
