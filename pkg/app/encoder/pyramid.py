"""Pyramidal time reduction: concatenate ``step`` consecutive frames.

A ``T x D`` input becomes ``ceil(T / step) x (step * D)``; the last group is
zero-padded when ``T`` is not a multiple of ``step``.
"""

from __future__ import annotations

import numpy as np

from app.errors import UsageError


def pyramid_subsample(inputs: np.ndarray, step: int) -> np.ndarray:
    if step < 1:
        raise UsageError(f"pyramid step must be >= 1, got {step}")
    if step == 1:
        return inputs
    t_len, dim = inputs.shape
    groups = -(-t_len // step)
    padded = np.zeros((groups * step, dim))
    padded[:t_len] = inputs
    return padded.reshape(groups, step * dim)


def pyramid_backward(d_out: np.ndarray, step: int, t_len: int) -> np.ndarray:
    """Gradient of :func:`pyramid_subsample` w.r.t. its ``t_len``-frame input."""
    if step == 1:
        return d_out
    groups, width = d_out.shape
    return d_out.reshape(groups * step, width // step)[:t_len]
