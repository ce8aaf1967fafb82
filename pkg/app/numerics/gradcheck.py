"""Finite-difference gradient checking.

Every trainable component derives its gradients by hand; this harness
compares them with central differences::

    def loss_fn(params, backward):
        ...forward...
        if backward:
            ...accumulate analytic gradients into params...
        return loss

    report = grad_check(loss_fn, params, epsilon=1e-5, sample=50)
    assert report.max_relative_error <= 1e-4
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np

from app.errors import UsageError
from app.numerics.params import ParamStore

LossFn = Callable[[ParamStore, bool], float]


def relative_error(analytic: float, numeric: float) -> float:
    """``|a - n| / max(|a|, |n|, 1e-8)``."""
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


@dataclasses.dataclass
class GradCheckReport:
    max_relative_error: float
    worst_parameter: str
    worst_index: tuple[int, ...]
    checked: int

    def passed(self, tolerance: float = 1e-4) -> bool:
        return self.max_relative_error <= tolerance


def grad_check(
    loss_fn: LossFn,
    params: ParamStore,
    epsilon: float = 1e-5,
    sample: int = 0,
    rng: Optional[np.random.Generator] = None,
) -> GradCheckReport:
    """Compare analytic and central-difference gradients.

    ``sample`` scalar parameters are drawn uniformly over the whole store
    (``0`` or more than the store size checks every scalar).
    """
    if epsilon <= 0:
        raise UsageError("epsilon must be > 0")

    params.zero_grad()
    loss0 = loss_fn(params, True)
    analytic = {name: params.grad(name).copy() for name in params.names()}
    params.zero_grad()
    if loss_fn(params, False) != loss0:
        raise UsageError("loss_fn is not deterministic for fixed parameters")

    coords = [
        (name, idx)
        for name, tensor in params.items()
        for idx in np.ndindex(*tensor.shape)
    ]
    if sample and sample < len(coords):
        gen = rng if rng is not None else np.random.default_rng(0)
        picks = gen.choice(len(coords), size=sample, replace=False)
        coords = [coords[i] for i in sorted(picks)]

    worst = GradCheckReport(0.0, "", (), len(coords))
    for name, idx in coords:
        tensor = params[name]
        saved = tensor[idx]
        tensor[idx] = saved + epsilon
        up = loss_fn(params, False)
        tensor[idx] = saved - epsilon
        down = loss_fn(params, False)
        tensor[idx] = saved
        numeric = (up - down) / (2 * epsilon)
        err = relative_error(float(analytic[name][idx]), numeric)
        if err > worst.max_relative_error:
            worst = GradCheckReport(err, name, tuple(int(i) for i in idx), len(coords))
    params.zero_grad()
    return worst


def check_array_gradient(
    fn: Callable[[np.ndarray], float],
    x: np.ndarray,
    analytic: np.ndarray,
    cells: int = 5,
    epsilon: float = 1e-5,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Max relative error of ``analytic`` against central differences of
    ``fn`` at ``cells`` random positions of ``x`` (e.g. input features)."""
    gen = rng if rng is not None else np.random.default_rng(0)
    flat = x.reshape(-1)
    picks = gen.choice(flat.size, size=min(cells, flat.size), replace=False)
    worst = 0.0
    for i in picks:
        saved = flat[i]
        flat[i] = saved + epsilon
        up = fn(x)
        flat[i] = saved - epsilon
        down = fn(x)
        flat[i] = saved
        worst = max(worst, relative_error(float(analytic.reshape(-1)[i]), (up - down) / (2 * epsilon)))
    return worst
