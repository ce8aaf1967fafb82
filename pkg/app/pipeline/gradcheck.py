"""Built-in finite-difference suites for every hand-derived backward pass.

Each suite builds a tiny component from a fixed seed, checks parameter
gradients with :func:`app.numerics.grad_check` and, where the component
returns an input gradient, a few feature cells with
:func:`app.numerics.check_array_gradient`.  Dropout and noise are off.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Optional, Sequence

import numpy as np

from app.attention import LasModel
from app.attention.las import las_backward, las_loss
from app.ctc import CtcModel, ctc_gradient, ctc_loss
from app.encoder import EncoderParams, encoder_backward, encoder_forward
from app.errors import UsageError
from app.managers.logger import get_logger
from app.models import ADDITIVE, DOT, FLAT, PYRAMIDAL, EncoderConfig, FeatureMatrix, LasConfig
from app.numerics import GradCheckReport, ParamStore, check_array_gradient, grad_check, log_softmax

log = get_logger(__name__)

DEFAULT_EPSILON = 1e-5
DEFAULT_TOLERANCE = 1e-4
DEFAULT_SAMPLE = 60

_DIM = 3          # feature dimension
_LABELS = 4       # alphabet size including the separator


@dataclasses.dataclass
class SuiteResult:
    name: str
    params: GradCheckReport
    input_error: Optional[float]
    tolerance: float

    @property
    def max_relative_error(self) -> float:
        return max(self.params.max_relative_error, self.input_error or 0.0)

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance

    def __str__(self) -> str:
        status = "ok" if self.passed else "FAIL"
        where = f"{self.params.worst_parameter}{list(self.params.worst_index)}" if self.params.worst_parameter else "-"
        inp = "-" if self.input_error is None else f"{self.input_error:.2e}"
        return (f"{self.name:<16} {status:<4}  params {self.params.max_relative_error:.2e} "
                f"(worst {where}, {self.params.checked} checked)  input {inp}")


# ── suites ──
# Each returns (loss_fn, store, input_fn) where input_fn(x) -> (loss, d_x) or None.

_Suite = tuple[Callable[[ParamStore, bool], float], ParamStore,
               Optional[tuple[np.ndarray, Callable[[np.ndarray], float], Callable[[np.ndarray], np.ndarray]]]]


def _ctc_logits(seed: int) -> _Suite:
    rng = np.random.default_rng(seed)
    store = ParamStore(seed)
    store.set("logits", rng.normal(size=(7, _LABELS + 1)))
    target = (0, 2, 2, 1)

    def loss_fn(params: ParamStore, backward: bool) -> float:
        log_probs = log_softmax(params["logits"])
        value, lattice = ctc_loss(log_probs, target)
        if backward:
            params.accumulate("logits", ctc_gradient(lattice, log_probs))
        return value

    return loss_fn, store, None


def _encoder(kind: str, frames: int, seed: int) -> _Suite:
    cfg = EncoderConfig(kind=kind, layers=2, units_per_direction=3, pyramid_step=2,
                        dropout_rate=0.0, input_dim=_DIM)
    store = ParamStore(seed)
    params = EncoderParams.create(cfg, store)
    rng = np.random.default_rng(seed + 1)
    x = rng.normal(size=(frames, _DIM))
    weights = rng.normal(size=(cfg.reduced_length(frames), cfg.output_dim))

    def loss_fn(p: ParamStore, backward: bool) -> float:
        h, cache = encoder_forward(cfg, params, x)
        if backward:
            encoder_backward(cache, weights)
        return float(np.sum(h * weights))

    def value_at(xv: np.ndarray) -> float:
        h, _ = encoder_forward(cfg, params, xv)
        return float(np.sum(h * weights))

    def grad_at(xv: np.ndarray) -> np.ndarray:
        _, cache = encoder_forward(cfg, params, xv)
        d_x = encoder_backward(cache, weights)
        store.zero_grad()
        return d_x

    return loss_fn, store, (x, value_at, grad_at)


def _ctc_model(seed: int) -> _Suite:
    cfg = EncoderConfig(kind=FLAT, layers=2, units_per_direction=3, dropout_rate=0.0, input_dim=_DIM)
    store = ParamStore(seed)
    model = CtcModel.create(cfg, _LABELS, store)
    x = np.random.default_rng(seed + 1).normal(size=(6, _DIM))
    target = (1, 0, 3)

    def loss_fn(p: ParamStore, backward: bool) -> float:
        return model.loss(FeatureMatrix(x), target, backward=backward)

    return loss_fn, store, None


def _las(scoring: str, seed: int) -> _Suite:
    cfg = LasConfig(listener_layers=1, listener_units=2, pyramid_step=2, speller_layers=2,
                    speller_units=3, embed_dim=2, attention_dim=3, scoring=scoring,
                    dropout_rate=0.0, input_dim=_DIM)
    store = ParamStore(seed)
    model = LasModel.create(cfg, _LABELS, store)
    x = np.random.default_rng(seed + 1).normal(size=(5, _DIM))
    target = (2, 0, 1)

    def loss_fn(p: ParamStore, backward: bool) -> float:
        return model.loss(FeatureMatrix(x), target, backward=backward)

    def value_at(xv: np.ndarray) -> float:
        return las_loss(cfg, model.params, FeatureMatrix(xv), target)[0]

    def grad_at(xv: np.ndarray) -> np.ndarray:
        _, cache = las_loss(cfg, model.params, FeatureMatrix(xv), target)
        d_x = las_backward(model.params, cache)
        store.zero_grad()
        return d_x

    return loss_fn, store, (x, value_at, grad_at)


SUITES: dict[str, Callable[[int], _Suite]] = {
    "ctc-logits": _ctc_logits,
    "encoder-flat": lambda seed: _encoder(FLAT, 6, seed),
    "encoder-pyramid": lambda seed: _encoder(PYRAMIDAL, 7, seed),
    "ctc-model": _ctc_model,
    "las-additive": lambda seed: _las(ADDITIVE, seed),
    "las-dot": lambda seed: _las(DOT, seed),
}


def run_suite(
    name: str,
    epsilon: float = DEFAULT_EPSILON,
    tolerance: float = DEFAULT_TOLERANCE,
    sample: int = DEFAULT_SAMPLE,
    seed: int = 0,
) -> SuiteResult:
    try:
        factory = SUITES[name]
    except KeyError:
        raise UsageError(f"unknown gradient-check suite '{name}' (have: {', '.join(SUITES)})") from None
    loss_fn, store, inputs = factory(seed)
    report = grad_check(loss_fn, store, epsilon, sample, np.random.default_rng(seed))
    input_error = None
    if inputs is not None:
        x, value_at, grad_at = inputs
        analytic = grad_at(x)
        input_error = check_array_gradient(value_at, x.copy(), analytic, cells=5, epsilon=epsilon,
                                           rng=np.random.default_rng(seed))
    result = SuiteResult(name, report, input_error, tolerance)
    log.debug("%s", result)
    return result


def cmd_gradcheck(
    names: Optional[Sequence[str]] = None,
    epsilon: float = DEFAULT_EPSILON,
    tolerance: float = DEFAULT_TOLERANCE,
    sample: int = DEFAULT_SAMPLE,
    seed: int = 0,
) -> list[SuiteResult]:
    """Run the named suites (all by default) and log one line per suite."""
    results = []
    for name in names or list(SUITES):
        result = run_suite(name, epsilon, tolerance, sample, seed)
        (log.info if result.passed else log.error)("%s", result)
        results.append(result)
    return results
