"""Dense log-domain primitives, parameter storage, optimizer and gradient checks."""

from app.numerics.logmath import (
    check_finite,
    cross_entropy,
    log_softmax,
    log_sum_exp,
    sigmoid,
    softmax,
)
from app.numerics.params import ParamStore
from app.numerics.optim import PlateauDecay, clip_grad_norm, sgd_step
from app.numerics.noise import add_gaussian_noise, dropout_mask
from app.numerics.gradcheck import (
    GradCheckReport,
    check_array_gradient,
    grad_check,
    relative_error,
)

__all__ = [
    "GradCheckReport",
    "ParamStore",
    "PlateauDecay",
    "add_gaussian_noise",
    "check_array_gradient",
    "check_finite",
    "clip_grad_norm",
    "cross_entropy",
    "dropout_mask",
    "grad_check",
    "log_softmax",
    "log_sum_exp",
    "relative_error",
    "sgd_step",
    "sigmoid",
    "softmax",
]
