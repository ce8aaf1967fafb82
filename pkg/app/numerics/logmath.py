"""Stable log-domain primitives.

All arithmetic is 64-bit.  Log-probabilities use ``-inf`` for log(0); the
helpers below never materialise linear-domain probabilities of whole
sequences.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit
from scipy.special import log_softmax as _log_softmax
from scipy.special import logsumexp

from app.errors import NumericError, UsageError
from app.managers.logger import get_logger

log = get_logger(__name__)

NEG_INF = -np.inf


def log_sum_exp(values) -> float:
    """Return ``log(sum(exp(values)))`` using the max-shift identity.

    Entries may be ``-inf``; the result is ``-inf`` iff every entry is.
    """
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise UsageError("log_sum_exp of an empty vector")
    if v.max() == NEG_INF:
        return NEG_INF
    return float(logsumexp(v))


def log_add(a: float, b: float) -> float:
    """Two-term log_sum_exp used on the CTC lattice hot path."""
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


def softmax(logits) -> np.ndarray:
    """Softmax over the last axis."""
    z = np.asarray(logits, dtype=np.float64)
    return np.exp(_log_softmax(z, axis=-1))


def log_softmax(logits) -> np.ndarray:
    """Log-softmax over the last axis."""
    return _log_softmax(np.asarray(logits, dtype=np.float64), axis=-1)


def rows_log_normalizers(log_probs: np.ndarray) -> np.ndarray:
    return logsumexp(log_probs, axis=-1)


def sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


def cross_entropy(dist, target: int) -> float:
    """Return ``-log dist[target]``.

    A zero probability at the target is degenerate: the result is ``+inf``
    and a warning is logged.
    """
    p = np.asarray(dist, dtype=np.float64)
    if not 0 <= target < p.size:
        raise UsageError(f"target {target} outside distribution of size {p.size}")
    pt = p[target]
    if pt <= 0.0:
        log.warning("cross_entropy: zero probability at target %d (degenerate)", target)
        return float("inf")
    return float(max(-np.log(pt), 0.0))


def check_finite(name: str, arr: np.ndarray) -> None:
    """Raise :class:`NumericError` when ``arr`` holds NaN or Inf."""
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"non-finite values in {name}")
