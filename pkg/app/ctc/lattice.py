"""CTC cost by log-domain forward-backward over the blank-interleaved lattice.

For a target ``y = (y_1 .. y_U)`` the lattice states are::

    ext = (φ, y_1, φ, y_2, φ, ..., y_U, φ)        # 2U + 1 states

``alpha[s, t]`` is the log-probability of all partial alignments ending in
state ``s`` at frame ``t`` (emission at ``t`` included); ``beta[s, t]`` the
log-probability of completing from state ``s`` after frame ``t`` (emission at
``t`` *excluded*).  With that convention::

    log_sum_exp(alpha[:, t] + beta[:, t]) == -loss     for every t

The blank is the last column of ``log_probs``.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Sequence

import numpy as np

from app.errors import CtcInfeasibleError, UsageError
from app.numerics import log_sum_exp
from app.numerics.logmath import rows_log_normalizers

NEG_INF = -np.inf
BRUTE_FORCE_LIMIT = 10**6
NORMALIZATION_TOL = 1e-9


@dataclasses.dataclass
class CtcLattice:
    ext: np.ndarray            # (2U+1,) expanded target ids
    skip: np.ndarray           # (2U+1,) True where the s-2 -> s transition is allowed
    alpha: np.ndarray          # (2U+1, T)
    beta: np.ndarray           # (2U+1, T)
    log_likelihood: float
    log_probs: np.ndarray      # the T x (V+1) input the lattice was built from

    @property
    def num_frames(self) -> int:
        return int(self.alpha.shape[1])

    def state_log_posteriors(self) -> np.ndarray:
        """``alpha + beta - log P`` per (state, frame)."""
        return self.alpha + self.beta - self.log_likelihood


def collapse_alignment(alignment: Sequence[int], blank_id: int) -> tuple[int, ...]:
    """Merge consecutive repeats, then drop blanks."""
    out: list[int] = []
    prev = None
    for a in alignment:
        if a != prev and a != blank_id:
            out.append(int(a))
        prev = a
    return tuple(out)


def min_frames(target: Sequence[int]) -> int:
    """Frames needed to emit ``target``: one per label plus one blank per repeat."""
    repeats = sum(1 for a, b in zip(target, target[1:]) if a == b)
    return len(target) + repeats


def _expand(target: Sequence[int], blank_id: int) -> tuple[np.ndarray, np.ndarray]:
    ext = np.full(2 * len(target) + 1, blank_id, dtype=np.int64)
    ext[1::2] = target
    skip = np.zeros(ext.size, dtype=bool)
    for s in range(3, ext.size, 2):
        skip[s] = ext[s] != ext[s - 2]
    return ext, skip


def _check_inputs(log_probs: np.ndarray, target: Sequence[int]) -> int:
    if log_probs.ndim != 2 or log_probs.shape[0] < 1:
        raise UsageError(f"log_probs must be a non-empty T x (V+1) matrix, got {log_probs.shape}")
    blank_id = log_probs.shape[1] - 1
    if not len(target):
        raise UsageError("CTC target must be non-empty")
    if any(not 0 <= y < blank_id for y in target):
        raise UsageError(f"target ids must lie in [0, {blank_id}) (blank is the last column)")
    norms = rows_log_normalizers(log_probs)
    if np.any(np.abs(norms) > NORMALIZATION_TOL):
        raise UsageError("log_probs rows are not normalized distributions")
    return blank_id


def ctc_loss(log_probs: np.ndarray, target: Sequence[int]) -> tuple[float, CtcLattice]:
    """``-log P(target | log_probs)`` summed over every collapsing alignment.

    Raises :class:`CtcInfeasibleError` when there are fewer frames than the
    target needs.
    """
    log_probs = np.asarray(log_probs, dtype=np.float64)
    blank_id = _check_inputs(log_probs, target)
    n_frames = log_probs.shape[0]
    required = min_frames(target)
    if n_frames < required:
        raise CtcInfeasibleError(n_frames, required)

    ext, skip = _expand(target, blank_id)
    n_states = ext.size
    emit = log_probs[:, ext].T                     # (S, T)

    alpha = np.full((n_states, n_frames), NEG_INF)
    alpha[0, 0] = emit[0, 0]
    alpha[1, 0] = emit[1, 0]
    for t in range(1, n_frames):
        prev = alpha[:, t - 1]
        acc = prev.copy()
        acc[1:] = np.logaddexp(acc[1:], prev[:-1])
        acc[2:] = np.where(skip[2:], np.logaddexp(acc[2:], prev[:-2]), acc[2:])
        alpha[:, t] = acc + emit[:, t]

    beta = np.full((n_states, n_frames), NEG_INF)
    beta[-1, -1] = 0.0
    beta[-2, -1] = 0.0
    for t in range(n_frames - 2, -1, -1):
        nxt = beta[:, t + 1] + emit[:, t + 1]
        acc = nxt.copy()
        acc[:-1] = np.logaddexp(acc[:-1], nxt[1:])
        acc[:-2] = np.where(skip[2:], np.logaddexp(acc[:-2], nxt[2:]), acc[:-2])
        beta[:, t] = acc

    log_p = float(np.logaddexp(alpha[-1, -1], alpha[-2, -1]))
    lattice = CtcLattice(ext, skip, alpha, beta, log_p, log_probs)
    return -log_p, lattice


def ctc_loss_bruteforce(log_probs: np.ndarray, target: Sequence[int]) -> float:
    """Oracle: enumerate all ``(V+1)^T`` alignments.

    An empty preimage (target longer than the frames allow) gives ``+inf``.
    """
    log_probs = np.asarray(log_probs, dtype=np.float64)
    n_frames, width = log_probs.shape
    if width ** n_frames > BRUTE_FORCE_LIMIT:
        raise UsageError(f"brute force over {width}^{n_frames} alignments exceeds {BRUTE_FORCE_LIMIT}")
    blank_id = width - 1
    want = tuple(int(y) for y in target)
    frames = np.arange(n_frames)
    scores = [
        float(log_probs[frames, list(path)].sum())
        for path in itertools.product(range(width), repeat=n_frames)
        if collapse_alignment(path, blank_id) == want
    ]
    if not scores:
        return float("inf")
    return -log_sum_exp(scores)


def label_posteriors(lattice: CtcLattice) -> np.ndarray:
    """``T x (V+1)`` occupation probabilities per output label; rows sum to 1."""
    n_frames, width = lattice.log_probs.shape
    post = np.exp(lattice.state_log_posteriors())   # (S, T)
    gamma = np.zeros((n_frames, width))
    for s, label in enumerate(lattice.ext):
        gamma[:, label] += post[s]
    return gamma


def ctc_gradient(lattice: CtcLattice, log_probs: np.ndarray) -> np.ndarray:
    """Gradient of the loss w.r.t. the pre-softmax logits: ``softmax - posteriors``."""
    log_probs = np.asarray(log_probs, dtype=np.float64)
    if log_probs.shape != lattice.log_probs.shape or not np.array_equal(log_probs, lattice.log_probs):
        raise UsageError("lattice was built from different log_probs")
    return np.exp(log_probs) - label_posteriors(lattice)
