"""Best-path (greedy) CTC decoding."""

from __future__ import annotations

import numpy as np

from app.ctc.lattice import collapse_alignment
from app.models import Hypothesis


def ctc_greedy_decode(log_probs: np.ndarray) -> Hypothesis:
    """Per-frame argmax, collapsed; the score is the best path's log-probability."""
    log_probs = np.asarray(log_probs, dtype=np.float64)
    path = np.argmax(log_probs, axis=1)
    score = float(log_probs[np.arange(len(path)), path].sum())
    return Hypothesis(collapse_alignment(path.tolist(), log_probs.shape[1] - 1), score)
