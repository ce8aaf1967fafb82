"""Connectionist temporal classification: loss, gradient, decoding, model."""

from app.ctc.lattice import (
    CtcLattice,
    collapse_alignment,
    ctc_gradient,
    ctc_loss,
    ctc_loss_bruteforce,
    label_posteriors,
    min_frames,
)
from app.ctc.decode import ctc_greedy_decode
from app.ctc.model import CtcModel

__all__ = [
    "CtcLattice",
    "CtcModel",
    "collapse_alignment",
    "ctc_gradient",
    "ctc_greedy_decode",
    "ctc_loss",
    "ctc_loss_bruteforce",
    "label_posteriors",
    "min_frames",
]
