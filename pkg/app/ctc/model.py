"""DBLSTM-CTC acoustic model: flat BLSTM encoder, output projection, log-softmax.

The output layer has ``alphabet.size + 1`` units; the last one is the blank.
"""

from __future__ import annotations

import dataclasses
from typing import Optional, Sequence

import numpy as np

from app.ctc.decode import ctc_greedy_decode
from app.ctc.lattice import ctc_gradient, ctc_loss
from app.encoder import (
    EncoderCache,
    EncoderParams,
    OutputProjectionParams,
    encoder_backward,
    encoder_forward,
    project_sequence,
    project_sequence_backward,
)
from app.errors import UsageError
from app.models import FLAT, EncoderConfig, FeatureMatrix, Hypothesis, NoiseConfig
from app.numerics import ParamStore, add_gaussian_noise, log_softmax


@dataclasses.dataclass(frozen=True)
class CtcModel:
    cfg: EncoderConfig
    store: ParamStore
    encoder: EncoderParams
    output: OutputProjectionParams

    @classmethod
    def create(cls, cfg: EncoderConfig, num_labels: int, store: ParamStore) -> "CtcModel":
        """``num_labels`` counts the alphabet including the separator, not the blank."""
        if cfg.kind != FLAT:
            raise UsageError("the CTC model uses a flat encoder")
        encoder = EncoderParams.create(cfg, store, "encoder")
        output = OutputProjectionParams.create(store, "output", cfg.units_per_direction, num_labels + 1)
        return cls(cfg, store, encoder, output)

    @property
    def blank_id(self) -> int:
        return self.output.output_dim - 1

    def forward(
        self,
        features: FeatureMatrix,
        train_mode: bool = False,
        rng: Optional[np.random.Generator] = None,
    ) -> tuple[np.ndarray, np.ndarray, EncoderCache]:
        """Return ``(log_probs, h_enc, encoder cache)``."""
        h_enc, cache = encoder_forward(self.cfg, self.encoder, features, train_mode, rng)
        return log_softmax(project_sequence(self.output, h_enc)), h_enc, cache

    def loss(
        self,
        features: FeatureMatrix,
        target: Sequence[int],
        train_mode: bool = False,
        rng: Optional[np.random.Generator] = None,
        backward: bool = False,
        noise: Optional[NoiseConfig] = None,
    ) -> float:
        """CTC loss of one utterance; accumulates gradients when ``backward``.

        In training mode Gaussian ``noise`` is added to the features first.
        """
        if train_mode and noise is not None and noise.sigma > 0:
            if rng is None:
                raise UsageError("training-mode noise needs an rng")
            features = add_gaussian_noise(features, noise, rng)
        log_probs, h_enc, cache = self.forward(features, train_mode, rng)
        value, lattice = ctc_loss(log_probs, target)
        if backward:
            d_logits = ctc_gradient(lattice, log_probs)
            d_h = project_sequence_backward(self.output, h_enc, d_logits)
            encoder_backward(cache, d_h)
        return value

    def decode(self, features: FeatureMatrix) -> Hypothesis:
        log_probs, _, _ = self.forward(features)
        return ctc_greedy_decode(log_probs)
