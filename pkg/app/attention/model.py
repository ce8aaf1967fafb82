"""Attention (LAS) model wrapper used by training, decoding and checkpoints."""

from __future__ import annotations

import dataclasses
from typing import Optional, Sequence

import numpy as np

from app.attention.las import las_backward, las_loss
from app.attention.params import LasParams
from app.attention.search import beam_search, greedy_decode
from app.models import FeatureMatrix, Hypothesis, LasConfig, NoiseConfig
from app.numerics import ParamStore


@dataclasses.dataclass(frozen=True)
class LasModel:
    cfg: LasConfig
    store: ParamStore
    params: LasParams

    @classmethod
    def create(cls, cfg: LasConfig, num_labels: int, store: ParamStore) -> "LasModel":
        return cls(cfg, store, LasParams.create(cfg, num_labels, store))

    def loss(
        self,
        features: FeatureMatrix,
        target: Sequence[int],
        train_mode: bool = False,
        rng: Optional[np.random.Generator] = None,
        backward: bool = False,
        noise: Optional[NoiseConfig] = None,
    ) -> float:
        value, cache = las_loss(self.cfg, self.params, features, target, train_mode, rng, noise)
        if backward:
            las_backward(self.params, cache)
        return value

    def decode(self, features: FeatureMatrix, beam_width: Optional[int] = None,
               widening: Optional[bool] = None) -> Hypothesis:
        return beam_search(self.cfg, self.params, features, beam_width, widening)[0]

    def greedy(self, features: FeatureMatrix) -> Hypothesis:
        return greedy_decode(self.cfg, self.params, features)
