"""Training-time additive Gaussian noise on feature matrices."""

from __future__ import annotations

from typing import Optional

import numpy as np

from app.models import FeatureMatrix, NoiseConfig


def add_gaussian_noise(
    features: FeatureMatrix,
    cfg: NoiseConfig,
    rng: Optional[np.random.Generator] = None,
) -> FeatureMatrix:
    """Return ``features + N(0, sigma^2)`` i.i.d. per cell.

    Noise is drawn from ``rng`` when given (training loops pass one running
    generator so every epoch sees fresh noise), else from ``cfg.seed``.
    """
    if cfg.sigma == 0:
        return FeatureMatrix(features.frames.copy(), features.utterance_id)
    gen = rng if rng is not None else np.random.default_rng(cfg.seed)
    noisy = features.frames + gen.normal(0.0, cfg.sigma, size=features.frames.shape)
    return FeatureMatrix(noisy, features.utterance_id)


def dropout_mask(rng: np.random.Generator, shape, rate: float) -> np.ndarray:
    """Inverted-dropout mask: 0 with probability ``rate``, else ``1/(1-rate)``."""
    keep = rng.random(shape) >= rate
    return keep / (1.0 - rate)
