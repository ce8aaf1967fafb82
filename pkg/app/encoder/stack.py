"""Deep (flat) and pyramidal BLSTM encoder stacks.

``flat``       BLSTM layers at the full frame rate (the CTC encoder).
``pyramidal``  :func:`pyramid_subsample` before *every* layer, so the
               output is ``step ** layers`` times shorter (the listener).

Dropout (inverted, per element) is applied to each layer's output only in
training mode; with ``train_mode`` off the forward pass is a pure function
of parameters and features.
"""

from __future__ import annotations

import dataclasses
from typing import Optional, Union

import numpy as np

from app.encoder.blstm import BlstmCache, BlstmLayerParams, blstm_layer_backward, blstm_layer_forward
from app.encoder.pyramid import pyramid_backward, pyramid_subsample
from app.errors import TooShortError, UsageError
from app.models import PYRAMIDAL, EncoderConfig, FeatureMatrix
from app.numerics import ParamStore, dropout_mask


@dataclasses.dataclass(frozen=True)
class EncoderParams:
    cfg: EncoderConfig
    store: ParamStore
    layers: tuple[BlstmLayerParams, ...]

    @classmethod
    def create(cls, cfg: EncoderConfig, store: ParamStore, prefix: str = "encoder") -> "EncoderParams":
        step = cfg.pyramid_step if cfg.kind == PYRAMIDAL else 1
        layers = []
        in_dim = cfg.input_dim
        for n in range(cfg.layers):
            layers.append(BlstmLayerParams.create(store, f"{prefix}.l{n}", in_dim * step,
                                                  cfg.units_per_direction))
            in_dim = cfg.output_dim
        return cls(cfg, store, tuple(layers))


@dataclasses.dataclass
class _LayerCache:
    input_frames: int
    blstm: BlstmCache
    mask: Optional[np.ndarray]


@dataclasses.dataclass
class EncoderCache:
    layers: list[_LayerCache]
    params: EncoderParams
    version: int
    consumed: bool = False


def encoder_forward(
    cfg: EncoderConfig,
    params: EncoderParams,
    features: Union[FeatureMatrix, np.ndarray],
    train_mode: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, EncoderCache]:
    """Return the hidden sequence ``h_enc`` and the caches for backprop."""
    x = features.frames if isinstance(features, FeatureMatrix) else features
    uid = features.utterance_id if isinstance(features, FeatureMatrix) else ""
    if x.ndim != 2 or x.shape[1] != cfg.input_dim:
        raise UsageError(f"encoder expects {cfg.input_dim}-dim features, got shape {x.shape}")
    if x.shape[0] < 1:
        raise TooShortError("no input frames", uid)
    dropout = train_mode and cfg.dropout_rate > 0
    if dropout and rng is None:
        raise UsageError("training-mode dropout needs an rng")
    step = cfg.pyramid_step if cfg.kind == PYRAMIDAL else 1

    caches = []
    h = x
    for layer in params.layers:
        t_in = h.shape[0]
        h = pyramid_subsample(h, step)
        if h.shape[0] < 1:
            raise TooShortError("pyramid reduced the utterance to 0 frames", uid)
        h, bc = blstm_layer_forward(layer, h)
        mask = None
        if dropout:
            mask = dropout_mask(rng, h.shape, cfg.dropout_rate)
            h = h * mask
        caches.append(_LayerCache(t_in, bc, mask))
    return h, EncoderCache(caches, params, params.store.version)


def encoder_backward(cache: EncoderCache, d_out: np.ndarray) -> np.ndarray:
    """Accumulate encoder gradients; return the gradient w.r.t. the features."""
    if cache.consumed:
        raise UsageError("encoder cache was already used for a backward pass")
    if cache.version != cache.params.store.version:
        raise UsageError("encoder cache is stale: parameters changed since the forward pass")
    cache.consumed = True
    cfg = cache.params.cfg
    step = cfg.pyramid_step if cfg.kind == PYRAMIDAL else 1
    d = d_out
    for layer, lc in zip(reversed(cache.params.layers), reversed(cache.layers)):
        if lc.mask is not None:
            d = d * lc.mask
        d = blstm_layer_backward(layer, lc.blstm, d)
        d = pyramid_backward(d, step, lc.input_frames)
    return d
