"""Listen, attend and spell: teacher-forced loss and its backward pass.

Step ``i`` of the decoder (``i = 0 .. L``)::

    query     = top speller hidden state after step i-1 (zeros at i = 0)
    weights, context = attend(query, h_enc)
    log_dist  = spell_step(state, context)     # state.prev_id = y*_{i-1}, sos at i = 0
    loss_i    = -log_dist[y*_i]                 # y*_L = eos

The utterance loss is the mean of the ``L + 1`` step losses.
"""

from __future__ import annotations

import dataclasses
from typing import Optional, Sequence

import numpy as np

from app.attention.attend import (
    AttendCache,
    AttentionMemory,
    attend,
    attend_backward,
    make_memory,
    memory_backward,
)
from app.attention.params import LasParams
from app.attention.speller import DecoderState, SpellCache, spell_step, spell_step_backward
from app.encoder import EncoderCache, encoder_backward, encoder_forward
from app.errors import UsageError
from app.models import FeatureMatrix, LasConfig, NoiseConfig
from app.numerics import add_gaussian_noise


def listen(
    cfg: LasConfig,
    params: LasParams,
    features: FeatureMatrix,
    train_mode: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, EncoderCache]:
    """Pyramidal BLSTM encoding: ``T`` frames become ``ceil(T / step^layers)``."""
    return encoder_forward(cfg.listener(), params.listener, features, train_mode, rng)


@dataclasses.dataclass
class LasCache:
    encoder: EncoderCache
    memory: AttentionMemory
    steps: list[tuple[AttendCache, SpellCache]]
    outputs: tuple[int, ...]


def las_loss(
    cfg: LasConfig,
    params: LasParams,
    features: FeatureMatrix,
    target: Sequence[int],
    train_mode: bool = False,
    rng: Optional[np.random.Generator] = None,
    noise: Optional[NoiseConfig] = None,
) -> tuple[float, LasCache]:
    """Mean cross-entropy of the teacher-forced decoder, end-of-sequence step included.

    In training mode Gaussian noise (``noise``) is added to the features and
    dropout is applied in the listener and speller.
    """
    if not len(target):
        raise UsageError("attention target must be non-empty")
    if any(not 0 <= y < params.num_labels for y in target):
        raise UsageError(f"target ids must lie in [0, {params.num_labels})")
    if train_mode and noise is not None and noise.sigma > 0:
        if rng is None:
            raise UsageError("training-mode noise needs an rng")
        features = add_gaussian_noise(features, noise, rng)

    h_enc, enc_cache = listen(cfg, params, features, train_mode, rng)
    memory = make_memory(params, h_enc)
    inputs = (params.sos_id, *target)
    outputs = (*target, params.eos_id)

    state = DecoderState.initial(params)
    steps = []
    total = 0.0
    for prev, gold in zip(inputs, outputs):
        _, context, a_cache = attend(params, state.query, memory)
        state = dataclasses.replace(state, prev_id=prev)
        log_dist, state, s_cache = spell_step(params, state, context, train_mode, rng)
        total -= float(log_dist[gold])
        steps.append((a_cache, s_cache))
    loss = total / len(outputs)
    return loss, LasCache(enc_cache, memory, steps, outputs)


def las_backward(params: LasParams, cache: LasCache) -> np.ndarray:
    """Accumulate gradients of :func:`las_loss`; return ``d features``."""
    n_steps = len(cache.outputs)
    hs = params.speller_dim
    dh = [np.zeros(hs) for _ in params.speller]
    dc = [np.zeros(hs) for _ in params.speller]
    for (a_cache, s_cache), gold in zip(reversed(cache.steps), reversed(cache.outputs)):
        d_logits = np.exp(s_cache.log_dist)
        d_logits[gold] -= 1.0
        d_logits /= n_steps
        d_context, dh, dc = spell_step_backward(params, s_cache, d_logits, dh, dc)
        d_query = attend_backward(params, cache.memory, a_cache, d_context)
        dh[-1] = dh[-1] + d_query
    d_h_enc = memory_backward(params, cache.memory)
    return encoder_backward(cache.encoder, d_h_enc)
