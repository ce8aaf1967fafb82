"""Content-based attention over the listener output.

additive::

    e_u = v . tanh(query W_q + h_u W_h + b)

dot::

    e_u = h_u . (query W_q)

``weights = softmax(e)`` and ``context = sum_u weights_u h_u``.  The key
projection ``h W_h`` does not depend on the query, so it is computed once
per utterance in :class:`AttentionMemory` and its gradient is folded back
by :func:`memory_backward` after the whole decoder pass.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from app.attention.params import LasParams
from app.errors import UsageError
from app.models import ADDITIVE
from app.numerics import softmax


@dataclasses.dataclass
class AttentionMemory:
    h_enc: np.ndarray                # U x C
    keys: Optional[np.ndarray]       # U x A (additive scoring only)
    d_h_enc: np.ndarray              # accumulated during backward
    d_keys: Optional[np.ndarray]


@dataclasses.dataclass
class AttendCache:
    query: np.ndarray
    weights: np.ndarray
    act: Optional[np.ndarray]        # tanh activations (additive)
    proj: Optional[np.ndarray]       # query W_q (dot)


def make_memory(params: LasParams, h_enc: np.ndarray) -> AttentionMemory:
    if h_enc.ndim != 2 or h_enc.shape[0] < 1:
        raise UsageError("attention needs at least one encoder frame")
    if h_enc.shape[1] != params.context_dim:
        raise UsageError(f"encoder frames have {h_enc.shape[1]} dims, expected {params.context_dim}")
    keys = h_enc @ params["attend.W_h"] if params.cfg.scoring == ADDITIVE else None
    return AttentionMemory(
        h_enc,
        keys,
        np.zeros_like(h_enc),
        np.zeros_like(keys) if keys is not None else None,
    )


def attend(params: LasParams, query: np.ndarray, memory: AttentionMemory
           ) -> tuple[np.ndarray, np.ndarray, AttendCache]:
    """Return ``(weights, context, cache)`` for one decoder step."""
    if query.shape != (params.speller_dim,):
        raise UsageError(f"attention query must have shape ({params.speller_dim},)")
    if params.cfg.scoring == ADDITIVE:
        act = np.tanh(query @ params["attend.W_q"] + memory.keys + params["attend.b"][0])
        scores = act @ params["attend.v"][:, 0]
        proj = None
    else:
        proj = query @ params["attend.W_q"]
        scores = memory.h_enc @ proj
        act = None
    weights = softmax(scores)
    context = weights @ memory.h_enc
    return weights, context, AttendCache(query, weights, act, proj)


def attend_backward(params: LasParams, memory: AttentionMemory, cache: AttendCache,
                    d_context: np.ndarray) -> np.ndarray:
    """Accumulate scoring gradients and ``d h_enc`` into ``memory``; return ``d query``."""
    h_enc, w = memory.h_enc, cache.weights
    memory.d_h_enc += np.outer(w, d_context)
    d_w = h_enc @ d_context
    d_scores = w * (d_w - w @ d_w)
    store = params.store
    if params.cfg.scoring == ADDITIVE:
        v = params["attend.v"][:, 0]
        store.accumulate("attend.v", cache.act.T @ d_scores)
        d_pre = np.outer(d_scores, v) * (1.0 - cache.act * cache.act)
        memory.d_keys += d_pre
        d_q_proj = d_pre.sum(axis=0)
        store.accumulate("attend.b", d_q_proj)
    else:
        memory.d_h_enc += np.outer(d_scores, cache.proj)
        d_q_proj = h_enc.T @ d_scores
    store.accumulate("attend.W_q", np.outer(cache.query, d_q_proj))
    return params["attend.W_q"] @ d_q_proj


def memory_backward(params: LasParams, memory: AttentionMemory) -> np.ndarray:
    """Fold the key-projection gradient in; return the total ``d h_enc``."""
    d_h = memory.d_h_enc
    if memory.d_keys is not None:
        params.store.accumulate("attend.W_h", memory.h_enc.T @ memory.d_keys)
        d_h = d_h + memory.d_keys @ params["attend.W_h"].T
    return d_h
