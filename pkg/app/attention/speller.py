"""One speller step: LSTM stack over ``[embed(prev) ; context]`` then softmax.

In training mode dropout is applied between speller layers and to the top
hidden vector before the output layer; the recurrent state always carries
the undropped vectors.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from app.attention.params import LasParams
from app.encoder import lstm_cell_step, lstm_cell_step_backward
from app.encoder.lstm import StepCache
from app.errors import UsageError
from app.numerics import dropout_mask, log_softmax


@dataclasses.dataclass(frozen=True)
class DecoderState:
    h: tuple[np.ndarray, ...]         # per speller layer
    c: tuple[np.ndarray, ...]
    prev_id: int
    log_score: float = 0.0

    @classmethod
    def initial(cls, params: LasParams) -> "DecoderState":
        zeros = tuple(np.zeros(params.speller_dim) for _ in params.speller)
        return cls(zeros, zeros, params.sos_id, 0.0)

    @property
    def query(self) -> np.ndarray:
        return self.h[-1]


@dataclasses.dataclass
class SpellCache:
    prev_id: int
    context: np.ndarray
    cells: list[StepCache]
    masks: list[Optional[np.ndarray]]      # before layers 1.., then before the output layer
    out_input: np.ndarray
    log_dist: np.ndarray


def spell_step(
    params: LasParams,
    state: DecoderState,
    context: np.ndarray,
    train_mode: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> tuple[np.ndarray, DecoderState, SpellCache]:
    """Return ``(log distribution over K+1 outputs, next state, cache)``.

    The next state's ``log_score`` is left unchanged; callers add the
    chosen label's log-probability.
    """
    if context.shape != (params.context_dim,):
        raise UsageError(f"context must have shape ({params.context_dim},)")
    rate = params.cfg.dropout_rate
    dropout = train_mode and rate > 0
    if dropout and rng is None:
        raise UsageError("training-mode dropout needs an rng")

    x = np.concatenate((params["speller.embed"][state.prev_id], context))
    hs, cs, caches, masks = [], [], [], []
    for n, cell in enumerate(params.speller):
        if n:
            mask = dropout_mask(rng, x.shape, rate) if dropout else None
            masks.append(mask)
            if mask is not None:
                x = x * mask
        h, c, cache = lstm_cell_step(cell, x, state.h[n], state.c[n])
        hs.append(h)
        cs.append(c)
        caches.append(cache)
        x = h
    mask = dropout_mask(rng, x.shape, rate) if dropout else None
    masks.append(mask)
    top = x * mask if mask is not None else x
    out_input = np.concatenate((top, context))
    log_dist = log_softmax(out_input @ params["speller.W_out"] + params["speller.b_out"][0])
    nxt = DecoderState(tuple(hs), tuple(cs), state.prev_id, state.log_score)
    return log_dist, nxt, SpellCache(state.prev_id, context, caches, masks, out_input, log_dist)


def spell_step_backward(
    params: LasParams,
    cache: SpellCache,
    d_logits: np.ndarray,
    dh_next: list[np.ndarray],
    dc_next: list[np.ndarray],
) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
    """Accumulate speller gradients.

    ``dh_next`` / ``dc_next`` are the gradients flowing into this step's
    output state from later steps.  Returns ``(d context, dh_prev, dc_prev)``.
    """
    store = params.store
    store.accumulate("speller.W_out", np.outer(cache.out_input, d_logits))
    store.accumulate("speller.b_out", d_logits)
    d_in = params["speller.W_out"] @ d_logits
    hs = params.speller_dim
    d_context = d_in[hs:].copy()
    d_top = d_in[:hs]
    if cache.masks[-1] is not None:
        d_top = d_top * cache.masks[-1]

    dh = list(dh_next)
    dh[-1] = dh[-1] + d_top
    dh_prev: list[np.ndarray] = [np.zeros(hs)] * len(params.speller)
    dc_prev: list[np.ndarray] = [np.zeros(hs)] * len(params.speller)
    for n in reversed(range(len(params.speller))):
        dx, dh_prev[n], dc_prev[n] = lstm_cell_step_backward(
            params.speller[n], cache.cells[n], dh[n], dc_next[n]
        )
        if n:
            mask = cache.masks[n - 1]
            dh[n - 1] = dh[n - 1] + (dx * mask if mask is not None else dx)
        else:
            e = params.cfg.embed_dim
            store.accumulate_row("speller.embed", cache.prev_id, dx[:e])
            d_context += dx[e:]
    return d_context, dh_prev, dc_prev
