"""Parameter layout of the listen-attend-spell model.

Output classes are the ``K`` alphabet entries plus end-of-sequence
(``eos_id = K``).  The embedding table has ``K + 2`` rows so the
start-of-sequence id ``K + 1`` can be fed as a previous label; row ``K``
(eos as an input) is never read.

Tensor names::

    listener.l{n}.{fwd,bwd}.{W_x,W_h,b}     pyramidal BLSTM stack
    attend.W_q  attend.W_h  attend.b  attend.v   additive scoring
    attend.W_q                                 dot scoring (Hs x C)
    speller.embed                              (K+2) x E
    speller.l{n}.{W_x,W_h,b}                   LSTM stack
    speller.W_out  speller.b_out               ((Hs + C) x (K+1)), (1 x (K+1))
"""

from __future__ import annotations

import dataclasses

import numpy as np

from app.encoder import EncoderParams, LstmCellParams
from app.models import ADDITIVE, LasConfig
from app.numerics import ParamStore


@dataclasses.dataclass(frozen=True)
class LasParams:
    cfg: LasConfig
    store: ParamStore
    num_labels: int                          # K, alphabet size including the separator
    listener: EncoderParams
    speller: tuple[LstmCellParams, ...]

    @classmethod
    def create(cls, cfg: LasConfig, num_labels: int, store: ParamStore) -> "LasParams":
        listener = EncoderParams.create(cfg.listener(), store, "listener")
        ctx = 2 * cfg.listener_units
        hs = cfg.speller_units
        if cfg.scoring == ADDITIVE:
            store.add("attend.W_q", hs, cfg.attention_dim, fan_in=hs)
            store.add("attend.W_h", ctx, cfg.attention_dim, fan_in=ctx)
            store.add("attend.b", 1, cfg.attention_dim, init="constant")
            store.add("attend.v", cfg.attention_dim, 1, fan_in=cfg.attention_dim)
        else:
            store.add("attend.W_q", hs, ctx, fan_in=hs)
        store.add("speller.embed", num_labels + 2, cfg.embed_dim, fan_in=1)
        cells = []
        in_dim = cfg.embed_dim + ctx
        for n in range(cfg.speller_layers):
            cells.append(LstmCellParams.create(store, f"speller.l{n}", in_dim, hs))
            in_dim = hs
        store.add("speller.W_out", hs + ctx, num_labels + 1, fan_in=hs + ctx)
        store.add("speller.b_out", 1, num_labels + 1, init="constant")
        return cls(cfg, store, num_labels, listener, tuple(cells))

    # ── ids ──

    @property
    def eos_id(self) -> int:
        return self.num_labels

    @property
    def sos_id(self) -> int:
        return self.num_labels + 1

    @property
    def num_outputs(self) -> int:
        return self.num_labels + 1

    # ── dims ──

    @property
    def context_dim(self) -> int:
        return 2 * self.cfg.listener_units

    @property
    def speller_dim(self) -> int:
        return self.cfg.speller_units

    def __getitem__(self, name: str) -> np.ndarray:
        return self.store[name]
