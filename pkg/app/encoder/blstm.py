"""Bidirectional LSTM layer: ``y_t = [h_fwd_t ; h_bwd_t]``."""

from __future__ import annotations

import dataclasses

import numpy as np

from app.encoder.lstm import (
    LstmCellParams,
    SequenceCache,
    lstm_sequence_backward,
    lstm_sequence_forward,
)
from app.errors import UsageError
from app.numerics import ParamStore


@dataclasses.dataclass(frozen=True)
class BlstmLayerParams:
    forward_cell: LstmCellParams
    backward_cell: LstmCellParams

    def __post_init__(self) -> None:
        f, b = self.forward_cell, self.backward_cell
        if (f.input_dim, f.hidden_dim) != (b.input_dim, b.hidden_dim):
            raise UsageError("forward and backward cells must share input and hidden sizes")

    @classmethod
    def create(cls, store: ParamStore, prefix: str, input_dim: int, hidden_dim: int) -> "BlstmLayerParams":
        return cls(
            LstmCellParams.create(store, f"{prefix}.fwd", input_dim, hidden_dim),
            LstmCellParams.create(store, f"{prefix}.bwd", input_dim, hidden_dim),
        )

    @property
    def input_dim(self) -> int:
        return self.forward_cell.input_dim

    @property
    def hidden_dim(self) -> int:
        return self.forward_cell.hidden_dim


@dataclasses.dataclass
class BlstmCache:
    fwd: SequenceCache
    bwd: SequenceCache


def blstm_layer_forward(params: BlstmLayerParams, inputs: np.ndarray) -> tuple[np.ndarray, BlstmCache]:
    if inputs.shape[0] < 1:
        raise UsageError("BLSTM input must have at least one frame")
    h_fwd, c_fwd = lstm_sequence_forward(params.forward_cell, inputs)
    h_bwd, c_bwd = lstm_sequence_forward(params.backward_cell, inputs, reverse=True)
    return np.concatenate((h_fwd, h_bwd), axis=1), BlstmCache(c_fwd, c_bwd)


def blstm_layer_backward(params: BlstmLayerParams, cache: BlstmCache, d_out: np.ndarray) -> np.ndarray:
    h = params.hidden_dim
    dx = lstm_sequence_backward(params.forward_cell, cache.fwd, d_out[:, :h])
    dx += lstm_sequence_backward(params.backward_cell, cache.bwd, d_out[:, h:])
    return dx
