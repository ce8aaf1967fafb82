"""Output layer over BLSTM states: ``y = W_fwd h_fwd + W_bwd h_bwd + b``.

``W_fwd`` and ``W_bwd`` are ``V x H`` so a unit vector ``h_fwd = e_i``
selects column ``i`` of ``W_fwd``.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from app.errors import UsageError
from app.numerics import ParamStore


@dataclasses.dataclass(frozen=True)
class OutputProjectionParams:
    store: ParamStore
    prefix: str
    hidden_dim: int        # per direction
    output_dim: int

    @classmethod
    def create(cls, store: ParamStore, prefix: str, hidden_dim: int, output_dim: int) -> "OutputProjectionParams":
        store.add(f"{prefix}.W_fwd", output_dim, hidden_dim, fan_in=2 * hidden_dim)
        store.add(f"{prefix}.W_bwd", output_dim, hidden_dim, fan_in=2 * hidden_dim)
        store.add(f"{prefix}.b", 1, output_dim, init="constant")
        return cls(store, prefix, hidden_dim, output_dim)

    @property
    def W_fwd(self) -> np.ndarray:
        return self.store[f"{self.prefix}.W_fwd"]

    @property
    def W_bwd(self) -> np.ndarray:
        return self.store[f"{self.prefix}.W_bwd"]

    @property
    def b(self) -> np.ndarray:
        return self.store[f"{self.prefix}.b"]


def output_projection(params: OutputProjectionParams, h_fwd: np.ndarray, h_bwd: np.ndarray) -> np.ndarray:
    if h_fwd.shape[-1] != params.hidden_dim or h_bwd.shape[-1] != params.hidden_dim:
        raise UsageError(f"{params.prefix}: hidden vectors must have {params.hidden_dim} entries")
    return h_fwd @ params.W_fwd.T + h_bwd @ params.W_bwd.T + params.b[0]


def project_sequence(params: OutputProjectionParams, h_enc: np.ndarray) -> np.ndarray:
    """Logits for every frame of a ``T x 2H`` encoder output."""
    h = params.hidden_dim
    return output_projection(params, h_enc[:, :h], h_enc[:, h:])


def project_sequence_backward(params: OutputProjectionParams, h_enc: np.ndarray,
                              d_logits: np.ndarray) -> np.ndarray:
    """Accumulate projection gradients; return ``d h_enc``."""
    h = params.hidden_dim
    store, p = params.store, params.prefix
    store.accumulate(f"{p}.W_fwd", d_logits.T @ h_enc[:, :h])
    store.accumulate(f"{p}.W_bwd", d_logits.T @ h_enc[:, h:])
    store.accumulate(f"{p}.b", d_logits.sum(axis=0))
    return np.concatenate((d_logits @ params.W_fwd, d_logits @ params.W_bwd), axis=1)
