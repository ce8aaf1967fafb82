"""LSTM cell with hand-derived backpropagation.

Gate layout inside the ``4H`` pre-activation: input, forget, output,
candidate.  Parameters live in a :class:`~app.numerics.ParamStore` under
``<prefix>.W_x`` (D x 4H), ``<prefix>.W_h`` (H x 4H) and ``<prefix>.b``
(1 x 4H)::

    z = x W_x + h_prev W_h + b
    i, f, o = sigmoid(z_i), sigmoid(z_f), sigmoid(z_o);  g = tanh(z_g)
    c = f * c_prev + i * g
    h = o * tanh(c)
"""

from __future__ import annotations

import dataclasses

import numpy as np

from app.errors import UsageError
from app.numerics import ParamStore, sigmoid


@dataclasses.dataclass(frozen=True)
class LstmCellParams:
    store: ParamStore
    prefix: str
    input_dim: int
    hidden_dim: int

    @classmethod
    def create(cls, store: ParamStore, prefix: str, input_dim: int, hidden_dim: int,
               forget_bias: float = 1.0) -> "LstmCellParams":
        h = hidden_dim
        store.add(f"{prefix}.W_x", input_dim, 4 * h, fan_in=input_dim)
        store.add(f"{prefix}.W_h", h, 4 * h, fan_in=h)
        b = store.add(f"{prefix}.b", 1, 4 * h, init="constant")
        b[0, h:2 * h] = forget_bias
        return cls(store, prefix, input_dim, hidden_dim)

    @property
    def W_x(self) -> np.ndarray:
        return self.store[f"{self.prefix}.W_x"]

    @property
    def W_h(self) -> np.ndarray:
        return self.store[f"{self.prefix}.W_h"]

    @property
    def b(self) -> np.ndarray:
        return self.store[f"{self.prefix}.b"]


@dataclasses.dataclass
class StepCache:
    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    gates: tuple[np.ndarray, ...]       # i, f, o, g, tanh(c)


def _activate(z: np.ndarray, c_prev: np.ndarray, h: int):
    i = sigmoid(z[:h])
    f = sigmoid(z[h:2 * h])
    o = sigmoid(z[2 * h:3 * h])
    g = np.tanh(z[3 * h:])
    c = f * c_prev + i * g
    tc = np.tanh(c)
    return o * tc, c, (i, f, o, g, tc)


def _gate_grads(gates, c_prev: np.ndarray, dh: np.ndarray, dc_next: np.ndarray):
    """Return (dz, dc_prev) given upstream dh and the cell-state gradient."""
    i, f, o, g, tc = gates
    dc = dc_next + dh * o * (1.0 - tc * tc)
    dz = np.concatenate((
        dc * g * i * (1.0 - i),
        dc * c_prev * f * (1.0 - f),
        dh * tc * o * (1.0 - o),
        dc * i * (1.0 - g * g),
    ))
    return dz, dc * f


def lstm_cell_step(params: LstmCellParams, x_t: np.ndarray, h_prev: np.ndarray,
                   c_prev: np.ndarray) -> tuple[np.ndarray, np.ndarray, StepCache]:
    if x_t.shape != (params.input_dim,):
        raise UsageError(f"{params.prefix}: input has shape {x_t.shape}, expected ({params.input_dim},)")
    if h_prev.shape != (params.hidden_dim,) or c_prev.shape != (params.hidden_dim,):
        raise UsageError(f"{params.prefix}: state must have shape ({params.hidden_dim},)")
    z = x_t @ params.W_x + h_prev @ params.W_h + params.b[0]
    h, c, gates = _activate(z, c_prev, params.hidden_dim)
    return h, c, StepCache(x_t, h_prev, c_prev, gates)


def lstm_cell_step_backward(params: LstmCellParams, cache: StepCache, dh: np.ndarray,
                            dc: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Accumulate parameter gradients; return (dx, dh_prev, dc_prev)."""
    dz, dc_prev = _gate_grads(cache.gates, cache.c_prev, dh, dc)
    store, p = params.store, params.prefix
    store.accumulate(f"{p}.W_x", np.outer(cache.x, dz))
    store.accumulate(f"{p}.W_h", np.outer(cache.h_prev, dz))
    store.accumulate(f"{p}.b", dz)
    return params.W_x @ dz, params.W_h @ dz, dc_prev


# ---------------------------------------------------------------------------
# Whole sequences
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class SequenceCache:
    x: np.ndarray           # T x D, in time order
    h_prev: np.ndarray      # T x H, state fed into step t
    c_prev: np.ndarray
    gates: list             # per time index
    reverse: bool


def lstm_sequence_forward(params: LstmCellParams, x: np.ndarray,
                          reverse: bool = False) -> tuple[np.ndarray, SequenceCache]:
    """Run the cell over ``x`` (T x D) left-to-right, or right-to-left when
    ``reverse``; outputs are returned in time order."""
    t_len = x.shape[0]
    if x.ndim != 2 or x.shape[1] != params.input_dim:
        raise UsageError(f"{params.prefix}: input has shape {x.shape}, expected (T, {params.input_dim})")
    hd = params.hidden_dim
    zx = x @ params.W_x + params.b[0]
    w_h = params.W_h
    out = np.zeros((t_len, hd))
    h_prev = np.zeros((t_len, hd))
    c_prev = np.zeros((t_len, hd))
    gates: list = [None] * t_len
    h = np.zeros(hd)
    c = np.zeros(hd)
    for t in (reversed(range(t_len)) if reverse else range(t_len)):
        h_prev[t] = h
        c_prev[t] = c
        h, c, gates[t] = _activate(zx[t] + h @ w_h, c, hd)
        out[t] = h
    return out, SequenceCache(x, h_prev, c_prev, gates, reverse)


def lstm_sequence_backward(params: LstmCellParams, cache: SequenceCache,
                           d_out: np.ndarray) -> np.ndarray:
    """Backpropagate through time; accumulate grads and return dX (T x D)."""
    t_len, hd = d_out.shape
    w_h = params.W_h
    dz_all = np.zeros((t_len, 4 * hd))
    dh_next = np.zeros(hd)
    dc_next = np.zeros(hd)
    for t in (range(t_len) if cache.reverse else reversed(range(t_len))):
        dz, dc_next = _gate_grads(cache.gates[t], cache.c_prev[t], d_out[t] + dh_next, dc_next)
        dz_all[t] = dz
        dh_next = w_h @ dz
    store, p = params.store, params.prefix
    store.accumulate(f"{p}.W_x", cache.x.T @ dz_all)
    store.accumulate(f"{p}.W_h", cache.h_prev.T @ dz_all)
    store.accumulate(f"{p}.b", dz_all.sum(axis=0))
    return dz_all @ params.W_x.T
