"""Named dense parameter tensors with paired gradient buffers.

:class:`ParamStore` holds every trainable matrix of a model under a dotted
name (``"listener.l0.fwd.W_x"``).  Each tensor has a gradient buffer of the
same shape; backward passes *accumulate* into it and the optimizer zeroes it.

Thread-safety
-------------
Read-only access to tensors is safe from several threads.  Gradient
accumulation takes an internal lock so per-utterance backward passes may
run concurrently; :func:`app.numerics.optim.sgd_step` must run alone.
"""

from __future__ import annotations

import threading
from typing import Iterator, Optional

import numpy as np

from app.errors import UsageError


class ParamStore:
    """Ordered map ``name → (tensor, grad)`` of 2-D float64 matrices."""

    def __init__(self, seed: int = 0) -> None:
        self.rng_seed = seed
        self._rng = np.random.default_rng(seed)
        self._tensors: dict[str, np.ndarray] = {}
        self._grads: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()
        # bumped on every optimizer step so stale forward caches can be detected
        self.version = 0

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    def add(
        self,
        name: str,
        rows: int,
        cols: int,
        init: str = "uniform",
        fan_in: Optional[int] = None,
        value: float = 0.0,
    ) -> np.ndarray:
        """Create a ``rows x cols`` tensor.

        ``init="uniform"`` draws from U(-r, r) with r = 1/sqrt(fan_in)
        (``fan_in`` defaults to ``cols``); ``init="constant"`` fills with
        ``value``.
        """
        if name in self._tensors:
            raise UsageError(f"duplicate parameter name '{name}'")
        if init == "uniform":
            r = 1.0 / np.sqrt(fan_in or cols)
            tensor = self._rng.uniform(-r, r, size=(rows, cols))
        elif init == "constant":
            tensor = np.full((rows, cols), float(value))
        else:
            raise UsageError(f"unknown initialiser '{init}'")
        self._tensors[name] = tensor
        self._grads[name] = np.zeros_like(tensor)
        return tensor

    def set(self, name: str, tensor: np.ndarray) -> None:
        """Replace (or create) a tensor; used by checkpoint loading and tests."""
        t = np.array(tensor, dtype=np.float64, ndmin=2)
        if name in self._tensors and self._tensors[name].shape != t.shape:
            raise UsageError(
                f"shape mismatch for '{name}': {self._tensors[name].shape} vs {t.shape}"
            )
        self._tensors[name] = t
        self._grads[name] = np.zeros_like(t)

    # ------------------------------------------------------------------
    # Access
    # ------------------------------------------------------------------

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self._tensors[name]
        except KeyError:
            raise UsageError(f"unknown parameter '{name}'") from None

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __len__(self) -> int:
        return len(self._tensors)

    def names(self) -> list[str]:
        return list(self._tensors)

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self._tensors.items())

    def grad(self, name: str) -> np.ndarray:
        return self._grads[name]

    def size(self) -> int:
        """Total number of scalar parameters."""
        return sum(t.size for t in self._tensors.values())

    # ------------------------------------------------------------------
    # Gradients
    # ------------------------------------------------------------------

    def accumulate(self, name: str, g: np.ndarray) -> None:
        buf = self._grads[name]
        with self._lock:
            buf += np.reshape(g, buf.shape)

    def accumulate_row(self, name: str, row: int, g: np.ndarray) -> None:
        """Sparse update for embedding lookups."""
        buf = self._grads[name]
        with self._lock:
            buf[row] += g

    def zero_grad(self) -> None:
        with self._lock:
            for g in self._grads.values():
                g.fill(0.0)

    def grad_norm(self) -> float:
        return float(np.sqrt(sum(float(np.sum(g * g)) for g in self._grads.values())))

    def scale_grads(self, factor: float) -> None:
        with self._lock:
            for g in self._grads.values():
                g *= factor

    # ------------------------------------------------------------------
    # Copies
    # ------------------------------------------------------------------

    def copy(self) -> "ParamStore":
        other = ParamStore(self.rng_seed)
        for name, t in self._tensors.items():
            other._tensors[name] = t.copy()
            other._grads[name] = self._grads[name].copy()
        other.version = self.version
        return other

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: t.copy() for name, t in self._tensors.items()}

    def restore(self, snapshot: dict[str, np.ndarray]) -> None:
        for name, t in snapshot.items():
            self._tensors[name][...] = t
        self.version += 1
