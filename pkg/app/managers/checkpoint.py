"""Model checkpoints.

Layout (little-endian)::

    magic "CSE2" | version u32 | header_len u32 | header (UTF-8 JSON)
    count u32
    count x { name_len u32 | name (UTF-8) | rows u32 | cols u32 | rows*cols float64 }

The JSON header carries the experiment configuration (``to_dict()`` form),
the target scheme, the alphabet fingerprint and size, and free-form
training metadata (epoch, dev loss).  Decoding refuses a checkpoint whose
scheme or alphabet fingerprint differs from the runtime alphabet.
"""

from __future__ import annotations

import dataclasses
import json
import os
import pathlib
import struct
from typing import Any, Optional

import numpy as np

from app.constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from app.errors import FormatError, SchemeMismatchError, UsageError
from app.managers.logger import get_logger
from app.models import ExperimentConfig
from app.numerics import ParamStore
from app.targets import Alphabet

log = get_logger(__name__)

_PREAMBLE = struct.Struct("<4sII")
_U32 = struct.Struct("<I")
_SHAPE = struct.Struct("<II")


@dataclasses.dataclass
class Checkpoint:
    config: ExperimentConfig
    scheme: str
    alphabet_fingerprint: str
    alphabet_size: int
    tensors: dict[str, np.ndarray]
    meta: dict[str, Any] = dataclasses.field(default_factory=dict)

    def check_alphabet(self, alphabet: Alphabet) -> None:
        """Raise :class:`SchemeMismatchError` unless ``alphabet`` is the training one."""
        if alphabet.kind != self.scheme:
            raise SchemeMismatchError(
                f"checkpoint was trained on {self.scheme} targets, runtime alphabet is {alphabet.kind}"
            )
        if alphabet.fingerprint() != self.alphabet_fingerprint:
            raise SchemeMismatchError(
                f"alphabet fingerprint {alphabet.fingerprint()[:12]} does not match "
                f"checkpoint {self.alphabet_fingerprint[:12]}"
            )

    def load_into(self, store: ParamStore) -> None:
        """Copy tensors into a store built for the same architecture."""
        if set(store.names()) != set(self.tensors):
            missing = sorted(set(store.names()) - set(self.tensors))
            extra = sorted(set(self.tensors) - set(store.names()))
            raise UsageError(f"checkpoint does not fit the model (missing {missing}, unexpected {extra})")
        for name, tensor in self.tensors.items():
            store.set(name, tensor)
        store.version += 1


def save_checkpoint(
    path: str,
    config: ExperimentConfig,
    store: ParamStore,
    alphabet: Alphabet,
    meta: Optional[dict[str, Any]] = None,
) -> None:
    """Write atomically (temp file, then rename)."""
    header = json.dumps({
        "config": config.to_dict(),
        "scheme": alphabet.kind,
        "alphabet_fingerprint": alphabet.fingerprint(),
        "alphabet_size": alphabet.size,
        "meta": meta or {},
    }, sort_keys=True, ensure_ascii=False).encode("utf-8")

    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_name(p.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_PREAMBLE.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(header)))
        fh.write(header)
        fh.write(_U32.pack(len(store)))
        for name, tensor in store.items():
            raw = name.encode("utf-8")
            fh.write(_U32.pack(len(raw)))
            fh.write(raw)
            fh.write(_SHAPE.pack(*tensor.shape))
            fh.write(np.ascontiguousarray(tensor, dtype="<f8").tobytes())
    os.replace(tmp, p)
    log.info("checkpoint saved: %s (%d tensors, %d parameters)", p, len(store), store.size())


class _Reader:
    def __init__(self, blob: bytes, path: str) -> None:
        self.blob = blob
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise FormatError("truncated checkpoint", path=self.path)
        out = self.blob[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, st: struct.Struct) -> tuple:
        return st.unpack(self.take(st.size))


def load_checkpoint(path: str) -> Checkpoint:
    try:
        blob = pathlib.Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read checkpoint: {exc.strerror}", path=path) from None
    r = _Reader(blob, path)
    magic, version, header_len = r.unpack(_PREAMBLE)
    if magic != CHECKPOINT_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {CHECKPOINT_MAGIC!r}", path=path)
    if version != CHECKPOINT_VERSION:
        raise FormatError(f"unsupported checkpoint version {version}", path=path)
    try:
        header = json.loads(r.take(header_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"corrupt checkpoint header: {exc}", path=path) from None

    (count,) = r.unpack(_U32)
    tensors: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = r.unpack(_U32)
        name = r.take(name_len).decode("utf-8")
        rows, cols = r.unpack(_SHAPE)
        values = np.frombuffer(r.take(8 * rows * cols), dtype="<f8").reshape(rows, cols)
        tensors[name] = values.astype(np.float64)
    if r.pos != len(blob):
        raise FormatError(f"{len(blob) - r.pos} trailing bytes after tensors", path=path)

    return Checkpoint(
        config=ExperimentConfig.from_dict(header["config"]),
        scheme=header["scheme"],
        alphabet_fingerprint=header["alphabet_fingerprint"],
        alphabet_size=int(header["alphabet_size"]),
        tensors=tensors,
        meta=header.get("meta", {}),
    )
