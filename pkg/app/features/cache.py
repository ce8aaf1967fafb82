"""Per-utterance binary feature files.

Layout (little-endian)::

    magic "FBNK" | version u32 | T u32 | D u32 | T*D float32 values (row-major)
"""

from __future__ import annotations

import pathlib
import struct

import numpy as np

from app.constants import FEATURE_MAGIC, FEATURE_VERSION
from app.errors import FormatError
from app.models import FeatureMatrix

_HEADER = struct.Struct("<4sIII")


def write_features(path, features: FeatureMatrix) -> None:
    frames = np.asarray(features.frames)
    t, d = frames.shape
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FEATURE_MAGIC, FEATURE_VERSION, t, d))
        fh.write(frames.astype("<f4").tobytes())


def read_features(path, utterance_id: str = "") -> FeatureMatrix:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise FormatError("truncated feature header", path=str(path))
    magic, version, t, d = _HEADER.unpack_from(blob)
    if magic != FEATURE_MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {FEATURE_MAGIC!r}", path=str(path))
    if version != FEATURE_VERSION:
        raise FormatError(f"unsupported feature file version {version}", path=str(path))
    expected = _HEADER.size + 4 * t * d
    if len(blob) != expected or t < 1:
        raise FormatError(f"expected {expected} bytes for {t}x{d}, got {len(blob)}", path=str(path))
    values = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size).reshape(t, d)
    return FeatureMatrix(values.astype(np.float64), utterance_id or pathlib.Path(path).stem)
