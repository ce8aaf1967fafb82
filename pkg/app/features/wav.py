"""RIFF/WAVE reading for corpus audio (PCM16, mono, 8000 Hz)."""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.io import wavfile

from app.constants import SAMPLE_RATE
from app.errors import FormatError, SampleRateError
from app.managers.logger import get_logger

log = get_logger(__name__)


@dataclasses.dataclass
class AudioBuffer:
    """Samples scaled into [-1, 1) plus their sample rate."""

    samples: np.ndarray
    sample_rate: int = SAMPLE_RATE
    utterance_id: str = ""

    def __len__(self) -> int:
        return int(self.samples.size)


def read_wav(path: str, expected_rate: int = SAMPLE_RATE, utterance_id: str = "") -> AudioBuffer:
    """Read a 16-bit PCM mono file and scale samples by 1/32768."""
    try:
        rate, data = wavfile.read(path)
    except (ValueError, EOFError) as exc:
        raise FormatError(f"not a readable PCM WAVE file ({exc})", path=str(path)) from exc
    if data.dtype != np.int16:
        raise FormatError(f"expected 16-bit PCM, got {data.dtype}", path=str(path))
    if data.ndim != 1:
        raise FormatError(f"expected mono audio, got {data.shape[1]} channels", path=str(path))
    if data.size == 0:
        raise FormatError("no samples", path=str(path))
    if rate != expected_rate:
        raise SampleRateError(rate, expected_rate)
    log.debug("read %d samples @ %d Hz from %s", data.size, rate, path)
    return AudioBuffer(data.astype(np.float64) / 32768.0, int(rate), utterance_id)


def write_wav(path: str, audio: AudioBuffer) -> None:
    """Write ``audio`` as PCM16 (values clipped to the int16 range)."""
    pcm = np.clip(np.round(audio.samples * 32768.0), -32768, 32767).astype(np.int16)
    wavfile.write(path, audio.sample_rate, pcm)
