"""Audio front end: 8 kHz PCM16 → 26-dim log mel filterbank energies."""

from app.features.wav import AudioBuffer, read_wav, write_wav
from app.features.frontend import (
    extract_features,
    frame_signal,
    log_filterbank,
    mel_filterbank,
    power_spectrum,
    pre_emphasize,
)
from app.features.cache import read_features, write_features

__all__ = [
    "AudioBuffer",
    "extract_features",
    "frame_signal",
    "log_filterbank",
    "mel_filterbank",
    "power_spectrum",
    "pre_emphasize",
    "read_features",
    "read_wav",
    "write_features",
    "write_wav",
]
