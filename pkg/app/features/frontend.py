"""Log mel filterbank front end.

Pipeline (per utterance)::

    pre-emphasis (0.97) → 25 ms Hamming frames every 10 ms
      → |FFT|^2 (256 points, zero-padded) → 26 triangular mel filters (0–4000 Hz)
      → log(max(energy, 1e-10)) → subtract per-dimension mean

At 8 kHz a window is 200 samples and the shift 80, so an ``N``-sample
signal gives ``floor((N - 200) / 80) + 1`` frames.
"""

from __future__ import annotations

import functools
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import rfft
from scipy.signal import get_window, lfilter

from app.constants import ENERGY_FLOOR
from app.errors import TooShortError
from app.features.wav import AudioBuffer
from app.models import FeatureConfig, FeatureMatrix


def pre_emphasize(audio: AudioBuffer, alpha: float) -> AudioBuffer:
    """``y[0] = x[0]``, ``y[t] = x[t] - alpha * x[t-1]``."""
    y = lfilter([1.0, -alpha], [1.0], audio.samples)
    return AudioBuffer(y, audio.sample_rate, audio.utterance_id)


def frame_signal(audio: AudioBuffer, cfg: FeatureConfig) -> np.ndarray:
    """Slice into Hamming-windowed frames, shape ``(num_frames, window)``."""
    win = cfg.window_samples
    if len(audio) < win:
        raise TooShortError(
            f"{len(audio)} samples is shorter than one {win}-sample window",
            audio.utterance_id,
        )
    frames = sliding_window_view(audio.samples, win)[:: cfg.shift_samples]
    return frames * _hamming(win)


@functools.lru_cache(maxsize=8)
def _hamming(length: int) -> np.ndarray:
    return get_window("hamming", length, fftbins=False)


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel) / 2595.0) - 1.0)


@functools.lru_cache(maxsize=8)
def _mel_filterbank(num_filters: int, fft_size: int, sample_rate: int) -> np.ndarray:
    nyquist = sample_rate / 2.0
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(nyquist), num_filters + 2))
    bin_hz = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    lo, center, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (bin_hz - lo) / (center - lo)
    falling = (hi - bin_hz) / (hi - center)
    fb = np.maximum(0.0, np.minimum(rising, falling))
    fb.setflags(write=False)
    return fb


def mel_filterbank(cfg: FeatureConfig) -> np.ndarray:
    """Triangular mel filters, shape ``(num_filters, fft_size // 2 + 1)``.

    Filter ``j`` rises from edge ``j`` to a peak of 1 at edge ``j + 1`` and
    falls to 0 at edge ``j + 2``; edges are equally spaced on the mel scale
    between 0 Hz and the Nyquist frequency.
    """
    return _mel_filterbank(cfg.num_filters, cfg.fft_size, cfg.sample_rate)


def filter_centers_hz(cfg: FeatureConfig) -> np.ndarray:
    mels = np.linspace(0.0, hz_to_mel(cfg.sample_rate / 2.0), cfg.num_filters + 2)
    return mel_to_hz(mels[1:-1])


def power_spectrum(frames: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    """``|rfft(frame, fft_size)|^2 / fft_size`` for one frame or a stack."""
    return np.abs(rfft(frames, n=cfg.fft_size, axis=-1)) ** 2 / cfg.fft_size


def log_filterbank(frame: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    """Log filterbank energies of windowed frame(s); last axis → num_filters."""
    energies = power_spectrum(frame, cfg) @ mel_filterbank(cfg).T
    return np.log(np.maximum(energies, ENERGY_FLOOR))


def extract_features(
    audio: AudioBuffer,
    cfg: FeatureConfig,
    utterance_id: Optional[str] = None,
    normalize: bool = True,
) -> FeatureMatrix:
    """Full front end; the result has zero column means when ``normalize``."""
    uid = audio.utterance_id if utterance_id is None else utterance_id
    audio = AudioBuffer(audio.samples, audio.sample_rate, uid)
    frames = frame_signal(pre_emphasize(audio, cfg.pre_emphasis), cfg)
    feats = log_filterbank(frames, cfg)
    if normalize:
        feats = feats - feats.mean(axis=0, keepdims=True)
    return FeatureMatrix(feats, uid)
