"""Data models for CodeSwitch-E2E.

Classes
-------
NoiseConfig
    Training-time Gaussian feature noise (sigma, seed).

FeatureConfig
    Front-end parameters: 25 ms window, 10 ms shift, 0.97 pre-emphasis,
    26 mel filters, FFT size and the expected sample rate.

EncoderConfig
    Recurrent encoder stack: ``flat`` (DBLSTM for CTC) or ``pyramidal``
    (listener), number of layers, units per direction, pyramid step and
    dropout rate.

LasConfig
    Listen-attend-spell model: listener shape, speller shape, embedding and
    attention sizes, scoring kind, beam width and decode length limit.

TrainingConfig / DecodingConfig / TargetsConfig / ExperimentConfig
    The parsed experiment file (see :mod:`app.managers.config`).

SynthSpec
    Parameters of the seeded synthetic corpus generator.

ManifestEntry, Hypothesis, EvalPair, BucketSpec
    Corpus, decoding and scoring records.

Every config class provides ``to_dict()`` / ``from_dict()`` for the JSON
block embedded in checkpoints.
"""

from __future__ import annotations

import dataclasses
import math
from typing import TYPE_CHECKING, Optional

from app import constants as C
from app.errors import ConfigError

if TYPE_CHECKING:
    import numpy


class _DictMixin:
    """``to_dict()`` / ``from_dict()`` helpers shared by the dataclasses."""

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)  # type: ignore[arg-type]

    @classmethod
    def from_dict(cls, d: dict):
        valid = {f.name for f in dataclasses.fields(cls)}  # type: ignore[arg-type]
        return cls(**{k: v for k, v in d.items() if k in valid})


# ---------------------------------------------------------------------------
# Numerics / features
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class NoiseConfig(_DictMixin):
    """Additive Gaussian feature noise applied in training mode."""

    sigma: float = C.DEFAULT_NOISE_SIGMA
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ConfigError(f"noise sigma must be >= 0, got {self.sigma}")


@dataclasses.dataclass
class FeatureConfig(_DictMixin):
    window_ms: float = C.DEFAULT_WINDOW_MS
    shift_ms: float = C.DEFAULT_SHIFT_MS
    pre_emphasis: float = C.DEFAULT_PRE_EMPHASIS
    num_filters: int = C.DEFAULT_NUM_FILTERS
    fft_size: int = 256
    sample_rate: int = C.SAMPLE_RATE

    def __post_init__(self) -> None:
        if not self.window_ms > self.shift_ms > 0:
            raise ConfigError("window_ms > shift_ms > 0 is required")
        if not 0 <= self.pre_emphasis < 1:
            raise ConfigError(f"pre_emphasis must be in [0, 1), got {self.pre_emphasis}")
        if self.num_filters < 1:
            raise ConfigError("num_filters must be >= 1")
        if self.fft_size & (self.fft_size - 1) or self.fft_size < self.window_samples:
            raise ConfigError(
                f"fft_size must be a power of two >= {self.window_samples}, got {self.fft_size}"
            )

    @property
    def window_samples(self) -> int:
        return int(round(self.window_ms * self.sample_rate / 1000))

    @property
    def shift_samples(self) -> int:
        return int(round(self.shift_ms * self.sample_rate / 1000))


# ---------------------------------------------------------------------------
# Models
# ---------------------------------------------------------------------------

FLAT = "flat"
PYRAMIDAL = "pyramidal"


@dataclasses.dataclass
class EncoderConfig(_DictMixin):
    """Recurrent encoder stack.

    ``units_per_direction`` is the hidden size of each LSTM direction, so a
    layer emits ``2 * units_per_direction`` values per frame.
    """

    kind: str = FLAT                 # flat | pyramidal
    layers: int = 4
    units_per_direction: int = 256
    pyramid_step: int = 2
    dropout_rate: float = C.DEFAULT_DROPOUT
    input_dim: int = C.DEFAULT_NUM_FILTERS

    def __post_init__(self) -> None:
        if self.kind not in (FLAT, PYRAMIDAL):
            raise ConfigError(f"encoder kind must be flat or pyramidal, got '{self.kind}'")
        if self.layers < 1:
            raise ConfigError("encoder layers must be >= 1")
        if self.pyramid_step < 1:
            raise ConfigError("pyramid_step must be >= 1")
        if not 0 <= self.dropout_rate < 1:
            raise ConfigError(f"dropout rate must be in [0, 1), got {self.dropout_rate}")

    @property
    def output_dim(self) -> int:
        return 2 * self.units_per_direction

    def reduced_length(self, frames: int) -> int:
        """Encoder output length for ``frames`` input frames."""
        if self.kind == FLAT:
            return frames
        for _ in range(self.layers):
            frames = math.ceil(frames / self.pyramid_step)
        return frames


ADDITIVE = "additive"
DOT = "dot"


@dataclasses.dataclass
class LasConfig(_DictMixin):
    listener_layers: int = 3
    listener_units: int = 512
    pyramid_step: int = 2
    speller_layers: int = 2
    speller_units: int = 512
    embed_dim: int = C.DEFAULT_EMBED_DIM
    attention_dim: int = 128
    scoring: str = ADDITIVE          # additive | dot
    beam_width: int = C.DEFAULT_BEAM_WIDTH
    max_decode_len: int = 0          # 0 = 2 * encoder length + 10
    dropout_rate: float = C.DEFAULT_DROPOUT
    widening: bool = True
    input_dim: int = C.DEFAULT_NUM_FILTERS

    def __post_init__(self) -> None:
        if self.beam_width < 1:
            raise ConfigError("beam_width must be >= 1")
        if self.max_decode_len < 0:
            raise ConfigError("max_decode_len must be >= 1 (or 0 for automatic)")
        if self.speller_layers < 1:
            raise ConfigError("speller_layers must be >= 1")
        if self.scoring not in (ADDITIVE, DOT):
            raise ConfigError(f"attention scoring must be additive or dot, got '{self.scoring}'")
        if not 0 <= self.dropout_rate < 1:
            raise ConfigError(f"dropout rate must be in [0, 1), got {self.dropout_rate}")

    def listener(self) -> EncoderConfig:
        return EncoderConfig(
            kind=PYRAMIDAL,
            layers=self.listener_layers,
            units_per_direction=self.listener_units,
            pyramid_step=self.pyramid_step,
            dropout_rate=self.dropout_rate,
            input_dim=self.input_dim,
        )

    def decode_limit(self, encoder_frames: int) -> int:
        if self.max_decode_len:
            return self.max_decode_len
        return 2 * encoder_frames + 10


# ---------------------------------------------------------------------------
# Experiment file
# ---------------------------------------------------------------------------

CTC = "ctc"
ATTENTION = "attention"


@dataclasses.dataclass
class TrainingConfig(_DictMixin):
    epochs: int = C.DEFAULT_LAS_EPOCHS
    batch_size: int = C.DEFAULT_BATCH_SIZE
    base_lr: float = C.DEFAULT_BASE_LR
    lr_decay: float = C.DEFAULT_LR_DECAY
    plateau_patience: int = C.DEFAULT_PLATEAU_PATIENCE
    noise_sigma: float = C.DEFAULT_NOISE_SIGMA
    grad_clip: float = C.DEFAULT_GRAD_CLIP
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.base_lr <= 0:
            raise ConfigError("base_lr must be > 0")
        if not 0 < self.lr_decay <= 1:
            raise ConfigError("lr_decay must be in (0, 1]")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")


@dataclasses.dataclass
class DecodingConfig(_DictMixin):
    beam_width: int = C.DEFAULT_BEAM_WIDTH
    widening: bool = True

    def __post_init__(self) -> None:
        if self.beam_width < 1:
            raise ConfigError("beam_width must be >= 1")


@dataclasses.dataclass
class TargetsConfig(_DictMixin):
    scheme: str = C.REDUCED
    unified_alphabet: str = ""
    reduced_alphabet: str = ""
    lexicon: str = ""
    strict: bool = False

    def alphabet_path(self) -> str:
        return self.unified_alphabet if self.scheme == C.UNIFIED else self.reduced_alphabet


@dataclasses.dataclass
class ExperimentConfig:
    """A fully-resolved experiment file."""

    model: str = ATTENTION                     # ctc | attention
    name: str = ""
    targets: TargetsConfig = dataclasses.field(default_factory=TargetsConfig)
    features: FeatureConfig = dataclasses.field(default_factory=FeatureConfig)
    encoder: EncoderConfig = dataclasses.field(default_factory=EncoderConfig)
    attention: LasConfig = dataclasses.field(default_factory=LasConfig)
    training: TrainingConfig = dataclasses.field(default_factory=TrainingConfig)
    decoding: DecodingConfig = dataclasses.field(default_factory=DecodingConfig)
    source_path: str = ""

    @property
    def label(self) -> str:
        """Row name in result tables; systems differing only in scheme share it."""
        return self.name or self.model

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("source_path", None)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        return cls(
            model=d.get("model", ATTENTION),
            name=d.get("name", ""),
            targets=TargetsConfig.from_dict(d.get("targets", {})),
            features=FeatureConfig.from_dict(d.get("features", {})),
            encoder=EncoderConfig.from_dict(d.get("encoder", {})),
            attention=LasConfig.from_dict(d.get("attention", {})),
            training=TrainingConfig.from_dict(d.get("training", {})),
            decoding=DecodingConfig.from_dict(d.get("decoding", {})),
        )


# ---------------------------------------------------------------------------
# Synthetic corpus
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class SynthSpec(_DictMixin):
    """Seeded synthetic code-switching corpus.

    Half the vocabulary is "latin" script and half "devanagari"; every word
    has a random pronunciation over ``num_phones`` shared phones, so both
    target schemes are trainable on the same audio.
    """

    vocab_size: int = 8
    num_phones: int = 10
    num_utterances: int = 200
    words_per_utterance: tuple[int, int] = (3, 6)
    phones_per_word: tuple[int, int] = (2, 4)
    frames_per_token: tuple[int, int] = (3, 8)
    pause_frames: tuple[int, int] = (1, 3)
    template_gain: float = 4.0
    noise_sigma: float = 0.3
    num_filters: int = C.DEFAULT_NUM_FILTERS
    seed: int = 0

    def __post_init__(self) -> None:
        if self.vocab_size < 2:
            raise ConfigError("vocab_size must be >= 2")
        if not 2 <= self.num_phones <= min(self.num_filters, C.SYNTH_MAX_PHONES):
            raise ConfigError(f"num_phones must be in [2, min(num_filters, {C.SYNTH_MAX_PHONES})]")
        for name in ("words_per_utterance", "phones_per_word", "frames_per_token", "pause_frames"):
            lo, hi = getattr(self, name)
            if lo < 0 or hi < lo:
                raise ConfigError(f"{name} must be an ordered non-negative range")
        if self.frames_per_token[0] < 1 or self.words_per_utterance[0] < 1:
            raise ConfigError("frames_per_token and words_per_utterance must start at >= 1")
        # each script holds half the vocabulary, rounded up for Latin
        if (self.vocab_size + 1) // 2 > self.spellings_per_script():
            raise ConfigError(
                f"vocab_size {self.vocab_size} needs more distinct words than "
                f"{self.num_phones} phones and phones_per_word {self.phones_per_word} allow")

    def spellings_per_script(self) -> int:
        lo, hi = self.phones_per_word
        return sum(self.num_phones ** k for k in range(max(lo, 1), hi + 1))

    @classmethod
    def from_dict(cls, d: dict) -> "SynthSpec":
        valid = {f.name for f in dataclasses.fields(cls)}
        kw = {k: (tuple(v) if isinstance(v, list) else v) for k, v in d.items() if k in valid}
        return cls(**kw)


# ---------------------------------------------------------------------------
# Corpus / decoding / scoring records
# ---------------------------------------------------------------------------

@dataclasses.dataclass
class ManifestEntry(_DictMixin):
    utterance_id: str
    transcript: list[str]
    word_count: int
    audio_path: str = ""
    feature_path: str = ""

    def to_json(self) -> dict:
        d = {
            "utterance_id": self.utterance_id,
            "transcript": " ".join(self.transcript),
            "word_count": self.word_count,
        }
        if self.audio_path:
            d["audio_path"] = self.audio_path
        if self.feature_path:
            d["feature_path"] = self.feature_path
        return d


@dataclasses.dataclass
class Hypothesis:
    """Decoded label ids (no start/end tokens) and accumulated log-score."""

    ids: tuple[int, ...]
    log_score: float
    truncated: bool = False

    def sort_key(self) -> tuple:
        # best score first, then shorter, then lexicographic ids
        return (-self.log_score, len(self.ids), self.ids)


@dataclasses.dataclass
class EvalPair:
    utterance_id: str
    reference: list[int]
    hypothesis: list[int]
    word_count: int


@dataclasses.dataclass
class BucketSpec:
    """Inclusive word-count ranges, each mapped to a named test partition."""

    ranges: tuple[tuple[int, int, str], ...] = C.DEFAULT_BUCKETS

    def __post_init__(self) -> None:
        ordered = sorted(self.ranges)
        for lo, hi, name in ordered:
            if hi < lo:
                raise ConfigError(f"bucket '{name}' has max < min")
        for (lo1, hi1, n1), (lo2, hi2, n2) in zip(ordered, ordered[1:]):
            if lo2 <= hi1:
                raise ConfigError(f"buckets '{n1}' and '{n2}' overlap")
        self.ranges = tuple(ordered)

    @property
    def names(self) -> list[str]:
        return [name for _, _, name in self.ranges]

    def bucket_of(self, word_count: int) -> Optional[str]:
        for lo, hi, name in self.ranges:
            if lo <= word_count <= hi:
                return name
        return None

    @classmethod
    def parse(cls, text: str) -> "BucketSpec":
        """Parse ``"3-15:Test1,16-25:Test2"``."""
        ranges = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            try:
                span, name = part.split(":", 1)
                lo, hi = (int(x) for x in span.split("-", 1))
            except ValueError as exc:
                raise ConfigError(f"bad bucket '{part}', expected MIN-MAX:NAME") from exc
            ranges.append((lo, hi, name.strip()))
        if not ranges:
            raise ConfigError("empty bucket specification")
        return cls(tuple(ranges))


@dataclasses.dataclass
class FeatureMatrix:
    """Per-utterance ``T x D`` grid of log filterbank energies (64-bit)."""

    frames: "numpy.ndarray"
    utterance_id: str = ""

    @property
    def num_frames(self) -> int:
        return int(self.frames.shape[0])

    @property
    def dim(self) -> int:
        return int(self.frames.shape[1])
