"""Parser for INI-style experiment files.

Example::

    ; reduced-phone attention system
    [experiment]
    model = attention          ; ctc | attention
    scheme = reduced           ; unified | reduced
    name = las-reduced

    [targets]
    unified_alphabet = ../data/alphabets/unified.txt
    reduced_alphabet = ../data/alphabets/common_phones.txt
    lexicon = ../data/lexicon.tsv

    [training]
    epochs = 20

Sections: ``experiment``, ``targets``, ``features``, ``encoder``,
``attention``, ``training``, ``decoding``.  Unknown sections or keys,
duplicate keys and badly typed values are rejected with the offending line
number.  Unset keys take the experimental-setup defaults for the chosen
model kind (ctc: 4 x 256 BLSTM, 250 epochs; attention: 3 x 512 pyramidal
listener, 2 x 512 speller, 400 epochs, beam 16).  Relative paths resolve
against the config file's directory.
"""

from __future__ import annotations

import pathlib
import re
from typing import Any, Callable, Optional

from app import constants as C
from app.errors import ConfigError
from app.managers.logger import get_logger
from app.models import (
    ADDITIVE,
    ATTENTION,
    CTC,
    DOT,
    FLAT,
    DecodingConfig,
    EncoderConfig,
    ExperimentConfig,
    FeatureConfig,
    LasConfig,
    TargetsConfig,
    TrainingConfig,
)

log = get_logger(__name__)

_SECTION_RE = re.compile(r"^\[(.+)\]\s*$")
_KV_RE = re.compile(r"^([^=]+?)\s*=\s*(.*?)\s*$")

# Raw sections: name → {key → (value, line)}
Sections = dict[str, dict[str, tuple[str, int]]]


def _to_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(text)


def _choice(*options: str) -> Callable[[str], str]:
    def convert(text: str) -> str:
        if text not in options:
            raise ValueError(text)
        return text
    convert.__name__ = " | ".join(options)
    return convert


_PATH = "path"

# section → key → converter
_SCHEMA: dict[str, dict[str, Any]] = {
    "experiment": {"model": _choice(CTC, ATTENTION), "scheme": _choice(*C.SCHEMES), "name": str},
    "targets": {"unified_alphabet": _PATH, "reduced_alphabet": _PATH, "lexicon": _PATH, "strict": _to_bool},
    "features": {
        "window_ms": float, "shift_ms": float, "pre_emphasis": float,
        "num_filters": int, "fft_size": int, "sample_rate": int,
    },
    "encoder": {"layers": int, "units": int, "pyramid_step": int, "dropout": float},
    "attention": {
        "speller_layers": int, "speller_units": int, "embed_dim": int,
        "attention_dim": int, "scoring": _choice(ADDITIVE, DOT), "max_decode_len": int,
    },
    "training": {
        "epochs": int, "batch_size": int, "base_lr": float, "lr_decay": float,
        "plateau_patience": int, "noise_sigma": float, "grad_clip": float, "seed": int,
    },
    "decoding": {"beam_width": int, "widening": _to_bool},
}

# Model-kind defaults for keys shared between the two systems
_MODEL_DEFAULTS = {
    CTC: {"layers": 4, "units": 256, "epochs": C.DEFAULT_CTC_EPOCHS},
    ATTENTION: {"layers": 3, "units": 512, "epochs": C.DEFAULT_LAS_EPOCHS},
}


# ---------------------------------------------------------------------------
# File reader
# ---------------------------------------------------------------------------

def read_sections(lines: list[str]) -> Sections:
    """Split INI text into sections, keeping the line number of every key."""
    sections: Sections = {}
    current: Optional[str] = None
    for lineno, raw_line in enumerate(lines, start=1):
        line = raw_line.strip()
        if not line or line.startswith((";", "#")):
            continue

        # ── Section header ──
        m = _SECTION_RE.match(line)
        if m:
            current = m.group(1).strip().lower()
            if current not in _SCHEMA:
                raise ConfigError(f"unknown section [{current}]", lineno)
            sections.setdefault(current, {})
            continue

        # ── Key = value ──
        m = _KV_RE.match(line)
        if not m:
            raise ConfigError(f"expected 'key = value', got '{line}'", lineno)
        if current is None:
            raise ConfigError("key outside of any section", lineno)
        key = m.group(1).strip().lower()
        value = re.split(r"\s+[;#]", m.group(2), maxsplit=1)[0].strip()
        if key not in _SCHEMA[current]:
            raise ConfigError(f"unknown key '{key}' in [{current}]", lineno)
        if key in sections[current]:
            raise ConfigError(
                f"duplicate key '{key}' in [{current}] (first on line {sections[current][key][1]})",
                lineno,
            )
        sections[current][key] = (value, lineno)
    return sections


def _typed(sections: Sections, section: str, base_dir: pathlib.Path) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, (text, lineno) in sections.get(section, {}).items():
        convert = _SCHEMA[section][key]
        if convert == _PATH:
            p = pathlib.Path(text).expanduser()
            out[key] = str(p if p.is_absolute() else (base_dir / p))
            continue
        try:
            out[key] = convert(text)
        except ValueError:
            kind = getattr(convert, "__name__", "value")
            raise ConfigError(f"[{section}] {key} = '{text}' is not a valid {kind}", lineno) from None
    return out


def _section_line(sections: Sections, section: str) -> Optional[int]:
    lines = [ln for _, ln in sections.get(section, {}).values()]
    return min(lines) if lines else None


def _build(section: str, sections: Sections, factory: Callable[[], Any]) -> Any:
    """Run a dataclass constructor, attaching a line number to its ConfigError."""
    try:
        return factory()
    except ConfigError as exc:
        if exc.line is not None:
            raise
        raise ConfigError(f"[{section}] {exc}", _section_line(sections, section)) from None


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------

def parse_config_text(text: str, source: str = "<string>",
                      base_dir: Optional[pathlib.Path] = None) -> ExperimentConfig:
    base = base_dir if base_dir is not None else pathlib.Path.cwd()
    sections = read_sections(text.lstrip("\ufeff").splitlines())
    exp = _typed(sections, "experiment", base)
    model = exp.get("model", ATTENTION)
    defaults = _MODEL_DEFAULTS[model]

    targets = _build("targets", sections, lambda: TargetsConfig(
        scheme=exp.get("scheme", C.REDUCED), **_typed(sections, "targets", base)))
    features = _build("features", sections, lambda: FeatureConfig(**_typed(sections, "features", base)))

    training_kw = _typed(sections, "training", base)
    training_kw.setdefault("epochs", defaults["epochs"])
    training = _build("training", sections, lambda: TrainingConfig(**training_kw))

    enc = _typed(sections, "encoder", base)
    layers = enc.get("layers", defaults["layers"])
    units = enc.get("units", defaults["units"])
    shared = dict(
        pyramid_step=enc.get("pyramid_step", 2),
        dropout_rate=enc.get("dropout", C.DEFAULT_DROPOUT),
    )
    decoding = _build("decoding", sections, lambda: DecodingConfig(**_typed(sections, "decoding", base)))
    att = _typed(sections, "attention", base)
    attention = _build("attention", sections, lambda: LasConfig(
        listener_layers=layers if model == ATTENTION else 3,
        listener_units=units if model == ATTENTION else 512,
        beam_width=decoding.beam_width,
        widening=decoding.widening,
        input_dim=features.num_filters,
        **shared,
        **att,
    ))
    if model == ATTENTION:
        encoder = attention.listener()
    else:
        encoder = _build("encoder", sections, lambda: EncoderConfig(
            kind=FLAT, layers=layers, units_per_direction=units,
            input_dim=features.num_filters, **shared))

    cfg = ExperimentConfig(
        model=model,
        name=exp.get("name", ""),
        targets=targets,
        features=features,
        encoder=encoder,
        attention=attention,
        training=training,
        decoding=decoding,
        source_path=source,
    )
    log.debug("parsed %s: model=%s scheme=%s epochs=%d", source, model, targets.scheme, training.epochs)
    return cfg


def parse_config(path: str) -> ExperimentConfig:
    """Parse an experiment file (UTF-8, optional BOM)."""
    p = pathlib.Path(path)
    try:
        text = p.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise ConfigError(f"cannot read config '{path}': {exc.strerror}") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config '{path}' is not valid UTF-8: {exc.reason}") from None
    return parse_config_text(text, str(p), p.resolve().parent)
