"""Turn manifests into (features, target labels) pairs."""

from __future__ import annotations

import dataclasses
import pathlib
from typing import Optional

from app.constants import REDUCED
from app.errors import ConfigError, DataError
from app.features import extract_features, read_features, read_wav, write_features
from app.managers.logger import get_logger
from app.managers.manifest import Manifest
from app.models import ExperimentConfig, FeatureConfig, FeatureMatrix, ManifestEntry, TargetsConfig
from app.targets import Alphabet, LabelSequence, Lexicon, load_alphabet, load_lexicon, tokenize

log = get_logger(__name__)


@dataclasses.dataclass
class Utterance:
    entry: ManifestEntry
    features: FeatureMatrix
    target: LabelSequence

    @property
    def utterance_id(self) -> str:
        return self.entry.utterance_id

    @property
    def num_frames(self) -> int:
        return self.features.num_frames


def load_targets(cfg: TargetsConfig) -> tuple[Alphabet, Optional[Lexicon]]:
    """Alphabet of the configured scheme, plus the lexicon for reduced targets."""
    path = cfg.alphabet_path()
    if not path:
        raise ConfigError(f"[targets] {cfg.scheme}_alphabet is not set")
    alphabet = load_alphabet(path, cfg.scheme, cfg.strict)
    if cfg.scheme != REDUCED:
        return alphabet, None
    if not cfg.lexicon:
        raise ConfigError("[targets] lexicon is required for the reduced scheme")
    return alphabet, load_lexicon(cfg.lexicon, alphabet)


def load_entry_features(entry: ManifestEntry, cfg: FeatureConfig,
                        cache_dir: Optional[pathlib.Path] = None) -> FeatureMatrix:
    """Read cached features, or extract them from the entry's audio.

    With ``cache_dir`` set, freshly extracted features are written there and
    the entry's ``feature_path`` is updated.
    """
    if entry.feature_path:
        feats = read_features(entry.feature_path, entry.utterance_id)
    else:
        audio = read_wav(entry.audio_path, cfg.sample_rate, entry.utterance_id)
        feats = extract_features(audio, cfg)
        if cache_dir is not None:
            path = cache_dir / f"{entry.utterance_id}.fbnk"
            write_features(path, feats)
            entry.feature_path = str(path)
    if feats.dim != cfg.num_filters:
        raise DataError(f"{entry.utterance_id}: features have {feats.dim} dims, expected {cfg.num_filters}")
    return feats


def load_utterances(
    manifest: Manifest,
    cfg: ExperimentConfig,
    alphabet: Alphabet,
    lexicon: Optional[Lexicon],
    cache_features: bool = False,
) -> list[Utterance]:
    cache_dir = manifest.base_dir / "feats" if cache_features else None
    out = []
    for entry in manifest:
        feats = load_entry_features(entry, cfg.features, cache_dir)
        out.append(Utterance(entry, feats, tokenize(entry.transcript, alphabet, lexicon)))
    log.debug("loaded %d utterances from %s", len(out), manifest.path or "<memory>")
    return out
