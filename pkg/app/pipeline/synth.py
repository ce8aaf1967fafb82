"""Seeded synthetic code-switching corpus.

Every phone owns a contiguous band of filterbank channels; a frame of that
phone has ``template_gain`` in its band and 0 elsewhere.  Words are random
phone strings, spelt either in Latin or in Devanagari (one grapheme per
phone and script), so the same audio can be trained with unified character
targets or with reduced phone targets.  Between words the signal drops to a
silent pause of ``pause_frames`` frames.  Gaussian noise is added last.

Output layout::

    out_dir/
        feats/utt00000.fbnk ...       feature cache files
        train.jsonl dev.jsonl test.jsonl   (70 / 10 / 20 split)
        unified.txt                   graphemes with script tags
        reduced.txt                   phones
        lexicon.tsv                   word -> phones, both scripts
        synth.json                    the generating SynthSpec
"""

from __future__ import annotations

import dataclasses
import json
import pathlib
import string

import numpy as np

from app.constants import REDUCED, UNIFIED
from app.features import write_features
from app.managers.logger import get_logger
from app.managers.manifest import Manifest, save_manifest
from app.models import FeatureMatrix, ManifestEntry, SynthSpec
from app.targets import Alphabet, Lexicon

log = get_logger(__name__)

PHONE_NAMES = (
    "aa", "ii", "uu", "ee", "oo", "k", "g", "ch", "j", "t", "d", "n", "p",
    "b", "m", "y", "r", "l", "v", "sh", "s", "h", "kh", "gh", "th", "dh",
)
LATIN = string.ascii_lowercase
DEVANAGARI = tuple(chr(c) for c in range(0x0915, 0x0915 + 26))    # क .. ब, ...
LATIN_SCRIPT = "latin"
DEVANAGARI_SCRIPT = "devanagari"


@dataclasses.dataclass
class SynthCorpus:
    train: Manifest
    dev: Manifest
    test: Manifest
    unified: Alphabet
    reduced: Alphabet
    lexicon: Lexicon
    templates: np.ndarray             # num_phones x num_filters
    out_dir: pathlib.Path


def phone_templates(spec: SynthSpec) -> np.ndarray:
    """Non-overlapping band templates, one row per phone."""
    width = spec.num_filters // spec.num_phones
    templates = np.zeros((spec.num_phones, spec.num_filters))
    for i in range(spec.num_phones):
        templates[i, i * width:(i + 1) * width] = spec.template_gain
    return templates


def _vocabulary(spec: SynthSpec, rng: np.random.Generator) -> list[tuple[str, tuple[int, ...]]]:
    """``vocab_size`` distinct (spelling, phone ids); even indices Latin, odd Devanagari."""
    words: list[tuple[str, tuple[int, ...]]] = []
    seen: set[str] = set()
    lo, hi = spec.phones_per_word
    while len(words) < spec.vocab_size:
        phones = tuple(int(p) for p in rng.integers(0, spec.num_phones, size=int(rng.integers(lo, hi + 1))))
        graphemes = LATIN if len(words) % 2 == 0 else DEVANAGARI
        spelling = "".join(graphemes[p] for p in phones)
        if spelling in seen or not phones:
            continue
        seen.add(spelling)
        words.append((spelling, phones))
    return words


def _utterance(spec: SynthSpec, rng: np.random.Generator, vocab, templates: np.ndarray
               ) -> tuple[list[str], np.ndarray]:
    n_words = int(rng.integers(spec.words_per_utterance[0], spec.words_per_utterance[1] + 1))
    picks = rng.integers(0, len(vocab), size=n_words)
    frames: list[np.ndarray] = []
    words: list[str] = []
    for n, k in enumerate(picks):
        spelling, phones = vocab[int(k)]
        words.append(spelling)
        if n:
            pause = int(rng.integers(spec.pause_frames[0], spec.pause_frames[1] + 1))
            frames.extend(np.zeros(spec.num_filters) for _ in range(pause))
        for p in phones:
            dur = int(rng.integers(spec.frames_per_token[0], spec.frames_per_token[1] + 1))
            frames.extend(templates[p] for _ in range(dur))
    clean = np.stack(frames)
    return words, clean + rng.normal(0.0, spec.noise_sigma, size=clean.shape)


def generate_synthetic_corpus(spec: SynthSpec, out_dir: str) -> SynthCorpus:
    """Write a corpus under ``out_dir``; identical bytes for identical specs."""
    out = pathlib.Path(out_dir)
    (out / "feats").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)
    templates = phone_templates(spec)
    vocab = _vocabulary(spec, rng)

    phones = PHONE_NAMES[:spec.num_phones]
    reduced = Alphabet.build(phones, REDUCED)
    used = sorted({p for _, pron in vocab for p in pron})
    unified = Alphabet.build(
        [LATIN[p] for p in range(spec.num_phones)] + [DEVANAGARI[p] for p in range(spec.num_phones)],
        UNIFIED,
        [LATIN_SCRIPT] * spec.num_phones + [DEVANAGARI_SCRIPT] * spec.num_phones,
    )
    lexicon = Lexicon.from_mapping({w: [phones[p] for p in pron] for w, pron in vocab})
    log.debug("synthetic vocabulary uses %d of %d phones", len(used), spec.num_phones)

    entries: list[ManifestEntry] = []
    for n in range(spec.num_utterances):
        uid = f"utt{n:05d}"
        words, frames = _utterance(spec, rng, vocab, templates)
        feat_path = out / "feats" / f"{uid}.fbnk"
        write_features(feat_path, FeatureMatrix(frames, uid))
        entries.append(ManifestEntry(uid, words, len(words), feature_path=str(feat_path)))

    n_train = spec.num_utterances * 7 // 10
    n_dev = spec.num_utterances // 10
    splits = {
        "train": entries[:n_train],
        "dev": entries[n_train:n_train + n_dev],
        "test": entries[n_train + n_dev:],
    }
    for name, part in splits.items():
        save_manifest(str(out / f"{name}.jsonl"), part)

    _write_alphabet(out / "unified.txt", unified)
    _write_alphabet(out / "reduced.txt", reduced)
    with open(out / "lexicon.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for word, _ in vocab:
            fh.write(f"{word}\t{' '.join(lexicon[word])}\n")
    with open(out / "synth.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    log.info("synthetic corpus: %d utterances (%d/%d/%d) in %s",
             spec.num_utterances, len(splits["train"]), len(splits["dev"]), len(splits["test"]), out)
    return SynthCorpus(
        Manifest(splits["train"], str(out / "train.jsonl")),
        Manifest(splits["dev"], str(out / "dev.jsonl")),
        Manifest(splits["test"], str(out / "test.jsonl")),
        unified, reduced, lexicon, templates, out,
    )


def _write_alphabet(path: pathlib.Path, alphabet: Alphabet) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in range(alphabet.separator_id):
            script = alphabet.script_of(i)
            fh.write(f"{alphabet.symbol(i)}\t{script}\n" if script else f"{alphabet.symbol(i)}\n")
