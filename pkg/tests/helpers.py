"""Shared builders for the test suite.

Importing this module first points the toolkit's data directory (log files)
at a throwaway location.
"""

import os
import tempfile

os.environ.setdefault("CSE2E_HOME", tempfile.mkdtemp(prefix="cse2e-test-"))

import numpy as np  # noqa: E402

from app.constants import REDUCED, UNIFIED  # noqa: E402
from app.targets import Alphabet, Lexicon  # noqa: E402


def unified_alphabet() -> Alphabet:
    """a b c (latin) + क ख (devanagari) + separator."""
    return Alphabet.build(["a", "b", "c", "क", "ख"], UNIFIED,
                          ["latin", "latin", "latin", "devanagari", "devanagari"])


def reduced_alphabet() -> Alphabet:
    """Phones k aa g + separator."""
    return Alphabet.build(["k", "aa", "g"], REDUCED)


def small_lexicon() -> Lexicon:
    return Lexicon.from_mapping({
        "ab": ["k", "aa"],
        "ca": ["g", "aa"],
        "कख": ["k", "aa", "g"],
    })


def write_text(path, text: str) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return str(path)


def chain_log_probs(ids, num_outputs: int, frames_per_label: int = 2, sharpness: float = 8.0) -> np.ndarray:
    """Per-frame log-distributions that peak on ``ids`` in order, each label
    held for ``frames_per_label`` frames (a deterministic "chain" emitter)."""
    rows = []
    for k in ids:
        for _ in range(frames_per_label):
            logits = np.zeros(num_outputs)
            logits[k] = sharpness
            rows.append(logits - np.log(np.sum(np.exp(logits))))
    return np.array(rows)


def random_log_probs(rng: np.random.Generator, frames: int, outputs: int) -> np.ndarray:
    logits = rng.normal(size=(frames, outputs))
    return logits - np.log(np.sum(np.exp(logits), axis=1, keepdims=True))
