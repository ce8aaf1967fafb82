"""Cross-script confusion in unified-character output.

A hypothesis character counts as a cross-script error when it is inserted
or substituted inside a reference word written in a different script, e.g.
a Latin letter emitted in the middle of a Devanagari word.
"""

from __future__ import annotations

from typing import Sequence

from app.metrics.edit import INSERTION, SUBSTITUTION, align
from app.models import EvalPair
from app.targets import Alphabet


def _word_scripts(ref: Sequence[int], alphabet: Alphabet) -> list[str]:
    """Script of the word each reference position belongs to ("" for separators)."""
    sep = alphabet.separator_id
    out = [""] * len(ref)
    start = 0
    for end in range(len(ref) + 1):
        if end == len(ref) or ref[end] == sep:
            scripts = [alphabet.script_of(r) for r in ref[start:end] if alphabet.script_of(r)]
            word_script = scripts[0] if scripts else ""
            for k in range(start, end):
                out[k] = word_script
            start = end + 1
    return out


def cross_script_insertions(pairs: Sequence[EvalPair], alphabet: Alphabet) -> int:
    total = 0
    for pair in pairs:
        ref, hyp = pair.reference, pair.hypothesis
        if not ref:
            continue
        word_script = _word_scripts(ref, alphabet)
        anchor = 0           # last reference position seen, for insertions
        for op, i, j in align(ref, hyp):
            if i >= 0:
                anchor = i
            if op not in (INSERTION, SUBSTITUTION):
                continue
            emitted = alphabet.script_of(hyp[j]) if hyp[j] < alphabet.size else ""
            context = word_script[anchor]
            if emitted and context and emitted != context:
                total += 1
    return total
