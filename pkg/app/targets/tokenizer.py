"""Unified (character) and reduced (common-phone) tokenization.

    >>> tokenize_unified(["go", "home"], unified).ids     # g o _ h o m e
    >>> tokenize_reduced(["go", "home"], lexicon, reduced).ids  # g oo _ h oo m

Both schemes insert the separator id between consecutive words and never
at either end.
"""

from __future__ import annotations

from typing import Sequence

from app.constants import REDUCED, SEPARATOR, UNIFIED
from app.errors import DataError, OutOfVocabularyError, UnknownSymbolError, UsageError
from app.targets.alphabet import Alphabet, LabelSequence
from app.targets.lexicon import Lexicon


def tokenize_unified(sentence: Sequence[str], alphabet: Alphabet) -> LabelSequence:
    if not sentence:
        raise DataError("cannot tokenize an empty sentence")
    ids: list[int] = []
    for n, word in enumerate(sentence):
        if n:
            ids.append(alphabet.separator_id)
        for ch in word:
            if ch == SEPARATOR or ch not in alphabet:
                raise UnknownSymbolError(ch, word)
            ids.append(alphabet.index(ch))
    return LabelSequence(tuple(ids), UNIFIED).validate(alphabet)


def tokenize_reduced(sentence: Sequence[str], lexicon: Lexicon, alphabet: Alphabet) -> LabelSequence:
    if not sentence:
        raise DataError("cannot tokenize an empty sentence")
    oov = [w for w in dict.fromkeys(sentence) if w not in lexicon]
    if oov:
        raise OutOfVocabularyError(oov)
    ids: list[int] = []
    for n, word in enumerate(sentence):
        if n:
            ids.append(alphabet.separator_id)
        for phone in lexicon[word]:
            if phone not in alphabet:
                raise UnknownSymbolError(phone, word)
            ids.append(alphabet.index(phone))
    return LabelSequence(tuple(ids), REDUCED).validate(alphabet)


def tokenize(sentence: Sequence[str], alphabet: Alphabet, lexicon: Lexicon | None = None) -> LabelSequence:
    """Tokenize under the alphabet's own scheme."""
    if alphabet.kind == UNIFIED:
        return tokenize_unified(sentence, alphabet)
    if lexicon is None:
        raise UsageError("the reduced scheme needs a lexicon")
    return tokenize_reduced(sentence, lexicon, alphabet)


def _groups(ids: Sequence[int], alphabet: Alphabet) -> list[list[str]]:
    words: list[list[str]] = [[]]
    for i in ids:
        if i == alphabet.separator_id:
            words.append([])
        else:
            words[-1].append(alphabet.symbol(i))
    return [w for w in words if w]


def detokenize(labels: LabelSequence | Sequence[int], alphabet: Alphabet, joiner: str = "") -> list[str]:
    """Split on the separator and join each word's token strings.

    Inverse of :func:`tokenize_unified`; empty words (from decoded output
    with stray separators) are dropped.
    """
    ids = labels.ids if isinstance(labels, LabelSequence) else labels
    return [joiner.join(w) for w in _groups(ids, alphabet)]


def render(labels: LabelSequence | Sequence[int], alphabet: Alphabet) -> str:
    """Decoded-output table style: ``ghar _ jaa`` for phones, ``घर_go`` for characters."""
    ids = labels.ids if isinstance(labels, LabelSequence) else labels
    if alphabet.kind == UNIFIED:
        return "".join(alphabet.symbol(i) for i in ids)
    return " ".join(alphabet.symbol(i) for i in ids)


def ids_from_tokens(tokens: Sequence[str], alphabet: Alphabet) -> tuple[int, ...]:
    """Map decoded token strings back to ids (hypothesis files store tokens)."""
    try:
        return tuple(alphabet.index(t) for t in tokens)
    except KeyError as exc:
        raise UnknownSymbolError(str(exc.args[0])) from None
