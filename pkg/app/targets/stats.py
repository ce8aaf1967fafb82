"""Target-set size statistics."""

from __future__ import annotations

import dataclasses
from typing import Iterable

from app.errors import OutOfVocabularyError
from app.targets.alphabet import Alphabet
from app.targets.lexicon import Lexicon


@dataclasses.dataclass(frozen=True)
class TargetSetStats:
    unified_size: int
    reduced_size: int
    reduction_percent: float

    def __str__(self) -> str:
        return (f"unified {self.unified_size}  reduced {self.reduced_size}  "
                f"reduction {self.reduction_percent:.1f}%")


def _reduction(unified: int, reduced: int) -> float:
    if unified == 0:
        return 0.0
    return round(100.0 * (unified - reduced) / unified, 1)


def target_set_stats(unified: Alphabet, reduced: Alphabet) -> TargetSetStats:
    return TargetSetStats(unified.size, reduced.size, _reduction(unified.size, reduced.size))


def word_list_stats(words: Iterable[str], lexicon: Lexicon) -> TargetSetStats:
    """Unique character targets vs unique phone targets over a word list."""
    words = list(dict.fromkeys(words))
    oov = [w for w in words if w not in lexicon]
    if oov:
        raise OutOfVocabularyError(oov)
    chars = {ch for w in words for ch in w}
    phones = {p for w in words for p in lexicon[w]}
    return TargetSetStats(len(chars), len(phones), _reduction(len(chars), len(phones)))
