"""Target inventories: unified characters vs reduced common phones."""

from app.targets.alphabet import Alphabet, LabelSequence, load_alphabet
from app.targets.lexicon import Lexicon, load_lexicon
from app.targets.tokenizer import (
    detokenize,
    ids_from_tokens,
    render,
    tokenize,
    tokenize_reduced,
    tokenize_unified,
)
from app.targets.stats import TargetSetStats, target_set_stats, word_list_stats

__all__ = [
    "Alphabet",
    "LabelSequence",
    "Lexicon",
    "TargetSetStats",
    "detokenize",
    "ids_from_tokens",
    "load_alphabet",
    "load_lexicon",
    "render",
    "target_set_stats",
    "tokenize",
    "tokenize_reduced",
    "tokenize_unified",
    "word_list_stats",
]
