"""Target-set size statistics for the configured inventories."""

from __future__ import annotations

from typing import Optional

from app.constants import REDUCED, UNIFIED
from app.errors import ConfigError
from app.managers.logger import get_logger
from app.models import TargetsConfig
from app.targets import TargetSetStats, load_alphabet, load_lexicon, target_set_stats, word_list_stats

log = get_logger(__name__)


def _read_words(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [w for line in fh for w in line.split()]


def cmd_stats(targets: TargetsConfig, words_path: Optional[str] = None) -> TargetSetStats:
    """Alphabet sizes of both schemes, or unique targets over a word list."""
    if not (targets.unified_alphabet and targets.reduced_alphabet):
        raise ConfigError("[targets] needs both unified_alphabet and reduced_alphabet")
    unified = load_alphabet(targets.unified_alphabet, UNIFIED, targets.strict)
    reduced = load_alphabet(targets.reduced_alphabet, REDUCED, targets.strict)
    if words_path is None:
        stats = target_set_stats(unified, reduced)
    else:
        if not targets.lexicon:
            raise ConfigError("[targets] lexicon is needed for word-list statistics")
        stats = word_list_stats(_read_words(words_path), load_lexicon(targets.lexicon, reduced))
    log.info("%s", stats)
    return stats
