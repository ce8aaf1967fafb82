"""Pronunciation lexicon: word (either script) → common-phone sequence.

File format (UTF-8 TSV)::

    go	g oo
    home	h oo m
    घर	gh ax r

Each pronunciation must use phones of the reduced alphabet.  When a word
appears twice the last line wins and a warning is logged.
"""

from __future__ import annotations

import dataclasses
from typing import Iterable, Iterator, Mapping, Optional

from app.errors import FormatError
from app.managers.logger import get_logger
from app.targets.alphabet import Alphabet

log = get_logger(__name__)


@dataclasses.dataclass
class Lexicon:
    entries: dict[str, tuple[str, ...]]
    duplicates: int = 0

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[str]:
        return iter(self.entries)

    def get(self, word: str) -> Optional[tuple[str, ...]]:
        return self.entries.get(word)

    def __getitem__(self, word: str) -> tuple[str, ...]:
        return self.entries[word]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Iterable[str]]) -> "Lexicon":
        return cls({w: tuple(p) for w, p in mapping.items()})

    def validate(self, alphabet: Alphabet) -> None:
        for word, phones in self.entries.items():
            if not phones:
                raise FormatError(f"empty pronunciation for '{word}'")
            for p in phones:
                if p not in alphabet or p == alphabet.symbol(alphabet.separator_id):
                    raise FormatError(f"unknown phone '{p}' in pronunciation of '{word}'")


def load_lexicon(path: str, alphabet: Alphabet) -> Lexicon:
    entries: dict[str, tuple[str, ...]] = {}
    first_seen: dict[str, int] = {}
    duplicates = 0
    sep = alphabet.symbol(alphabet.separator_id)

    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            word, tab, pron = line.partition("\t")
            word = word.strip()
            if not tab or not word:
                raise FormatError("expected 'word<TAB>phones'", lineno, path)
            phones = tuple(pron.split())
            if not phones:
                raise FormatError(f"empty pronunciation for '{word}'", lineno, path)
            for p in phones:
                if p not in alphabet or p == sep:
                    raise FormatError(
                        f"unknown phone '{p}' in pronunciation of '{word}'", lineno, path
                    )
            if word in entries:
                duplicates += 1
                log.warning(
                    "%s:%d: duplicate lexicon word '%s' (first on line %d); last entry wins",
                    path, lineno, word, first_seen[word],
                )
            else:
                first_seen[word] = lineno
            entries[word] = phones

    if duplicates:
        log.warning("%s: %d duplicate lexicon word(s) replaced", path, duplicates)
    log.debug("loaded lexicon of %d words from %s", len(entries), path)
    return Lexicon(entries, duplicates)
