"""Target alphabets and label sequences.

Alphabet file format (UTF-8)::

    a	latin
    b	latin
    क	devanagari
    ...

One symbol per line; the optional second TAB-separated column tags the
symbol's script (used for cross-script error analysis).  Blank lines are
skipped.  The word separator is appended automatically as the last entry,
so a 94-character file gives the 95-entry unified alphabet and a 62-phone
file the 63-entry reduced one.

The CTC blank is *not* a symbol: its id is ``alphabet.blank_id`` (one past
the separator) and it only ever appears in CTC output layers and alignments.
"""

from __future__ import annotations

import dataclasses
import hashlib
from typing import Sequence

from app.constants import REDUCED, REDUCED_FULL_SIZE, SCHEMES, SEPARATOR, UNIFIED, UNIFIED_FULL_SIZE
from app.errors import DataError, FormatError, UsageError
from app.managers.logger import get_logger

log = get_logger(__name__)

_FULL_SIZES = {UNIFIED: UNIFIED_FULL_SIZE, REDUCED: REDUCED_FULL_SIZE}


@dataclasses.dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]           # separator is the last entry
    kind: str
    scripts: tuple[str, ...] = ()      # per symbol; "" when untagged

    def __post_init__(self) -> None:
        if self.kind not in SCHEMES:
            raise UsageError(f"alphabet kind must be one of {SCHEMES}, got '{self.kind}'")
        if len(set(self.symbols)) != len(self.symbols):
            raise UsageError("alphabet symbols must be unique")
        if not self.symbols or self.symbols[-1] != SEPARATOR or self.symbols.count(SEPARATOR) != 1:
            raise UsageError("alphabet must end with exactly one separator")
        if not self.scripts:
            object.__setattr__(self, "scripts", ("",) * len(self.symbols))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.symbols)})

    @classmethod
    def build(cls, symbols: Sequence[str], kind: str, scripts: Sequence[str] = ()) -> "Alphabet":
        """Alphabet from bare symbols (separator appended)."""
        scr = tuple(scripts) + ("",) if scripts else ()
        return cls(tuple(symbols) + (SEPARATOR,), kind, scr)

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def separator_id(self) -> int:
        return len(self.symbols) - 1

    @property
    def blank_id(self) -> int:
        """Index of the CTC blank in a ``size + 1`` output layer."""
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]  # type: ignore[attr-defined]
        except KeyError:
            raise KeyError(symbol) from None

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._index  # type: ignore[attr-defined]

    def symbol(self, idx: int) -> str:
        return self.symbols[idx]

    def script_of(self, idx: int) -> str:
        return self.scripts[idx]

    def fingerprint(self) -> str:
        """SHA-256 over kind and symbols; stored in checkpoints."""
        h = hashlib.sha256(self.kind.encode("utf-8"))
        for s in self.symbols:
            h.update(b"\x00" + s.encode("utf-8"))
        return h.hexdigest()


def load_alphabet(path: str, kind: str, strict: bool = False) -> Alphabet:
    """Load an alphabet file; ``strict`` enforces the full 95 / 63 sizes."""
    if kind not in SCHEMES:
        raise UsageError(f"alphabet kind must be one of {SCHEMES}, got '{kind}'")
    symbols: list[str] = []
    scripts: list[str] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8-sig") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            symbol, _, script = line.partition("\t")
            symbol = symbol.strip()
            if symbol == SEPARATOR:
                raise FormatError(f"'{SEPARATOR}' is reserved for the word separator", lineno, path)
            if symbol in seen:
                raise FormatError(
                    f"duplicate symbol '{symbol}' (first on line {seen[symbol]})", lineno, path
                )
            seen[symbol] = lineno
            symbols.append(symbol)
            scripts.append(script.strip())
    if not symbols:
        raise FormatError("alphabet file is empty", path=path)

    alphabet = Alphabet.build(symbols, kind, scripts)
    if strict and alphabet.size != _FULL_SIZES[kind]:
        raise FormatError(
            f"{kind} alphabet has {alphabet.size} entries, expected {_FULL_SIZES[kind]}",
            path=path,
        )
    log.debug("loaded %s alphabet of %d entries from %s", kind, alphabet.size, path)
    return alphabet


@dataclasses.dataclass(frozen=True)
class LabelSequence:
    """Target ids of one transcript under a scheme."""

    ids: tuple[int, ...]
    scheme: str

    def __len__(self) -> int:
        return len(self.ids)

    def validate(self, alphabet: Alphabet) -> "LabelSequence":
        """Check the transcript invariants; return self."""
        if not self.ids:
            raise DataError("empty label sequence")
        sep = alphabet.separator_id
        for i in self.ids:
            if not 0 <= i < alphabet.size:
                raise DataError(f"label id {i} outside alphabet of size {alphabet.size}")
        if self.ids[0] == sep or self.ids[-1] == sep:
            raise DataError("label sequence starts or ends with a separator")
        if any(a == b == sep for a, b in zip(self.ids, self.ids[1:])):
            raise DataError("label sequence contains a doubled separator")
        return self
