"""Exception hierarchy shared by every module.

Each class carries the exit code the CLI returns when it escapes a
subcommand::

    Cse2eError
    ├── UsageError            (1)  API misuse
    ├── ConfigError           (1)  bad experiment configuration
    ├── DataError             (2)  invalid input data
    │   ├── FormatError
    │   ├── SampleRateError
    │   ├── TooShortError
    │   ├── UnknownSymbolError
    │   ├── OutOfVocabularyError
    │   ├── ManifestError
    │   ├── SchemeMismatchError
    │   └── CtcInfeasibleError
    └── NumericError          (3)  NaN / Inf during computation
        └── TrainingError
"""

from __future__ import annotations

from typing import Optional, Sequence

from app.constants import EXIT_DATA, EXIT_NUMERIC, EXIT_USAGE


class Cse2eError(Exception):
    """Base class for all toolkit errors."""

    exit_code = EXIT_USAGE


class UsageError(Cse2eError):
    exit_code = EXIT_USAGE


class ConfigError(Cse2eError):
    exit_code = EXIT_USAGE

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


# ---------------------------------------------------------------------------
# Data validation
# ---------------------------------------------------------------------------

class DataError(Cse2eError):
    exit_code = EXIT_DATA


class FormatError(DataError):
    def __init__(self, message: str, line: Optional[int] = None, path: str = "") -> None:
        self.line = line
        self.path = path
        where = path
        if line is not None:
            where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class SampleRateError(DataError):
    def __init__(self, actual: int, expected: int) -> None:
        self.actual = actual
        self.expected = expected
        super().__init__(f"sample rate {actual} Hz, expected {expected} Hz")


class TooShortError(DataError):
    def __init__(self, message: str, utterance_id: str = "") -> None:
        self.utterance_id = utterance_id
        super().__init__(f"{utterance_id}: {message}" if utterance_id else message)


class UnknownSymbolError(DataError):
    def __init__(self, symbol: str, word: str = "") -> None:
        self.symbol = symbol
        self.word = word
        suffix = f" in word '{word}'" if word else ""
        super().__init__(f"unknown symbol '{symbol}'{suffix}")


class OutOfVocabularyError(DataError):
    def __init__(self, words: Sequence[str]) -> None:
        self.words = list(words)
        super().__init__("out-of-vocabulary word(s): " + ", ".join(self.words))


class ManifestError(DataError):
    def __init__(self, problems: Sequence[str]) -> None:
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class SchemeMismatchError(DataError):
    pass


class CtcInfeasibleError(DataError):
    """Target cannot be aligned to the available frames (not a numeric failure)."""

    def __init__(self, frames: int, required: int) -> None:
        self.frames = frames
        self.required = required
        super().__init__(f"CTC target needs at least {required} frames, got {frames}")


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------

class NumericError(Cse2eError):
    exit_code = EXIT_NUMERIC


class TrainingError(NumericError):
    def __init__(
        self,
        message: str,
        epoch: Optional[int] = None,
        batch: Optional[int] = None,
        parameter: str = "",
    ) -> None:
        self.epoch = epoch
        self.batch = batch
        self.parameter = parameter
        where = []
        if epoch is not None:
            where.append(f"epoch {epoch}")
        if batch is not None:
            where.append(f"batch {batch}")
        if parameter:
            where.append(f"parameter '{parameter}'")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
