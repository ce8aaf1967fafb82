"""Utterance-length partitions of the test set."""

from __future__ import annotations

import dataclasses
from typing import Sequence

from app.constants import AVERAGE_COLUMN, OTHER_BUCKET
from app.managers.logger import get_logger
from app.metrics.edit import error_counts
from app.models import BucketSpec, EvalPair

log = get_logger(__name__)


def bucket_by_length(pairs: Sequence[EvalPair], spec: BucketSpec) -> dict[str, list[EvalPair]]:
    """Bucket name → pairs, in spec order.

    Pairs outside every range go to ``"other"`` (present only when nonempty,
    with a warning); ``"Average"`` holds every pair.
    """
    out: dict[str, list[EvalPair]] = {name: [] for name in spec.names}
    other: list[EvalPair] = []
    for p in pairs:
        name = spec.bucket_of(p.word_count)
        (out[name] if name is not None else other).append(p)
    if other:
        log.warning("%d utterance(s) outside every length bucket (e.g. %s, %d words)",
                    len(other), other[0].utterance_id, other[0].word_count)
        out[OTHER_BUCKET] = other
    out[AVERAGE_COLUMN] = list(pairs)
    return out


@dataclasses.dataclass(frozen=True)
class ScoreCell:
    errors: int
    ref_length: int
    utterances: int

    @property
    def rate(self) -> float | None:
        return 100.0 * self.errors / self.ref_length if self.ref_length else None


def score_buckets(pairs: Sequence[EvalPair], spec: BucketSpec) -> dict[str, ScoreCell]:
    """Pooled error counts per bucket (the Average cell pools every pair)."""
    cells = {}
    for name, members in bucket_by_length(pairs, spec).items():
        errors, length = error_counts(members)
        cells[name] = ScoreCell(errors, length, len(members))
    return cells
