"""Levenshtein distance, alignment and corpus-level error rates.

PER (reduced targets) and CER (unified targets) are both::

    100 * sum(edit_distance(ref, hyp)) / sum(len(ref))

pooled over the corpus.  Separator tokens are scored like any other label.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from app.constants import UNIFIED
from app.errors import UsageError
from app.models import EvalPair

MATCH = "match"
SUBSTITUTION = "sub"
INSERTION = "ins"
DELETION = "del"


def metric_name(scheme: str) -> str:
    return "CER" if scheme == UNIFIED else "PER"


def edit_distance(a: Sequence, b: Sequence) -> int:
    """Minimum number of unit-cost insertions, deletions and substitutions."""
    if len(a) < len(b):
        a, b = b, a
    row = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        prev_diag, row[0] = row[0], i
        for j, y in enumerate(b, start=1):
            cur = min(row[j] + 1, row[j - 1] + 1, prev_diag + (x != y))
            prev_diag, row[j] = row[j], cur
    return row[-1]


def align(ref: Sequence, hyp: Sequence) -> list[tuple[str, int, int]]:
    """One minimum-cost alignment as ``(op, ref_index, hyp_index)`` triples.

    ``ref_index`` is -1 for insertions and ``hyp_index`` -1 for deletions.
    Ties prefer match/substitution, then deletion, then insertion.
    """
    n, m = len(ref), len(hyp)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            dist[i][j] = min(
                dist[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]),
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
            )
    ops: list[tuple[str, int, int]] = []
    i, j = n, m
    while i or j:
        if i and j and dist[i][j] == dist[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            ops.append((MATCH if ref[i - 1] == hyp[j - 1] else SUBSTITUTION, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i and dist[i][j] == dist[i - 1][j] + 1:
            ops.append((DELETION, i - 1, -1))
            i -= 1
        else:
            ops.append((INSERTION, -1, j - 1))
            j -= 1
    ops.reverse()
    return ops


def error_counts(pairs: Iterable[EvalPair]) -> tuple[int, int]:
    """``(total edit distance, total reference length)``."""
    errors = length = 0
    for p in pairs:
        errors += edit_distance(p.reference, p.hypothesis)
        length += len(p.reference)
    return errors, length


def error_rate(pairs: Sequence[EvalPair]) -> float:
    """Corpus-level error rate in percent."""
    if not pairs:
        raise UsageError("error_rate of an empty pair list")
    errors, length = error_counts(pairs)
    if length == 0:
        raise UsageError("references are empty")
    return 100.0 * errors / length
