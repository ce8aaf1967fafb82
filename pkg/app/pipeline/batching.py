"""Length-bucketed, seeded minibatches.

Utterances are sorted by frame count, cut into batches of ``batch_size``
neighbours, and the batch order is shuffled.  Each utterance runs its own
forward/backward pass, so batches need no padding.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")


def make_batches(items: Sequence[T], lengths: Sequence[int], batch_size: int,
                 rng: np.random.Generator) -> list[list[T]]:
    order = sorted(range(len(items)), key=lambda i: (lengths[i], i))
    batches = [[items[i] for i in order[k:k + batch_size]] for k in range(0, len(order), batch_size)]
    perm = rng.permutation(len(batches))
    return [batches[i] for i in perm]
