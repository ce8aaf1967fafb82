"""Left-to-right decoding for the attention model.

:func:`beam_search` keeps the ``beam_width`` best partial hypotheses by
accumulated log-score.  A candidate that emits end-of-sequence leaves the
beam for the completed pool; decoding stops when the beam is empty or the
length limit is reached.  If nothing completes, the best running
hypothesis is returned flagged ``truncated``.

With ``widening`` on, a width-``W`` search also runs widths 1, 2, 4, ...
below ``W`` and merges the completed pools, so the best completed score
is non-decreasing over power-of-two widths.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from app.attention.attend import AttentionMemory, attend, make_memory
from app.attention.las import listen
from app.attention.params import LasParams
from app.attention.speller import DecoderState, spell_step
from app.errors import UsageError
from app.managers.logger import get_logger
from app.models import FeatureMatrix, Hypothesis, LasConfig

log = get_logger(__name__)


def _step(params: LasParams, memory: AttentionMemory, state: DecoderState
          ) -> tuple[np.ndarray, DecoderState]:
    _, context, _ = attend(params, state.query, memory)
    log_dist, nxt, _ = spell_step(params, state, context)
    return log_dist, nxt


def _encode(cfg: LasConfig, params: LasParams, features: FeatureMatrix) -> tuple[AttentionMemory, int]:
    h_enc, _ = listen(cfg, params, features)
    return make_memory(params, h_enc), cfg.decode_limit(h_enc.shape[0])


def greedy_decode(cfg: LasConfig, params: LasParams, features: FeatureMatrix) -> Hypothesis:
    """Stepwise argmax until end-of-sequence or the length limit."""
    memory, limit = _encode(cfg, params, features)
    state = DecoderState.initial(params)
    ids: list[int] = []
    score = 0.0
    for _ in range(limit):
        log_dist, state = _step(params, memory, state)
        k = int(np.argmax(log_dist))
        score += float(log_dist[k])
        if k == params.eos_id:
            return Hypothesis(tuple(ids), score)
        ids.append(k)
        state = dataclasses.replace(state, prev_id=k)
    return Hypothesis(tuple(ids), score, truncated=True)


@dataclasses.dataclass
class _Partial:
    ids: tuple[int, ...]
    state: DecoderState

    @property
    def score(self) -> float:
        return self.state.log_score


def _plain_beam(params: LasParams, memory: AttentionMemory, limit: int, width: int
                ) -> tuple[list[Hypothesis], Optional[Hypothesis]]:
    """One beam pass; returns (completed, best running hypothesis at the end)."""
    beam = [_Partial((), DecoderState.initial(params))]
    completed: list[Hypothesis] = []
    for _ in range(limit):
        candidates = []
        for p in beam:
            log_dist, nxt = _step(params, memory, p.state)
            for k, lp in enumerate(log_dist):
                candidates.append((p.score + float(lp), p.ids, k, nxt))
        candidates.sort(key=lambda c: (-c[0], len(c[1]), c[1] + (c[2],)))
        beam = []
        for score, ids, k, nxt in candidates[:width]:
            if k == params.eos_id:
                completed.append(Hypothesis(ids, score))
            else:
                beam.append(_Partial(ids + (k,), dataclasses.replace(nxt, prev_id=k, log_score=score)))
        if not beam:
            return completed, None
    best = min(beam, key=lambda p: (-p.score, len(p.ids), p.ids))
    return completed, Hypothesis(best.ids, best.score, truncated=True)


def _widths(width: int, widening: bool) -> list[int]:
    if not widening:
        return [width]
    widths = []
    w = 1
    while w < width:
        widths.append(w)
        w *= 2
    widths.append(width)
    return widths


def beam_search(
    cfg: LasConfig,
    params: LasParams,
    features: FeatureMatrix,
    beam_width: Optional[int] = None,
    widening: Optional[bool] = None,
) -> list[Hypothesis]:
    """Ranked completed hypotheses (best first); ``[truncated]`` when none completed."""
    width = cfg.beam_width if beam_width is None else beam_width
    widen = cfg.widening if widening is None else widening
    if width < 1:
        raise UsageError("beam_width must be >= 1")
    memory, limit = _encode(cfg, params, features)

    pool: dict[tuple[int, ...], Hypothesis] = {}
    running: Optional[Hypothesis] = None
    for w in _widths(width, widen):
        completed, running = _plain_beam(params, memory, limit, w)
        for hyp in completed:
            seen = pool.get(hyp.ids)
            if seen is None or hyp.log_score > seen.log_score:
                pool[hyp.ids] = hyp
    if not pool:
        log.debug("%s: no hypothesis reached end-of-sequence within %d steps",
                  features.utterance_id, limit)
        return [running] if running is not None else []
    return sorted(pool.values(), key=Hypothesis.sort_key)
