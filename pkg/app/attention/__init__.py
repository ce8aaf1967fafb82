"""Listen-attend-spell model: listener, attender, speller, loss and search."""

from app.attention.params import LasParams
from app.attention.attend import AttentionMemory, attend, attend_backward, make_memory, memory_backward
from app.attention.speller import DecoderState, spell_step, spell_step_backward
from app.attention.las import LasCache, las_backward, las_loss, listen
from app.attention.search import beam_search, greedy_decode
from app.attention.model import LasModel

__all__ = [
    "AttentionMemory",
    "DecoderState",
    "LasCache",
    "LasModel",
    "LasParams",
    "attend",
    "attend_backward",
    "beam_search",
    "greedy_decode",
    "las_backward",
    "las_loss",
    "listen",
    "make_memory",
    "memory_backward",
    "spell_step",
    "spell_step_backward",
]
