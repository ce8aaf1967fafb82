"""Decode a manifest with a trained checkpoint.

Output is JSON-lines, one object per manifest utterance, in manifest order::

    {"utterance_id": "utt00140", "tokens": ["g", "oo", "_", "h", "oo", "m"],
     "text": "g oo _ h oo m", "log_score": -0.41, "truncated": false,
     "scheme": "reduced", "model": "attention"}
"""

from __future__ import annotations

import json
import pathlib
from typing import Optional

from app.errors import SchemeMismatchError
from app.managers.checkpoint import load_checkpoint
from app.managers.logger import get_logger
from app.managers.manifest import Manifest
from app.models import DecodingConfig, ExperimentConfig
from app.pipeline.data import load_entry_features, load_targets
from app.pipeline.factory import build_model, decode_one
from app.targets import render

log = get_logger(__name__)


def cmd_decode(
    cfg: ExperimentConfig,
    checkpoint_path: str,
    manifest: Manifest,
    out_path: str,
    beam_width: Optional[int] = None,
) -> int:
    """Write the hypothesis file; return the number of utterances decoded.

    The checkpoint's scheme and alphabet fingerprint are checked against the
    runtime alphabet before anything is decoded.
    """
    ckpt = load_checkpoint(checkpoint_path)
    if cfg.targets.scheme != ckpt.scheme:
        raise SchemeMismatchError(
            f"checkpoint {checkpoint_path} was trained on {ckpt.scheme} targets, "
            f"config requests {cfg.targets.scheme}"
        )
    alphabet, _ = load_targets(cfg.targets)
    ckpt.check_alphabet(alphabet)

    model = build_model(ckpt.config, alphabet.size)
    ckpt.load_into(model.store)
    decoding = DecodingConfig(beam_width or cfg.decoding.beam_width, cfg.decoding.widening)
    label = ckpt.config.label

    out = pathlib.Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for entry in manifest:
            feats = load_entry_features(entry, ckpt.config.features)
            hyp = decode_one(model, feats, decoding)
            fh.write(json.dumps({
                "utterance_id": entry.utterance_id,
                "tokens": [alphabet.symbol(i) for i in hyp.ids],
                "text": render(hyp.ids, alphabet),
                "log_score": round(hyp.log_score, 6),
                "truncated": hyp.truncated,
                "scheme": alphabet.kind,
                "model": label,
            }, ensure_ascii=False) + "\n")
            count += 1
    log.info("decoded %d utterance(s) with %s -> %s", count, checkpoint_path, out)
    return count
