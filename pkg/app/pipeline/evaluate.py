"""Score hypothesis files against a manifest.

Each hypothesis file holds one system (its ``model`` and ``scheme`` fields);
reduced-scheme files are scored as PER and unified-scheme files as CER, so
the reduced and unified runs of one model land in the same table row.
"""

from __future__ import annotations

import dataclasses
import json
from typing import Optional, Sequence

from app.constants import AVERAGE_COLUMN, OTHER_BUCKET, REDUCED, SCHEMES, UNIFIED
from app.errors import ConfigError, FormatError, ManifestError
from app.managers.logger import get_logger
from app.managers.manifest import Manifest
from app.metrics import Report, cross_script_insertions, make_report, metric_name, sample_table, score_buckets
from app.models import BucketSpec, EvalPair, TargetsConfig
from app.targets import Alphabet, Lexicon, ids_from_tokens, load_alphabet, load_lexicon, render, tokenize

log = get_logger(__name__)


@dataclasses.dataclass
class Evaluation:
    report: Report
    cross_script: dict[str, int]          # model -> count, unified systems only
    samples: str


@dataclasses.dataclass
class _HypFile:
    model: str
    scheme: str
    rows: dict[str, tuple[str, ...]]       # utterance id -> tokens


def read_hypotheses(path: str) -> _HypFile:
    model = scheme = None
    rows: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
                uid, tokens = obj["utterance_id"], tuple(obj["tokens"])
                m, s = obj.get("model", "model"), obj["scheme"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"bad hypothesis line ({exc})", lineno, path) from None
            if (model, scheme) != (None, None) and (m, s) != (model, scheme):
                raise FormatError("hypothesis file mixes systems", lineno, path)
            if uid in rows:
                raise FormatError(f"duplicate utterance_id '{uid}'", lineno, path)
            model, scheme = m, s
            rows[uid] = tokens
    if model is None:
        raise FormatError("empty hypothesis file", path=path)
    return _HypFile(model, scheme, rows)


def _scheme_targets(targets: TargetsConfig, scheme: str) -> tuple[Alphabet, Optional[Lexicon]]:
    if scheme not in SCHEMES:
        raise FormatError(f"unknown target scheme '{scheme}' in hypothesis file")
    path = targets.unified_alphabet if scheme == UNIFIED else targets.reduced_alphabet
    if not path:
        raise ConfigError(f"[targets] {scheme}_alphabet is needed to score {scheme} hypotheses")
    alphabet = load_alphabet(path, scheme, targets.strict)
    if scheme != REDUCED:
        return alphabet, None
    if not targets.lexicon:
        raise ConfigError("[targets] lexicon is needed to score reduced hypotheses")
    return alphabet, load_lexicon(targets.lexicon, alphabet)


def _pairs(hyps: _HypFile, manifest: Manifest, alphabet: Alphabet, lexicon: Optional[Lexicon]
           ) -> list[EvalPair]:
    unknown = sorted(uid for uid in hyps.rows if uid not in manifest)
    missing = [e.utterance_id for e in manifest if e.utterance_id not in hyps.rows]
    problems = []
    if unknown:
        problems.append("hypotheses for ids not in the manifest: " + ", ".join(unknown))
    if missing:
        problems.append("no hypothesis for: " + ", ".join(missing))
    if problems:
        raise ManifestError(problems)
    pairs = []
    for entry in manifest:
        ref = tokenize(entry.transcript, alphabet, lexicon)
        hyp = ids_from_tokens(hyps.rows[entry.utterance_id], alphabet)
        pairs.append(EvalPair(entry.utterance_id, list(ref.ids), list(hyp), entry.word_count))
    return pairs


def cmd_evaluate(
    hypothesis_paths: Sequence[str],
    manifest: Manifest,
    targets: TargetsConfig,
    buckets: Optional[BucketSpec] = None,
    num_samples: int = 0,
) -> Evaluation:
    spec = buckets or BucketSpec()
    results: dict[str, dict[str, dict[str, Optional[float]]]] = {}
    cross: dict[str, int] = {}
    samples: list[tuple[str, str, str]] = []
    has_other = False
    alphabets: dict[str, tuple[Alphabet, Optional[Lexicon]]] = {}

    for path in hypothesis_paths:
        hyps = read_hypotheses(path)
        if hyps.scheme not in alphabets:
            alphabets[hyps.scheme] = _scheme_targets(targets, hyps.scheme)
        alphabet, lexicon = alphabets[hyps.scheme]
        pairs = _pairs(hyps, manifest, alphabet, lexicon)
        metric = metric_name(hyps.scheme)
        row = results.setdefault(hyps.model, {})
        if metric in row:
            raise ConfigError(f"two {metric} hypothesis files for model '{hyps.model}'")
        cells = score_buckets(pairs, spec)
        has_other = has_other or OTHER_BUCKET in cells
        row[metric] = {name: cell.rate for name, cell in cells.items()}
        if hyps.scheme == UNIFIED:
            cross[hyps.model] = cross_script_insertions(pairs, alphabet)
        for p in pairs[:num_samples]:
            samples.append((f"{hyps.model}/{p.utterance_id}",
                            render(p.reference, alphabet), render(p.hypothesis, alphabet)))
        log.info("%s (%s): %s %.2f over %d utterances", hyps.model, hyps.scheme, metric,
                 cells[AVERAGE_COLUMN].rate or 0.0, len(pairs))

    columns = [*spec.names, *([OTHER_BUCKET] if has_other else []), AVERAGE_COLUMN]
    return Evaluation(make_report(results, columns), cross, sample_table(samples))
