"""Corpus manifests: JSON-lines load/save with validation.

One utterance per line::

    {"utterance_id": "utt0001", "feature_path": "feats/utt0001.fbnk",
     "transcript": "ghar go", "word_count": 2}

``audio_path`` (8 kHz mono WAV) may stand in for ``feature_path``.  Paths
are relative to the manifest's directory.  Loading validates every line and
reports all problems at once as a :class:`~app.errors.ManifestError`:
malformed lines, duplicate ids (naming both lines), missing files and
``word_count`` values that disagree with the transcript.

Usage::

    from app.managers.manifest import load_manifest, save_manifest

    manifest = load_manifest("corpus/train.jsonl")
    for entry in manifest:
        ...
    save_manifest("corpus/dev.jsonl", entries)
"""

from __future__ import annotations

import json
import os
import pathlib
from typing import Iterable, Iterator, Optional, Sequence

from app.errors import ManifestError
from app.managers.logger import get_logger
from app.models import ManifestEntry

log = get_logger(__name__)


class Manifest:
    """Ordered, id-unique list of :class:`~app.models.ManifestEntry` objects."""

    def __init__(self, entries: Sequence[ManifestEntry], path: str = "") -> None:
        self.path = path
        self._entries = list(entries)
        self._by_id = {e.utterance_id: e for e in self._entries}

    def __iter__(self) -> Iterator[ManifestEntry]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, utterance_id: str) -> bool:
        return utterance_id in self._by_id

    @property
    def entries(self) -> list[ManifestEntry]:
        return list(self._entries)

    def get(self, utterance_id: str) -> Optional[ManifestEntry]:
        return self._by_id.get(utterance_id)

    @property
    def base_dir(self) -> pathlib.Path:
        return pathlib.Path(self.path).resolve().parent if self.path else pathlib.Path.cwd()


# ---------------------------------------------------------------------------
# Load
# ---------------------------------------------------------------------------

def _resolve(base: pathlib.Path, value: str) -> str:
    p = pathlib.Path(value).expanduser()
    return str(p if p.is_absolute() else base / p)


def _parse_line(obj: dict, lineno: int, base: pathlib.Path, problems: list[str],
                check_files: bool = True) -> Optional[ManifestEntry]:
    uid = obj.get("utterance_id")
    if not isinstance(uid, str) or not uid:
        problems.append(f"line {lineno}: missing utterance_id")
        return None
    transcript = obj.get("transcript")
    if isinstance(transcript, str):
        words = transcript.split()
    elif isinstance(transcript, list) and all(isinstance(w, str) for w in transcript):
        words = list(transcript)
    else:
        problems.append(f"line {lineno}: {uid}: transcript must be a string")
        return None
    if not words:
        problems.append(f"line {lineno}: {uid}: empty transcript")
        return None
    word_count = obj.get("word_count", len(words))
    if not isinstance(word_count, int) or word_count != len(words):
        problems.append(
            f"line {lineno}: {uid}: word_count {word_count} but transcript has {len(words)} words"
        )
    audio = obj.get("audio_path", "") or ""
    feats = obj.get("feature_path", "") or ""
    if not audio and not feats:
        problems.append(f"line {lineno}: {uid}: needs audio_path or feature_path")
        return None
    entry = ManifestEntry(
        uid,
        words,
        len(words),
        _resolve(base, audio) if audio else "",
        _resolve(base, feats) if feats else "",
    )
    for name, value in (("feature_path", entry.feature_path), ("audio_path", entry.audio_path)):
        if check_files and value and not os.path.isfile(value):
            problems.append(f"line {lineno}: {uid}: {name} not found: {value}")
    return entry


def load_manifest(path: str, check_files: bool = True) -> Manifest:
    """Read and validate a JSON-lines manifest."""
    p = pathlib.Path(path)
    base = p.resolve().parent
    problems: list[str] = []
    entries: list[ManifestEntry] = []
    first_line: dict[str, int] = {}
    try:
        fh = open(p, encoding="utf-8-sig")
    except OSError as exc:
        raise ManifestError([f"{path}: {exc.strerror}"]) from None
    with fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                problems.append(f"line {lineno}: invalid JSON ({exc.msg})")
                continue
            if not isinstance(obj, dict):
                problems.append(f"line {lineno}: expected a JSON object")
                continue
            entry = _parse_line(obj, lineno, base, problems, check_files)
            if entry is None:
                continue
            if entry.utterance_id in first_line:
                problems.append(
                    f"duplicate utterance_id '{entry.utterance_id}' on lines "
                    f"{first_line[entry.utterance_id]} and {lineno}"
                )
                continue
            first_line[entry.utterance_id] = lineno
            entries.append(entry)
    if problems:
        for msg in problems:
            log.debug("%s: %s", path, msg)
        raise ManifestError([f"{path}: {m}" for m in problems])
    log.debug("loaded manifest %s (%d utterances)", path, len(entries))
    return Manifest(entries, str(p))


# ---------------------------------------------------------------------------
# Save
# ---------------------------------------------------------------------------

def _relative(base: pathlib.Path, value: str) -> str:
    if not value:
        return ""
    try:
        return pathlib.Path(value).resolve().relative_to(base).as_posix()
    except ValueError:
        return value


def save_manifest(path: str, entries: Iterable[ManifestEntry]) -> None:
    """Write entries as JSON-lines, storing paths relative to the manifest."""
    p = pathlib.Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    base = p.resolve().parent
    with open(p, "w", encoding="utf-8", newline="\n") as fh:
        for e in entries:
            rel = ManifestEntry(
                e.utterance_id, e.transcript, e.word_count,
                _relative(base, e.audio_path), _relative(base, e.feature_path),
            )
            fh.write(json.dumps(rel.to_json(), ensure_ascii=False) + "\n")
