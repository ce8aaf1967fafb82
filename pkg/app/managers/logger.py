"""Centralized logging setup for CodeSwitch-E2E.

All toolkit modules should obtain loggers via::

    from app.managers.logger import get_logger
    log = get_logger(__name__)

Log file: <data dir>/logs/cse2e.log  (data dir: ~/.cse2e or $CSE2E_HOME)
  - Rotates at 5 MiB, keeps 3 backups
  - Level: DEBUG
Console:
  - Level: INFO (``set_console_level`` changes it, e.g. for ``--verbose``)
"""

from __future__ import annotations

import logging
import logging.handlers
import pathlib

_configured = False
_LOGS_DIR: pathlib.Path | None = None
_console: logging.Handler | None = None


def get_logger(name: str) -> logging.Logger:
    """Return a named logger under the 'cse2e' hierarchy."""
    _configure_once()
    # Normalise name so all toolkit loggers share the root handlers
    if not name.startswith("cse2e"):
        name = f"cse2e.{name}"
    return logging.getLogger(name)


def logs_dir() -> pathlib.Path | None:
    """Return the logs directory path (None until first call to get_logger)."""
    return _LOGS_DIR


def set_console_level(level: int) -> None:
    _configure_once()
    if _console is not None:
        _console.setLevel(level)


def _configure_once() -> None:
    global _configured, _LOGS_DIR, _console
    if _configured:
        return
    _configured = True

    # Late import to avoid circular imports at module load time
    from app.constants import LOGS_DIR  # noqa: PLC0415

    root = logging.getLogger("cse2e")
    if root.handlers:
        return  # already configured (e.g. imported twice)

    root.setLevel(logging.DEBUG)
    root.propagate = False

    _fmt = logging.Formatter(
        "%(asctime)s  %(levelname)-8s  %(name)s  %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )

    # ── Rotating file handler ─────────────────────────────────────────
    try:
        LOGS_DIR.mkdir(parents=True, exist_ok=True)
        fh = logging.handlers.RotatingFileHandler(
            LOGS_DIR / "cse2e.log",
            maxBytes=5 * 1024 * 1024,
            backupCount=3,
            encoding="utf-8",
        )
    except OSError:
        fh = None  # read-only home: console only
    else:
        _LOGS_DIR = LOGS_DIR
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(_fmt)
        root.addHandler(fh)

    # ── Console handler ───────────────────────────────────────────────
    ch = logging.StreamHandler()
    ch.setLevel(logging.INFO)
    ch.setFormatter(logging.Formatter("%(levelname)-8s  %(name)s  %(message)s"))
    root.addHandler(ch)
    _console = ch
