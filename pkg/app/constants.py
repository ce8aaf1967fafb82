"""Application-wide constants: file paths, metadata, formats and defaults.

Constants
---------
APP_NAME        Human-readable application name ("CodeSwitch-E2E").
APP_VERSION     Current semantic version string.
DATA_DIR        Root data directory: ~/.cse2e/ (override with $CSE2E_HOME).
LOGS_DIR        Directory for rotating log files.

SEPARATOR       Word-separator token string (rendered as "_" in reports).
BLANK           Display name of the CTC blank symbol.
FEATURE_MAGIC   Magic bytes of the per-utterance feature cache ("FBNK").
CHECKPOINT_MAGIC Magic bytes of the model checkpoint file ("CSE2").

DEFAULT_*       Experimental-setup values used as configuration defaults.
"""

from __future__ import annotations

import os
import pathlib

APP_NAME = "CodeSwitch-E2E"
APP_VERSION = "1.0.0"
DATA_DIR = pathlib.Path(os.environ.get("CSE2E_HOME", pathlib.Path.home() / ".cse2e"))
LOGS_DIR = DATA_DIR / "logs"

# ---------------------------------------------------------------------------
# Target inventories
# ---------------------------------------------------------------------------
SEPARATOR = "_"
BLANK = "<blank>"
UNIFIED = "unified"
REDUCED = "reduced"
SCHEMES = (UNIFIED, REDUCED)

# Alphabet sizes (including the separator) when the full inventories are loaded
UNIFIED_FULL_SIZE = 95     # 26 English + 68 Hindi characters + separator
REDUCED_FULL_SIZE = 63     # 62 common phones + separator

# Synthetic corpora spell phone i as the i-th Latin or Devanagari letter
SYNTH_MAX_PHONES = 26

# ---------------------------------------------------------------------------
# Binary formats
# ---------------------------------------------------------------------------
FEATURE_MAGIC = b"FBNK"
FEATURE_VERSION = 1
CHECKPOINT_MAGIC = b"CSE2"
CHECKPOINT_VERSION = 1

# ---------------------------------------------------------------------------
# Front end
# ---------------------------------------------------------------------------
SAMPLE_RATE = 8000
ENERGY_FLOOR = 1e-10

# ---------------------------------------------------------------------------
# Experimental-setup defaults
# ---------------------------------------------------------------------------
DEFAULT_WINDOW_MS = 25
DEFAULT_SHIFT_MS = 10
DEFAULT_PRE_EMPHASIS = 0.97
DEFAULT_NUM_FILTERS = 26
DEFAULT_DROPOUT = 0.5
DEFAULT_NOISE_SIGMA = 0.6
DEFAULT_BEAM_WIDTH = 16
DEFAULT_BATCH_SIZE = 32
DEFAULT_LR_DECAY = 0.1
DEFAULT_LAS_EPOCHS = 400
DEFAULT_CTC_EPOCHS = 250

DEFAULT_BASE_LR = 0.05
DEFAULT_PLATEAU_PATIENCE = 3
DEFAULT_GRAD_CLIP = 5.0
DEFAULT_EMBED_DIM = 64

# Test partitions by utterance length in words (inclusive)
DEFAULT_BUCKETS = ((3, 15, "Test1"), (16, 25, "Test2"), (26, 60, "Test3"))
OTHER_BUCKET = "other"
AVERAGE_COLUMN = "Average"

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3
