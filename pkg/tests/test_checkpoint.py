import helpers

import pathlib
import tempfile
import unittest

import numpy as np

from app.constants import REDUCED, UNIFIED
from app.errors import FormatError, SchemeMismatchError, UsageError
from app.managers.checkpoint import load_checkpoint, save_checkpoint
from app.managers.config import parse_config_text
from app.pipeline import build_model
from app.targets import Alphabet

_CONFIG = """
[experiment]
model = ctc
scheme = unified
name = tiny
[features]
num_filters = 3
[encoder]
layers = 1
units = 2
[training]
epochs = 3
seed = 4
"""


class CheckpointTests(unittest.TestCase):
    def setUp(self):
        self.dir = pathlib.Path(tempfile.mkdtemp())
        self.cfg = parse_config_text(_CONFIG)
        self.alphabet = helpers.unified_alphabet()
        self.model = build_model(self.cfg, self.alphabet.size)
        self.path = str(self.dir / "model.ckpt")
        save_checkpoint(self.path, self.cfg, self.model.store, self.alphabet, {"epoch": 2, "dev_loss": 1.5})

    def test_round_trip(self):
        ckpt = load_checkpoint(self.path)
        self.assertEqual(ckpt.scheme, UNIFIED)
        self.assertEqual(ckpt.alphabet_size, self.alphabet.size)
        self.assertEqual(ckpt.meta, {"epoch": 2, "dev_loss": 1.5})
        self.assertEqual(ckpt.config.to_dict(), self.cfg.to_dict())
        self.assertEqual(ckpt.config.label, "tiny")
        for name, tensor in self.model.store.items():
            np.testing.assert_array_equal(ckpt.tensors[name], tensor)
        self.assertFalse((self.dir / "model.ckpt.tmp").exists())

    def test_load_into_fresh_model(self):
        ckpt = load_checkpoint(self.path)
        cfg = parse_config_text(_CONFIG.replace("seed = 4", "seed = 9"))
        other = build_model(cfg, self.alphabet.size)
        ckpt.load_into(other.store)
        for name, tensor in self.model.store.items():
            np.testing.assert_array_equal(other.store[name], tensor)

    def test_load_into_wrong_architecture(self):
        ckpt = load_checkpoint(self.path)
        bigger = build_model(parse_config_text(_CONFIG.replace("layers = 1", "layers = 2")),
                             self.alphabet.size)
        with self.assertRaises(UsageError):
            ckpt.load_into(bigger.store)

    def test_alphabet_checks(self):
        ckpt = load_checkpoint(self.path)
        ckpt.check_alphabet(helpers.unified_alphabet())
        with self.assertRaises(SchemeMismatchError):
            ckpt.check_alphabet(helpers.reduced_alphabet())
        with self.assertRaises(SchemeMismatchError):
            ckpt.check_alphabet(Alphabet.build(["a", "b", "d", "क", "ख"], UNIFIED))

    def test_fingerprint_depends_on_kind(self):
        a = Alphabet.build(["k", "aa"], UNIFIED)
        b = Alphabet.build(["k", "aa"], REDUCED)
        self.assertNotEqual(a.fingerprint(), b.fingerprint())

    def _corrupt(self, blob: bytes) -> str:
        path = self.dir / "bad.ckpt"
        path.write_bytes(blob)
        return str(path)

    def test_corrupt_files(self):
        blob = pathlib.Path(self.path).read_bytes()
        for bad in (b"XXXX" + blob[4:], blob[:-3], blob + b"\x00", blob[:6]):
            with self.assertRaises(FormatError):
                load_checkpoint(self._corrupt(bad))

    def test_missing_file(self):
        with self.assertRaises(FormatError):
            load_checkpoint(str(self.dir / "absent.ckpt"))


if __name__ == "__main__":
    unittest.main()
