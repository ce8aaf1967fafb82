import helpers

import json
import pathlib
import tempfile
import unittest

import numpy as np

from app.constants import REDUCED, UNIFIED
from app.errors import ConfigError
from app.features import read_features
from app.managers.manifest import load_manifest
from app.models import SynthSpec
from app.pipeline import generate_synthetic_corpus, phone_templates
from app.targets import load_alphabet, load_lexicon, tokenize


def _generate(spec: SynthSpec):
    return generate_synthetic_corpus(spec, tempfile.mkdtemp(prefix="synth-"))


class SynthTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.spec = SynthSpec(vocab_size=6, num_phones=8, num_utterances=200, seed=3)
        cls.corpus = _generate(cls.spec)

    def test_split_sizes(self):
        self.assertEqual((len(self.corpus.train), len(self.corpus.dev), len(self.corpus.test)),
                         (140, 20, 40))
        for name, size in (("train", 140), ("dev", 20), ("test", 40)):
            self.assertEqual(len(load_manifest(str(self.corpus.out_dir / f"{name}.jsonl"))), size)

    def test_same_seed_same_bytes(self):
        again = _generate(self.spec)
        for name in ("train.jsonl", "dev.jsonl", "test.jsonl", "unified.txt", "reduced.txt",
                     "lexicon.tsv", "synth.json"):
            self.assertEqual((self.corpus.out_dir / name).read_bytes(),
                             (again.out_dir / name).read_bytes(), name)
        for uid in ("utt00000", "utt00199"):
            self.assertEqual((self.corpus.out_dir / "feats" / f"{uid}.fbnk").read_bytes(),
                             (again.out_dir / "feats" / f"{uid}.fbnk").read_bytes())

    def test_different_seed_differs(self):
        other = _generate(SynthSpec(vocab_size=6, num_phones=8, num_utterances=10, seed=4))
        first = read_features(self.corpus.out_dir / "feats" / "utt00000.fbnk")
        second = read_features(other.out_dir / "feats" / "utt00000.fbnk")
        self.assertFalse(first.frames.shape == second.frames.shape
                         and np.array_equal(first.frames, second.frames))

    def test_templates_do_not_overlap(self):
        templates = phone_templates(self.spec)
        self.assertEqual(templates.shape, (8, self.spec.num_filters))
        gram = templates @ templates.T
        np.testing.assert_array_equal(gram - np.diag(np.diag(gram)), np.zeros((8, 8)))
        self.assertTrue(np.all(np.diag(gram) > 0))

    def test_both_schemes_tokenize_every_transcript(self):
        out = self.corpus.out_dir
        unified = load_alphabet(str(out / "unified.txt"), UNIFIED)
        reduced = load_alphabet(str(out / "reduced.txt"), REDUCED)
        lexicon = load_lexicon(str(out / "lexicon.tsv"), reduced)
        self.assertEqual(unified.size, 2 * 8 + 1)
        self.assertEqual(reduced.size, 8 + 1)
        self.assertEqual(unified.fingerprint(), self.corpus.unified.fingerprint())
        for entry in self.corpus.test:
            chars = tokenize(entry.transcript, unified)
            phones = tokenize(entry.transcript, reduced, lexicon)
            self.assertEqual(chars.ids.count(unified.separator_id), entry.word_count - 1)
            self.assertEqual(phones.ids.count(reduced.separator_id), entry.word_count - 1)

    def test_vocabulary_mixes_scripts(self):
        scripts = set()
        for entry in self.corpus.train:
            for word in entry.transcript:
                scripts.add("devanagari" if "\u0900" <= word[0] <= "\u097f" else "latin")
        self.assertEqual(scripts, {"latin", "devanagari"})

    def test_features_match_transcript_length(self):
        entry = self.corpus.train.entries[0]
        feats = read_features(entry.feature_path)
        self.assertEqual(feats.dim, self.spec.num_filters)
        # every phone lasts at least one frame
        phones = sum(len(self.corpus.lexicon[w]) for w in entry.transcript)
        self.assertGreaterEqual(feats.num_frames, phones)

    def test_bad_specs(self):
        with self.assertRaises(ConfigError):
            SynthSpec(vocab_size=1)
        with self.assertRaises(ConfigError):
            SynthSpec(num_phones=40)
        with self.assertRaises(ConfigError):
            SynthSpec(frames_per_token=(0, 2))

    def test_vocabulary_must_fit_the_spellings(self):
        # two phones, two per word: four spellings per script, five Latin words needed
        with self.assertRaises(ConfigError):
            SynthSpec(vocab_size=10, num_phones=2, phones_per_word=(2, 2), num_filters=8)
        with self.assertRaises(ConfigError):
            SynthSpec(vocab_size=4, phones_per_word=(0, 0))
        spec = SynthSpec(vocab_size=8, num_phones=2, phones_per_word=(2, 2), num_filters=8,
                         num_utterances=10, seed=1)
        self.assertEqual(spec.spellings_per_script(), 4)
        corpus = _generate(spec)
        self.assertEqual(len(corpus.lexicon), 8)

    def test_phone_count_bounded_by_letters(self):
        with self.assertRaises(ConfigError):
            SynthSpec(num_phones=30, num_filters=40)
        self.assertEqual(SynthSpec(num_phones=26, num_filters=40).num_phones, 26)

    def test_spec_round_trips_through_json(self):
        data = json.loads(pathlib.Path(self.corpus.out_dir / "synth.json").read_text(encoding="utf-8"))
        self.assertEqual(SynthSpec.from_dict(data), self.spec)


if __name__ == "__main__":
    unittest.main()
