import helpers

import csv
import json
import pathlib
import shutil
import tempfile
import unittest

import numpy as np

from app.constants import AVERAGE_COLUMN, REDUCED, UNIFIED
from app.errors import ConfigError, FormatError, ManifestError, SchemeMismatchError
from app.managers.checkpoint import load_checkpoint
from app.managers.config import parse_config_text
from app.managers.manifest import Manifest
from app.models import BucketSpec, FeatureMatrix, ManifestEntry, SynthSpec
from app.pipeline import (
    cmd_decode,
    cmd_evaluate,
    cmd_stats,
    cmd_train,
    generate_synthetic_corpus,
    load_targets,
    make_batches,
    read_hypotheses,
    train_model,
    Utterance,
)
from app.targets import LabelSequence, tokenize

_FILTERS = 8


def _config(corpus_dir: pathlib.Path, model: str = "ctc", scheme: str = REDUCED, seed: int = 1) -> str:
    return f"""
[experiment]
model = {model}
scheme = {scheme}
name = tiny-{model}

[targets]
unified_alphabet = {corpus_dir / "unified.txt"}
reduced_alphabet = {corpus_dir / "reduced.txt"}
lexicon = {corpus_dir / "lexicon.tsv"}

[features]
num_filters = {_FILTERS}

[encoder]
layers = 1
units = 4
dropout = 0.0

[attention]
speller_layers = 1
speller_units = 6
embed_dim = 4
attention_dim = 4

[training]
epochs = 2
batch_size = 4
base_lr = 0.05
noise_sigma = 0.05
seed = {seed}

[decoding]
beam_width = 2
"""


class PipelineTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        spec = SynthSpec(vocab_size=4, num_phones=4, num_utterances=20, num_filters=_FILTERS,
                         words_per_utterance=(3, 4), frames_per_token=(3, 4), seed=5)
        cls.corpus = generate_synthetic_corpus(spec, tempfile.mkdtemp(prefix="corpus-"))
        cls.dir = cls.corpus.out_dir
        cls.cfg = parse_config_text(_config(cls.dir))
        cls.out = pathlib.Path(tempfile.mkdtemp(prefix="run-"))
        cls.result = cmd_train(cls.cfg, cls.corpus.train, cls.corpus.dev, str(cls.out / "ctc"))

    def _oracle(self, scheme: str, model: str = "oracle", drop: int = 0) -> str:
        cfg = parse_config_text(_config(self.dir, scheme=scheme))
        alphabet, lexicon = load_targets(cfg.targets)
        path = self.out / f"{model}.{scheme}.hyp.jsonl"
        entries = self.corpus.test.entries[drop:]
        with open(path, "w", encoding="utf-8") as fh:
            for entry in entries:
                ids = tokenize(entry.transcript, alphabet, lexicon).ids
                fh.write(json.dumps({"utterance_id": entry.utterance_id,
                                     "tokens": [alphabet.symbol(i) for i in ids],
                                     "scheme": scheme, "model": model}, ensure_ascii=False) + "\n")
        return str(path)

    def test_training_writes_checkpoint_and_log(self):
        self.assertTrue(pathlib.Path(self.result.checkpoint_path).is_file())
        with open(self.result.log_path, encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        self.assertEqual([r["epoch"] for r in rows], ["1", "2"])
        self.assertTrue(all(np.isfinite(float(r["train_loss"])) for r in rows))
        self.assertEqual(len(self.result.step_losses), 2 * 4)      # 14 utterances, batches of 4
        self.assertIn(self.result.best_epoch, (1, 2))
        ckpt = load_checkpoint(self.result.checkpoint_path)
        self.assertEqual(ckpt.scheme, REDUCED)
        self.assertEqual(ckpt.meta["epoch"], self.result.best_epoch)

    def test_same_seed_same_losses(self):
        again = cmd_train(self.cfg, self.corpus.train, self.corpus.dev, str(self.out / "ctc-again"))
        self.assertEqual(again.step_losses, self.result.step_losses)
        other = cmd_train(parse_config_text(_config(self.dir, seed=2)), self.corpus.train, None,
                          str(self.out / "ctc-seed2"))
        self.assertNotEqual(other.step_losses, self.result.step_losses)

    def test_decode_then_evaluate(self):
        hyp_path = str(self.out / "ctc.hyp.jsonl")
        count = cmd_decode(self.cfg, self.result.checkpoint_path, self.corpus.test, hyp_path)
        self.assertEqual(count, len(self.corpus.test))
        hyps = read_hypotheses(hyp_path)
        self.assertEqual((hyps.model, hyps.scheme), ("tiny-ctc", REDUCED))
        self.assertEqual(set(hyps.rows), {e.utterance_id for e in self.corpus.test})

        result = cmd_evaluate([hyp_path], self.corpus.test, self.cfg.targets, num_samples=2)
        self.assertEqual(result.report.columns, ["Test1", "Test2", "Test3", AVERAGE_COLUMN])
        rate = result.report.rows["tiny-ctc"]["PER"][AVERAGE_COLUMN]
        self.assertGreaterEqual(rate, 0.0)
        self.assertIn("REF:", result.samples)
        self.assertEqual(result.cross_script, {})

    def test_decode_refuses_other_scheme(self):
        unified_cfg = parse_config_text(_config(self.dir, scheme=UNIFIED))
        with self.assertRaises(SchemeMismatchError):
            cmd_decode(unified_cfg, self.result.checkpoint_path, self.corpus.test,
                       str(self.out / "never.jsonl"))

    def test_perfect_hypotheses_score_zero(self):
        result = cmd_evaluate([self._oracle(REDUCED), self._oracle(UNIFIED)],
                              self.corpus.test, self.cfg.targets)
        row = result.report.rows["oracle"]
        self.assertEqual(row["PER"][AVERAGE_COLUMN], 0.0)
        self.assertEqual(row["CER"][AVERAGE_COLUMN], 0.0)
        self.assertEqual(row["PER"]["Test1"], 0.0)
        self.assertIsNone(row["PER"]["Test2"])
        self.assertEqual(result.cross_script, {"oracle": 0})
        self.assertIn("0.00", result.report.to_text())

    def test_out_of_range_lengths_add_other_column(self):
        result = cmd_evaluate([self._oracle(REDUCED)], self.corpus.test, self.cfg.targets,
                              BucketSpec.parse("10-20:Long"))
        self.assertEqual(result.report.columns, ["Long", "other", AVERAGE_COLUMN])

    def test_missing_ids_rejected(self):
        with self.assertRaises(ManifestError) as ctx:
            cmd_evaluate([self._oracle(REDUCED, drop=1)], self.corpus.test, self.cfg.targets)
        self.assertIn(self.corpus.test.entries[0].utterance_id, str(ctx.exception))

    def test_two_files_for_one_cell_rejected(self):
        path = self._oracle(REDUCED)
        with self.assertRaises(ConfigError):
            cmd_evaluate([path, path], self.corpus.test, self.cfg.targets)

    def test_bad_hypothesis_files(self):
        bad = self.out / "bad.jsonl"
        helpers.write_text(bad, '{"utterance_id": "u1"}\n')
        with self.assertRaises(FormatError):
            read_hypotheses(str(bad))
        helpers.write_text(bad, "")
        with self.assertRaises(FormatError):
            read_hypotheses(str(bad))
        row = {"utterance_id": "u1", "tokens": [], "scheme": REDUCED}
        helpers.write_text(bad, json.dumps(row) + "\n" + json.dumps(row) + "\n")
        with self.assertRaises(FormatError):
            read_hypotheses(str(bad))

    def test_attention_model_end_to_end(self):
        cfg = parse_config_text(_config(self.dir, model="attention").replace("epochs = 2", "epochs = 1"))
        small = Manifest(self.corpus.train.entries[:6], self.corpus.train.path)
        result = cmd_train(cfg, small, None, str(self.out / "las"))
        test = Manifest(self.corpus.test.entries[:2], self.corpus.test.path)
        hyp_path = str(self.out / "las.hyp.jsonl")
        self.assertEqual(cmd_decode(cfg, result.checkpoint_path, test, hyp_path, beam_width=1), 2)
        with open(hyp_path, encoding="utf-8") as fh:
            rows = [json.loads(line) for line in fh]
        self.assertEqual([r["model"] for r in rows], ["tiny-attention"] * 2)
        for r in rows:
            self.assertNotIn("<eos>", r["tokens"])

    def test_stats_on_the_corpus(self):
        stats = cmd_stats(self.cfg.targets)
        self.assertEqual(stats.unified_size, 2 * 4 + 1)
        self.assertEqual(stats.reduced_size, 4 + 1)


def _utterance(uid: str, frames: int, ids: tuple[int, ...], seed: int) -> Utterance:
    feats = np.random.default_rng(seed).normal(size=(frames, _FILTERS))
    return Utterance(ManifestEntry(uid, ["w"], 1), FeatureMatrix(feats, uid), LabelSequence(ids, REDUCED))


class PlateauScheduleTests(unittest.TestCase):
    def test_learning_rate_decays_on_a_flat_dev_loss(self):
        # one-frame training utterances cannot emit two labels, so every step is
        # skipped, the weights never move and the dev loss stays flat
        text = _config(pathlib.Path("unused")).replace("epochs = 2", "epochs = 6")
        cfg = parse_config_text(text.replace("[decoding]", "plateau_patience = 2\n\n[decoding]"))
        alphabet = helpers.reduced_alphabet()
        train = [_utterance(f"t{i}", 1, (0, 1), i) for i in range(3)]
        dev = [_utterance("d0", 6, (0, 2), 10)]
        out = pathlib.Path(tempfile.mkdtemp(prefix="plateau-"))

        result = train_model(cfg, train, dev, alphabet, str(out))

        with open(result.log_path, encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        self.assertEqual(len(rows), 6)
        self.assertEqual([r["learning_rate"] for r in rows],
                         ["0.05", "0.05", "0.05", "0.005", "0.005", "0.0005"])
        self.assertEqual(len({r["dev_loss"] for r in rows}), 1)
        self.assertEqual([r["skipped"] for r in rows], ["3"] * 6)
        self.assertEqual((result.best_epoch, result.skipped, result.step_losses), (1, 18, []))


class DeterminismTests(unittest.TestCase):
    def _full_run(self, root: pathlib.Path) -> dict[str, bytes]:
        spec = SynthSpec(vocab_size=4, num_phones=4, num_utterances=20, num_filters=_FILTERS,
                         words_per_utterance=(3, 4), frames_per_token=(3, 4), seed=9)
        corpus = generate_synthetic_corpus(spec, str(root / "corpus"))
        cfg = parse_config_text(_config(corpus.out_dir).replace("epochs = 2", "epochs = 5"))
        result = cmd_train(cfg, corpus.train, corpus.dev, str(root / "ctc"))
        hyp_path = root / "test.hyp.jsonl"
        cmd_decode(cfg, result.checkpoint_path, corpus.test, str(hyp_path))
        evaluation = cmd_evaluate([str(hyp_path)], corpus.test, cfg.targets, num_samples=3)
        return {
            "checkpoint": pathlib.Path(result.checkpoint_path).read_bytes(),
            "train log": pathlib.Path(result.log_path).read_bytes(),
            "hypotheses": hyp_path.read_bytes(),
            "report": evaluation.report.to_text().encode("utf-8"),
            "csv": evaluation.report.to_csv().encode("utf-8"),
            "samples": evaluation.samples.encode("utf-8"),
        }

    def test_repeated_pipeline_is_byte_identical(self):
        root = pathlib.Path(tempfile.mkdtemp(prefix="repeat-")) / "run"
        first = self._full_run(root)
        shutil.rmtree(root)
        second = self._full_run(root)
        for name, data in first.items():
            self.assertEqual(data, second[name], name)


class BatchingTests(unittest.TestCase):
    def test_batches_group_similar_lengths(self):
        items = list(range(10))
        lengths = [5, 1, 9, 3, 7, 2, 8, 4, 6, 0]
        batches = make_batches(items, lengths, 3, np.random.default_rng(0))
        self.assertEqual(sorted(i for b in batches for i in b), items)
        self.assertEqual(sorted(len(b) for b in batches), [1, 3, 3, 3])
        for batch in batches:
            spread = max(lengths[i] for i in batch) - min(lengths[i] for i in batch)
            self.assertLessEqual(spread, 2)

    def test_order_is_seeded(self):
        items = list(range(20))
        first = make_batches(items, items, 2, np.random.default_rng(7))
        second = make_batches(items, items, 2, np.random.default_rng(7))
        self.assertEqual(first, second)


if __name__ == "__main__":
    unittest.main()
