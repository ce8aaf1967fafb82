import helpers

import contextlib
import io
import pathlib
import tempfile
import unittest

from app.constants import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE
from app.main import build_parser, run

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"
DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def _run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = run(list(argv))
    return code, out.getvalue()


class CliTests(unittest.TestCase):
    def test_decode_arguments(self):
        args = build_parser().parse_args(["decode", "c.ini", "--checkpoint", "m.ckpt",
                                          "--manifest", "t.jsonl", "--out", "o.jsonl", "--beam", "3"])
        self.assertEqual((args.command, args.beam, args.checkpoint), ("decode", 3, "m.ckpt"))

    def test_gradcheck_defaults(self):
        args = build_parser().parse_args(["gradcheck"])
        self.assertIsNone(args.suite)
        self.assertEqual(args.tolerance, 1e-4)

    def test_stats_on_full_inventories(self):
        code, out = _run("stats", str(CONFIGS / "inventories.ini"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("unified 95", out)
        self.assertIn("reduced 63", out)

    def test_stats_on_word_list(self):
        code, out = _run("stats", str(CONFIGS / "inventories.ini"),
                         "--words", str(DATA / "example_words.txt"))
        self.assertEqual(code, EXIT_OK)
        self.assertIn("unified 22", out)
        self.assertIn("45.5%", out)

    def test_gradcheck_exit_codes(self):
        code, out = _run("gradcheck", "--suite", "ctc-logits")
        self.assertEqual(code, EXIT_OK)
        self.assertIn("ctc-logits", out)
        code, _ = _run("gradcheck", "--suite", "encoder-flat", "--epsilon", "0.5")
        self.assertEqual(code, EXIT_NUMERIC)

    def test_missing_config_is_a_usage_error(self):
        code, _ = _run("stats", str(CONFIGS / "absent.ini"))
        self.assertEqual(code, EXIT_USAGE)

    def test_missing_manifest_is_a_data_error(self):
        tmp = pathlib.Path(tempfile.mkdtemp())
        code, _ = _run("decode", str(CONFIGS / "synth_ctc.ini"), "--checkpoint", str(tmp / "m.ckpt"),
                       "--manifest", str(tmp / "absent.jsonl"), "--out", str(tmp / "hyp.jsonl"))
        self.assertEqual(code, EXIT_DATA)

    def test_bad_bucket_spec(self):
        tmp = pathlib.Path(tempfile.mkdtemp())
        manifest = helpers.write_text(tmp / "m.jsonl", "")
        code, _ = _run("evaluate", str(CONFIGS / "inventories.ini"), str(tmp / "h.jsonl"),
                       "--manifest", manifest, "--buckets", "nonsense")
        self.assertEqual(code, EXIT_USAGE)

    def test_synth_writes_a_corpus(self):
        tmp = pathlib.Path(tempfile.mkdtemp())
        code, _ = _run("synth", str(tmp / "corpus"), "--utterances", "10", "--seed", "2")
        self.assertEqual(code, EXIT_OK)
        for name in ("train.jsonl", "dev.jsonl", "test.jsonl", "unified.txt", "reduced.txt",
                     "lexicon.tsv", "synth.json"):
            self.assertTrue((tmp / "corpus" / name).is_file(), name)

    def test_argument_errors_exit_through_argparse(self):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                run(["gradcheck", "--suite", "no-such-suite"])
        self.assertEqual(ctx.exception.code, 2)


if __name__ == "__main__":
    unittest.main()
