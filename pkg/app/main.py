"""Command-line interface and ``main()`` entry point.

Subcommands
-----------
synth       Generate a seeded synthetic code-switching corpus.
train       Train a CTC or attention model from an experiment file.
decode      Decode a manifest with a checkpoint into a hypothesis file.
evaluate    Score hypothesis files; print the Test/Average table.
gradcheck   Run the finite-difference gradient suites.
stats       Target-set sizes of both labeling schemes.

Every :class:`app.errors.Cse2eError` escaping a subcommand is logged and
turned into its exit code (1 usage/config, 2 data, 3 numeric).
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from app.constants import APP_NAME, APP_VERSION, EXIT_NUMERIC, EXIT_OK
from app.errors import Cse2eError
from app.managers.config import parse_config
from app.managers.logger import get_logger, set_console_level
from app.managers.manifest import load_manifest
from app.models import BucketSpec, SynthSpec

log = get_logger(__name__)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _synth(args: argparse.Namespace) -> int:
    from app.pipeline import generate_synthetic_corpus

    spec = SynthSpec(
        vocab_size=args.vocab,
        num_phones=args.phones,
        num_utterances=args.utterances,
        noise_sigma=args.noise,
        seed=args.seed,
    )
    generate_synthetic_corpus(spec, args.out_dir)
    return EXIT_OK


def _train(args: argparse.Namespace) -> int:
    from app.pipeline import cmd_train

    cfg = parse_config(args.config)
    train = load_manifest(args.train)
    dev = load_manifest(args.dev) if args.dev else None
    result = cmd_train(cfg, train, dev, args.out_dir, args.cache_features)
    print(f"checkpoint: {result.checkpoint_path}")
    print(f"log:        {result.log_path}")
    return EXIT_OK


def _decode(args: argparse.Namespace) -> int:
    from app.pipeline import cmd_decode

    cfg = parse_config(args.config)
    cmd_decode(cfg, args.checkpoint, load_manifest(args.manifest), args.out, args.beam)
    return EXIT_OK


def _evaluate(args: argparse.Namespace) -> int:
    from app.pipeline import cmd_evaluate

    cfg = parse_config(args.config)
    buckets = BucketSpec.parse(args.buckets) if args.buckets else None
    result = cmd_evaluate(args.hypotheses, load_manifest(args.manifest, check_files=False),
                          cfg.targets, buckets, args.samples)
    print(result.report.to_text())
    for model, count in result.cross_script.items():
        print(f"cross-script insertions ({model}): {count}")
    if result.samples:
        print()
        print(result.samples)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(result.report.to_csv())
    return EXIT_OK


def _gradcheck(args: argparse.Namespace) -> int:
    from app.pipeline import cmd_gradcheck

    results = cmd_gradcheck(args.suite, args.epsilon, args.tolerance, args.sample, args.seed)
    for r in results:
        print(r)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def _stats(args: argparse.Namespace) -> int:
    from app.pipeline import cmd_stats

    print(cmd_stats(parse_config(args.config).targets, args.words))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    from app.pipeline import SUITES
    from app.pipeline.gradcheck import DEFAULT_EPSILON, DEFAULT_SAMPLE, DEFAULT_TOLERANCE

    parser = argparse.ArgumentParser(prog="cse2e", description=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug output on the console")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("out_dir")
    p.add_argument("--vocab", type=int, default=8)
    p.add_argument("--phones", type=int, default=10)
    p.add_argument("--utterances", type=int, default=200)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_synth)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("config")
    p.add_argument("--train", required=True, help="training manifest")
    p.add_argument("--dev", help="development manifest")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--cache-features", action="store_true",
                   help="write extracted features next to the manifest")
    p.set_defaults(func=_train)

    p = sub.add_parser("decode", help="decode a manifest")
    p.add_argument("config")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="hypothesis JSON-lines file")
    p.add_argument("--beam", type=int, help="override [decoding] beam_width")
    p.set_defaults(func=_decode)

    p = sub.add_parser("evaluate", help="score hypothesis files")
    p.add_argument("config")
    p.add_argument("hypotheses", nargs="+")
    p.add_argument("--manifest", required=True)
    p.add_argument("--buckets", help="MIN-MAX:NAME,... (default 3-15:Test1,16-25:Test2,26-60:Test3)")
    p.add_argument("--csv", help="also write the table as CSV")
    p.add_argument("--samples", type=int, default=0, help="reference/hypothesis pairs to show")
    p.set_defaults(func=_evaluate)

    p = sub.add_parser("gradcheck", help="finite-difference gradient checks")
    p.add_argument("--suite", action="append", choices=list(SUITES))
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p.add_argument("--sample", type=int, default=DEFAULT_SAMPLE, help="scalars per suite, 0 = all")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_gradcheck)

    p = sub.add_parser("stats", help="target-set size statistics")
    p.add_argument("config")
    p.add_argument("--words", help="whitespace-separated word list")
    p.set_defaults(func=_stats)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.verbose:
        set_console_level(logging.DEBUG)
    try:
        return args.func(args)
    except Cse2eError as exc:
        log.error("%s: %s", args.command, exc)
        return exc.exit_code


def main() -> None:
    sys.exit(run())
