"""Experiment orchestration: synthetic corpora, training, decoding, scoring."""

from app.pipeline.batching import make_batches
from app.pipeline.data import Utterance, load_entry_features, load_targets, load_utterances
from app.pipeline.decode import cmd_decode
from app.pipeline.evaluate import Evaluation, cmd_evaluate, read_hypotheses
from app.pipeline.factory import Model, build_model, decode_one
from app.pipeline.gradcheck import SUITES, SuiteResult, cmd_gradcheck, run_suite
from app.pipeline.stats import cmd_stats
from app.pipeline.synth import SynthCorpus, generate_synthetic_corpus, phone_templates
from app.pipeline.train import TrainResult, cmd_train, train_model

__all__ = [
    "Evaluation",
    "Model",
    "SUITES",
    "SuiteResult",
    "SynthCorpus",
    "TrainResult",
    "Utterance",
    "build_model",
    "cmd_decode",
    "cmd_evaluate",
    "cmd_gradcheck",
    "cmd_stats",
    "cmd_train",
    "decode_one",
    "generate_synthetic_corpus",
    "load_entry_features",
    "load_targets",
    "load_utterances",
    "make_batches",
    "phone_templates",
    "read_hypotheses",
    "run_suite",
    "train_model",
]
