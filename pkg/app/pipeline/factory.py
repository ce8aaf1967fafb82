"""Build the configured model and run its decoder."""

from __future__ import annotations

from typing import Union

from app.attention import LasModel
from app.ctc import CtcModel
from app.models import CTC, DecodingConfig, ExperimentConfig, FeatureMatrix, Hypothesis
from app.numerics import ParamStore

Model = Union[CtcModel, LasModel]


def build_model(cfg: ExperimentConfig, num_labels: int) -> Model:
    """Fresh model with parameters seeded from ``training.seed``."""
    store = ParamStore(cfg.training.seed)
    if cfg.model == CTC:
        return CtcModel.create(cfg.encoder, num_labels, store)
    return LasModel.create(cfg.attention, num_labels, store)


def decode_one(model: Model, features: FeatureMatrix, decoding: DecodingConfig) -> Hypothesis:
    """CTC best path, or attention beam search with the configured width."""
    if isinstance(model, CtcModel):
        return model.decode(features)
    return model.decode(features, decoding.beam_width, decoding.widening)
