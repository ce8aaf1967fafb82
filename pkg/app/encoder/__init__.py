"""Recurrent acoustic encoders (LSTM, BLSTM, flat and pyramidal stacks)."""

from app.encoder.lstm import (
    LstmCellParams,
    lstm_cell_step,
    lstm_cell_step_backward,
    lstm_sequence_backward,
    lstm_sequence_forward,
)
from app.encoder.blstm import BlstmLayerParams, blstm_layer_backward, blstm_layer_forward
from app.encoder.pyramid import pyramid_backward, pyramid_subsample
from app.encoder.projection import (
    OutputProjectionParams,
    output_projection,
    project_sequence,
    project_sequence_backward,
)
from app.encoder.stack import EncoderCache, EncoderParams, encoder_backward, encoder_forward

__all__ = [
    "BlstmLayerParams",
    "EncoderCache",
    "EncoderParams",
    "LstmCellParams",
    "OutputProjectionParams",
    "blstm_layer_backward",
    "blstm_layer_forward",
    "encoder_backward",
    "encoder_forward",
    "lstm_cell_step",
    "lstm_cell_step_backward",
    "lstm_sequence_backward",
    "lstm_sequence_forward",
    "output_projection",
    "project_sequence",
    "project_sequence_backward",
    "pyramid_backward",
    "pyramid_subsample",
]
