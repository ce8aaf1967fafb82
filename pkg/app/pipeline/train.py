"""Training loop: seeded SGD over length-bucketed batches.

Per epoch the loop

1. shuffles length-sorted batches with the run's generator,
2. averages per-utterance gradients over each batch, clips their global
   norm and takes one SGD step,
3. scores the development set (noise and dropout off),
4. multiplies the learning rate by ``lr_decay`` after ``plateau_patience``
   epochs without a new best dev loss,
5. saves a checkpoint whenever the dev loss improves.

Utterances too short for their CTC target are skipped and counted.  A
non-finite loss or gradient aborts with the epoch and batch coordinates.
The log is a CSV with one row per epoch::

    epoch,train_loss,dev_loss,learning_rate,skipped
"""

from __future__ import annotations

import csv
import dataclasses
import math
import pathlib
from typing import Optional

import numpy as np

from app.errors import CtcInfeasibleError, TrainingError
from app.managers.checkpoint import save_checkpoint
from app.managers.logger import get_logger
from app.managers.manifest import Manifest
from app.models import ExperimentConfig, NoiseConfig
from app.numerics import PlateauDecay, clip_grad_norm, sgd_step
from app.pipeline.batching import make_batches
from app.pipeline.data import Utterance, load_targets, load_utterances
from app.pipeline.factory import Model, build_model
from app.targets import Alphabet

log = get_logger(__name__)

LOG_FIELDS = ("epoch", "train_loss", "dev_loss", "learning_rate", "skipped")
CHECKPOINT_NAME = "model.ckpt"
LOG_NAME = "train_log.csv"


@dataclasses.dataclass
class TrainResult:
    checkpoint_path: str
    log_path: str
    best_dev_loss: float
    best_epoch: int
    step_losses: list[float]
    skipped: int
    model: Model


def _mean_loss(model: Model, utts: list[Utterance]) -> tuple[float, int]:
    total, used, skipped = 0.0, 0, 0
    for utt in utts:
        try:
            total += model.loss(utt.features, utt.target.ids)
            used += 1
        except CtcInfeasibleError:
            skipped += 1
    return (total / used if used else math.nan), skipped


def train_model(
    cfg: ExperimentConfig,
    train: list[Utterance],
    dev: list[Utterance],
    alphabet: Alphabet,
    out_dir: str,
) -> TrainResult:
    """Train on already-loaded utterances; see the module docstring."""
    tc = cfg.training
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ckpt_path = out / CHECKPOINT_NAME
    log_path = out / LOG_NAME

    model = build_model(cfg, alphabet.size)
    store = model.store
    rng = np.random.default_rng(tc.seed)
    noise = NoiseConfig(tc.noise_sigma, tc.seed)
    schedule = PlateauDecay(tc.base_lr, tc.lr_decay, tc.plateau_patience)
    lengths = [u.num_frames for u in train]
    if not dev:
        log.warning("no development utterances; model selection uses the training loss")

    best = math.inf
    best_epoch = 0
    step_losses: list[float] = []
    skipped_total = 0
    log.info("training %s (%s targets): %d parameters, %d train / %d dev utterances, %d epochs",
             cfg.model, alphabet.kind, store.size(), len(train), len(dev), tc.epochs)

    with open(log_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOG_FIELDS)
        for epoch in range(1, tc.epochs + 1):
            lr = schedule.lr
            epoch_loss, epoch_used, skipped = 0.0, 0, 0
            for b_idx, batch in enumerate(make_batches(train, lengths, tc.batch_size, rng), start=1):
                store.zero_grad()
                batch_loss, used = 0.0, 0
                for utt in batch:
                    try:
                        loss = model.loss(utt.features, utt.target.ids, train_mode=True,
                                          rng=rng, backward=True, noise=noise)
                    except CtcInfeasibleError as exc:
                        skipped += 1
                        log.debug("epoch %d: skipping %s (%s)", epoch, utt.utterance_id, exc)
                        continue
                    if not math.isfinite(loss):
                        raise TrainingError(f"non-finite loss on {utt.utterance_id}", epoch, b_idx)
                    batch_loss += loss
                    used += 1
                if not used:
                    continue
                store.scale_grads(1.0 / used)
                clip_grad_norm(store, tc.grad_clip)
                try:
                    sgd_step(store, lr)
                except TrainingError as exc:
                    raise TrainingError("non-finite gradient", epoch, b_idx, exc.parameter) from None
                step_losses.append(batch_loss / used)
                epoch_loss += batch_loss
                epoch_used += used
                log.debug("epoch %d batch %d: loss %.6f (%d utterances)", epoch, b_idx, batch_loss / used, used)

            train_loss = epoch_loss / epoch_used if epoch_used else math.nan
            if skipped:
                log.warning("epoch %d: skipped %d utterance(s) too short for their CTC target", epoch, skipped)
            skipped_total += skipped
            dev_loss = _mean_loss(model, dev)[0] if dev else train_loss
            if math.isnan(dev_loss):
                dev_loss = train_loss

            if dev_loss < best:
                best, best_epoch = dev_loss, epoch
                save_checkpoint(str(ckpt_path), cfg, store, alphabet,
                                {"epoch": epoch, "dev_loss": dev_loss})
            schedule.step(dev_loss)
            writer.writerow([epoch, f"{train_loss:.6f}", f"{dev_loss:.6f}", f"{lr:.6g}", skipped])
            fh.flush()
            log.info("epoch %d/%d: train %.4f  dev %.4f  lr %.4g", epoch, tc.epochs, train_loss, dev_loss, lr)

    if best_epoch == 0:
        # every epoch produced a NaN dev loss; keep the final weights
        save_checkpoint(str(ckpt_path), cfg, store, alphabet, {"epoch": tc.epochs, "dev_loss": None})
    return TrainResult(str(ckpt_path), str(log_path), best, best_epoch, step_losses, skipped_total, model)


def cmd_train(
    cfg: ExperimentConfig,
    train_manifest: Manifest,
    dev_manifest: Optional[Manifest],
    out_dir: str,
    cache_features: bool = False,
) -> TrainResult:
    """Load targets and utterances, then run :func:`train_model`."""
    alphabet, lexicon = load_targets(cfg.targets)
    train = load_utterances(train_manifest, cfg, alphabet, lexicon, cache_features)
    dev = load_utterances(dev_manifest, cfg, alphabet, lexicon, cache_features) if dev_manifest else []
    return train_model(cfg, train, dev, alphabet, out_dir)
