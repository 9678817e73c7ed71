"""Training and evaluation loops behind ``ebus3d train`` and ``ebus3d eval``."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np

from ..core.errors import CheckpointMismatchError, DataError, NumericalError
from ..core.types import Split, Variant
from ..metrics import Level, SlicePrediction, accuracy
from ..metrics.export import (
    EvaluationSummary,
    summarize,
    write_metrics_csv,
    write_roc_csv,
    write_score_dump,
)
from ..nets import FusionModel, build_model, load_checkpoint, save_checkpoint
from ..preproc.augment import AugmentConfig
from ..tensor import SGD, CosineSchedule, SgdConfig, Tensor, bce_loss, no_grad
from .dataset import TEMPORAL_CONTROLS, LoadedSample, SliceDataset

logger = logging.getLogger(__name__)

STEPS_CSV = "steps.csv"
EPOCHS_CSV = "epochs.csv"
FINAL_CHECKPOINT = "final.ckpt"
BEST_CHECKPOINT = "best.ckpt"
STEP_COLUMNS = ("step", "epoch", "lr", "loss")
EPOCH_COLUMNS = ("epoch", "train_loss", "val_slice_acc", "val_lesion_acc")


@dataclass(frozen=True)
class TrainSettings:
    """Everything that determines a training run's output."""

    variant: Variant = Variant.U
    lr0: float = 1e-4
    accumulation: int = 12
    epochs: int = 30
    base_channels: int = 16
    feature_dim: int = 1000
    init_seed: int = 0
    data_seed: int = 0
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    temporal_control: str = "none"
    threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.temporal_control not in TEMPORAL_CONTROLS:
            raise DataError(f"temporal_control must be one of {TEMPORAL_CONTROLS}, got {self.temporal_control!r}")


@dataclass(frozen=True)
class StepRecord:
    step: int
    epoch: int
    lr: float
    loss: float


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_slice_acc: float
    val_lesion_acc: float


@dataclass
class TrainResult:
    model: FusionModel
    total_steps: int
    steps: List[StepRecord]
    epochs: List[EpochRecord]
    final_path: Path
    best_path: Path


def total_steps(n_train: int, epochs: int, accumulation: int) -> int:
    """T = epochs · ceil(n / accumulation); a trailing partial window is one step."""
    return epochs * math.ceil(n_train / accumulation)


def _forward(model: FusionModel, sample: LoadedSample) -> Tensor:
    volume = Tensor(sample.slice_.volume[None])
    if model.variant is Variant.U:
        return model(volume, sample.signal)
    elasto = Tensor(sample.elasto[None]) if sample.elasto is not None else None
    return model(volume, sample.signal, elasto)


def predict(
    model: FusionModel,
    dataset: SliceDataset,
    temporal_control: str = "none",
    shuffle_seed: int = 0,
) -> List[SlicePrediction]:
    """Eval-mode scores for every slice of ``dataset``; the model's mode is restored afterwards."""
    was_training = model.training
    model.eval()
    predictions: List[SlicePrediction] = []
    try:
        with no_grad():
            for i, sample in enumerate(dataset):
                loaded = dataset.load(i, temporal_control, shuffle_seed)
                score = float(_forward(model, loaded).data[0])
                record = sample.record
                prediction = SlicePrediction(record.lesion_id, record.patient_id, score, sample.label, record.slice_id)
                predictions.append(prediction)
    finally:
        model.train(was_training)
    return predictions


def _validation_accuracy(predictions: Sequence[SlicePrediction], threshold: float) -> tuple:
    if not predictions:
        return math.nan, math.nan
    return accuracy(predictions, Level.SLICE, threshold), accuracy(predictions, Level.LESION, threshold)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[object]]) -> Path:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_step_log(path: Union[str, Path], steps: Sequence[StepRecord]) -> Path:
    return _write_csv(Path(path), STEP_COLUMNS, [(s.step, s.epoch, repr(s.lr), repr(s.loss)) for s in steps])


def write_epoch_log(path: Union[str, Path], epochs: Sequence[EpochRecord]) -> Path:
    return _write_csv(
        Path(path),
        EPOCH_COLUMNS,
        [(e.epoch, repr(e.train_loss), repr(e.val_slice_acc), repr(e.val_lesion_acc)) for e in epochs],
    )


def train(settings: TrainSettings, slices_dir: Union[str, Path], checkpoint_dir: Union[str, Path]) -> TrainResult:
    """Train one variant on the train split of a preprocessed dataset.

    Samples are visited one at a time in an order shuffled per epoch by
    ``data_seed``; gradients of ``accumulation`` samples make one SGD step and the
    cosine schedule spans every step of the run. Validation accuracy is measured
    after each epoch and the best epoch (by lesion accuracy, later epoch on ties)
    is kept as ``best.ckpt``.
    """
    checkpoint_dir = Path(checkpoint_dir)
    checkpoint_dir.mkdir(parents=True, exist_ok=True)
    train_set = SliceDataset.open(slices_dir, settings.variant, Split.TRAIN)
    val_set = SliceDataset.open(slices_dir, settings.variant, Split.VALIDATION)
    n = len(train_set)
    if n == 0:
        raise DataError(f"no training slices for Res3D_{settings.variant.value} in {slices_dir}")
    if len(val_set) == 0:
        logger.warning("validation split is empty; best.ckpt follows the last epoch")

    steps_total = total_steps(n, settings.epochs, settings.accumulation)
    model = build_model(settings.variant, settings.base_channels, settings.feature_dim, settings.init_seed)
    optimizer = SGD(
        model.parameters(),
        SgdConfig(CosineSchedule(settings.lr0, steps_total), settings.accumulation),
    )
    logger.info(
        "training %s: %d slices, %d epochs, %d optimizer steps, %d parameters",
        model.name,
        n,
        settings.epochs,
        steps_total,
        model.parameter_count(),
    )

    step_log: List[StepRecord] = []
    epoch_log: List[EpochRecord] = []
    best_path = checkpoint_dir / BEST_CHECKPOINT
    best_accuracy = -math.inf

    for epoch in range(settings.epochs):
        model.train()
        order = np.random.default_rng([settings.data_seed, epoch]).permutation(n)
        epoch_losses: List[float] = []
        window: List[float] = []

        def record_step(lr: Optional[float]) -> None:
            if lr is None:
                return
            entry = StepRecord(optimizer.steps_taken - 1, epoch, lr, float(np.mean(window)))
            step_log.append(entry)
            logger.debug("step %d: lr=%.6e loss=%.6f", entry.step, entry.lr, entry.loss)
            window.clear()

        for i in order:
            loaded = train_set.load(
                int(i),
                settings.temporal_control,
                settings.data_seed,
                augment=settings.augment,
                augment_index=epoch * n + int(i),
            )
            try:
                loss = bce_loss(_forward(model, loaded), loaded.target)
                value = loss.item()
                if not math.isfinite(value):
                    raise NumericalError(f"non-finite loss {value}")
                loss.backward()
            except NumericalError as exc:
                raise NumericalError(f"training diverged: {exc}", step=optimizer.steps_taken) from exc
            epoch_losses.append(value)
            window.append(value)
            record_step(optimizer.observe_sample())
        record_step(optimizer.flush())

        val_predictions = predict(model, val_set, settings.temporal_control, settings.data_seed)
        slice_acc, lesion_acc = _validation_accuracy(val_predictions, settings.threshold)
        stats = EpochRecord(epoch, float(np.mean(epoch_losses)), slice_acc, lesion_acc)
        epoch_log.append(stats)
        logger.info(
            "epoch %d: train_loss=%.6f val_slice_acc=%.4f val_lesion_acc=%.4f",
            epoch,
            stats.train_loss,
            slice_acc,
            lesion_acc,
        )
        if math.isnan(lesion_acc) or lesion_acc >= best_accuracy:
            best_accuracy = lesion_acc if not math.isnan(lesion_acc) else best_accuracy
            save_checkpoint(model, best_path, optimizer.steps_taken, steps_total, settings.init_seed)

    final_path = checkpoint_dir / FINAL_CHECKPOINT
    save_checkpoint(model, final_path, optimizer.steps_taken, steps_total, settings.init_seed)
    write_step_log(checkpoint_dir / STEPS_CSV, step_log)
    write_epoch_log(checkpoint_dir / EPOCHS_CSV, epoch_log)
    return TrainResult(model, steps_total, step_log, epoch_log, final_path, best_path)


def load_trained_model(checkpoint_path: Union[str, Path], settings: TrainSettings) -> FusionModel:
    """Rebuild the configured variant and fill it from a checkpoint."""
    checkpoint = load_checkpoint(checkpoint_path)
    if checkpoint.variant is not settings.variant:
        raise CheckpointMismatchError(
            f"checkpoint holds Res3D_{checkpoint.variant.value}, configuration asks for Res3D_{settings.variant.value}"
        )
    model = build_model(settings.variant, settings.base_channels, settings.feature_dim, settings.init_seed)
    checkpoint.apply_to(model)
    return model.eval()


def evaluate(
    checkpoint_path: Union[str, Path],
    settings: TrainSettings,
    slices_dir: Union[str, Path],
    metrics_dir: Union[str, Path],
    split: Split = Split.VALIDATION,
) -> EvaluationSummary:
    """Score one split, aggregate per lesion and write the metric, ROC and score files."""
    model = load_trained_model(checkpoint_path, settings)
    dataset = SliceDataset.open(slices_dir, settings.variant, split)
    if len(dataset) == 0:
        raise DataError(f"split {split.value} has no slices usable by {model.name}")
    predictions = predict(model, dataset, settings.temporal_control, settings.data_seed)
    summary = summarize(predictions, model.name, settings.threshold)

    metrics_dir = Path(metrics_dir)
    metrics_dir.mkdir(parents=True, exist_ok=True)
    for path in (
        write_metrics_csv(metrics_dir / "metrics.csv", summary.rows),
        write_roc_csv(metrics_dir / "roc_slice.csv", summary.slice_roc),
        write_roc_csv(metrics_dir / "roc_lesion.csv", summary.lesion_roc),
        write_score_dump(metrics_dir / "scores.csv", predictions),
    ):
        logger.info("wrote %s", path)
    return summary
