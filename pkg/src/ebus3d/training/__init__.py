"""Train and evaluate fusion models on preprocessed slices."""

from .dataset import TEMPORAL_CONTROLS, LoadedSample, Sample, SliceDataset, lesion_record
from .trainer import (
    BEST_CHECKPOINT,
    EPOCHS_CSV,
    FINAL_CHECKPOINT,
    STEPS_CSV,
    EpochRecord,
    StepRecord,
    TrainResult,
    TrainSettings,
    evaluate,
    load_trained_model,
    predict,
    total_steps,
    train,
    write_epoch_log,
    write_step_log,
)

__all__ = [
    "TEMPORAL_CONTROLS",
    "LoadedSample",
    "Sample",
    "SliceDataset",
    "lesion_record",
    "BEST_CHECKPOINT",
    "EPOCHS_CSV",
    "FINAL_CHECKPOINT",
    "STEPS_CSV",
    "EpochRecord",
    "StepRecord",
    "TrainResult",
    "TrainSettings",
    "evaluate",
    "load_trained_model",
    "predict",
    "total_steps",
    "train",
    "write_epoch_log",
    "write_step_log",
]
