"""Raw videos to model-ready slices, elastography selections and graphic signals."""

from .frames import FRAME_HEIGHT, FRAME_SIZE, FRAME_WIDTH, Frame, VideoSegment, crop_frame, read_ppm, write_ppm
from .clips import (
    CLIP_SECONDS,
    FRAMES_PER_SLICE,
    SAMPLE_RATE,
    ClipInterval,
    Slice,
    clip_count,
    clip_frame_indices,
    clip_intervals,
    sample_clip_frames,
    sample_indices,
    segment_clips,
    stack_slice,
)
from .elasto import ElastoImage, coverage_area, pair_elastography, select_elastography_frames
from .augment import AugmentConfig, AugmentPlan, augment_plan, augment_slice, flip_horizontal, shuffle_frames
from .signal import build_graphic_signal
from .store import SliceStore
from .pipeline import (
    INDEX_HEADER,
    INDEX_NAME,
    DatasetIndex,
    LesionSummary,
    PreprocessSettings,
    SliceRecord,
    load_clip_slices,
    load_segment,
    preprocess_dataset,
    preprocess_lesion,
)

__all__ = [
    "FRAME_HEIGHT",
    "FRAME_SIZE",
    "FRAME_WIDTH",
    "Frame",
    "VideoSegment",
    "crop_frame",
    "read_ppm",
    "write_ppm",
    "CLIP_SECONDS",
    "FRAMES_PER_SLICE",
    "SAMPLE_RATE",
    "ClipInterval",
    "Slice",
    "clip_count",
    "clip_frame_indices",
    "clip_intervals",
    "sample_clip_frames",
    "sample_indices",
    "segment_clips",
    "stack_slice",
    "ElastoImage",
    "coverage_area",
    "pair_elastography",
    "select_elastography_frames",
    "AugmentConfig",
    "AugmentPlan",
    "augment_plan",
    "augment_slice",
    "flip_horizontal",
    "shuffle_frames",
    "build_graphic_signal",
    "SliceStore",
    "INDEX_HEADER",
    "INDEX_NAME",
    "DatasetIndex",
    "LesionSummary",
    "PreprocessSettings",
    "SliceRecord",
    "load_clip_slices",
    "load_segment",
    "preprocess_dataset",
    "preprocess_lesion",
]
