"""Clip segmentation, 4 Hz frame sampling and slice stacking."""

import math
from dataclasses import dataclass, replace
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from ..core.errors import DataError
from ..core.types import GraphicSignal, Label, Mode, Split
from .frames import Frame, VideoSegment

CLIP_SECONDS = 6.0
CLIP_OVERLAP = 0.5
SAMPLE_RATE = 4.0
FRAMES_PER_SLICE = 24

# absorbs float error in durations computed as n_frames / fps
_EPS = 1e-9


class ClipInterval(NamedTuple):
    start: float
    end: float


def clip_count(duration: float, clip_len: float = CLIP_SECONDS, overlap: float = CLIP_OVERLAP) -> int:
    """max(0, floor((d - clip_len) / hop) + 1) with hop = clip_len·(1 - overlap)."""
    if duration + _EPS < clip_len:
        return 0
    hop = clip_len * (1.0 - overlap)
    return math.floor((duration - clip_len) / hop + _EPS) + 1


def clip_intervals(
    duration: float, clip_len: float = CLIP_SECONDS, overlap: float = CLIP_OVERLAP
) -> List[ClipInterval]:
    """Clips starting at 0, hop, 2·hop, …; trailing partial windows are dropped."""
    hop = clip_len * (1.0 - overlap)
    return [ClipInterval(k * hop, k * hop + clip_len) for k in range(clip_count(duration, clip_len, overlap))]


def segment_clips(
    segment: VideoSegment, clip_len: float = CLIP_SECONDS, overlap: float = CLIP_OVERLAP
) -> List[ClipInterval]:
    if not segment.mode.is_video:
        raise DataError(f"cannot cut clips from a {segment.mode.value} segment")
    return clip_intervals(segment.duration, clip_len, overlap)


def sample_indices(fps: float, start: float, count: int = FRAMES_PER_SLICE, rate: float = SAMPLE_RATE) -> List[int]:
    """Nearest frame index floor(t·fps + 0.5) for t = start + k/rate."""
    return [math.floor((start + k / rate) * fps + 0.5) for k in range(count)]


def clip_frame_indices(
    name: str, fps: float, n_frames: int, clip: ClipInterval, rate: float = SAMPLE_RATE
) -> List[int]:
    """Frame indices a clip samples; every one must exist in a segment of ``n_frames``."""
    indices = sample_indices(fps, clip.start, FRAMES_PER_SLICE, rate)
    if indices[-1] >= n_frames:
        raise DataError(
            f"segment {name}: frame index {indices[-1]} beyond last frame {n_frames - 1} (fps {fps})"
        )
    return indices


def sample_clip_frames(segment: VideoSegment, clip: ClipInterval, rate: float = SAMPLE_RATE) -> List[Frame]:
    name = f"{segment.lesion_id}/{segment.mode.value}"
    return [segment.frames[i] for i in clip_frame_indices(name, segment.fps, segment.n_frames, clip, rate)]


@dataclass
class Slice:
    """One model input: ``volume`` is C×T×H×W float32 with T = 24."""

    volume: np.ndarray
    signal: GraphicSignal
    lesion_id: str
    clip_start: float = 0.0
    patient_id: str = ""
    label: Optional[Label] = None
    split: Split = Split.UNASSIGNED

    def __post_init__(self) -> None:
        if self.volume.ndim != 4 or self.volume.shape[0] != 3:
            raise DataError(f"slice volume must be 3×T×H×W, got shape {self.volume.shape}")
        if self.volume.shape[1] != FRAMES_PER_SLICE:
            raise DataError(f"slice must hold {FRAMES_PER_SLICE} frames, got {self.volume.shape[1]}")

    @property
    def mode(self) -> Mode:
        return self.signal.mode

    def with_volume(self, volume: np.ndarray) -> "Slice":
        return replace(self, volume=volume)


def stack_slice(
    frames: Sequence[Frame],
    signal: GraphicSignal,
    lesion_id: str,
    clip_start: float,
    patient_id: str = "",
    label: Optional[Label] = None,
    split: Split = Split.UNASSIGNED,
) -> Slice:
    """T frames of H×W×3 -> a 3×T×H×W volume."""
    volume = np.stack([f.pixels for f in frames]).astype(np.float32).transpose(3, 0, 1, 2)
    return Slice(np.ascontiguousarray(volume), signal, lesion_id, clip_start, patient_id, label, split)
