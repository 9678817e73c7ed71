"""Frames, crops and PPM I/O."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..core.errors import DataError, MissingFrameError
from ..core.types import Mode

FRAME_WIDTH = 704
FRAME_HEIGHT = 576
FRAME_SIZE = (FRAME_WIDTH, FRAME_HEIGHT)


@dataclass
class Frame:
    """H×W×3 float32 pixels in [0, 1] at ``timestamp`` seconds from segment start."""

    pixels: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise DataError(f"frame pixels must be H×W×3, got shape {self.pixels.shape}")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def size(self) -> Tuple[int, int]:
        return self.width, self.height


def crop_frame(
    raw: np.ndarray,
    origin: Tuple[int, int] = (0, 0),
    size: Tuple[int, int] = FRAME_SIZE,
    timestamp: float = 0.0,
) -> Frame:
    """Cut a ``size`` (width, height) window whose top-left pixel is raw (x, y) = ``origin``."""
    x, y = origin
    width, height = size
    raw_height, raw_width = raw.shape[:2]
    if x < 0 or y < 0 or x + width > raw_width or y + height > raw_height:
        raise DataError(
            f"crop window {width}×{height} at ({x},{y}) exceeds raw frame {raw_width}×{raw_height}"
        )
    return Frame(raw[y : y + height, x : x + width].copy(), timestamp)


def read_ppm(path: Union[str, Path]) -> np.ndarray:
    """Load an 8-bit binary PPM as H×W×3 float32 in [0, 1]."""
    try:
        with Image.open(path) as image:
            pixels = np.asarray(image.convert("RGB"), dtype=np.float32)
    except FileNotFoundError:
        raise MissingFrameError(str(path)) from None
    except UnidentifiedImageError:
        raise DataError(f"not a PPM image: {path}") from None
    return pixels / np.float32(255.0)


def write_ppm(path: Union[str, Path], pixels: np.ndarray) -> None:
    data = np.clip(np.rint(np.asarray(pixels) * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(data).save(path, format="PPM")


@dataclass
class VideoSegment:
    """Frames of one lesion in one mode, evenly spaced at 1/fps."""

    lesion_id: str
    patient_id: str
    mode: Mode
    fps: float
    frames: List[Frame] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.fps <= 0:
            raise DataError(f"segment {self.lesion_id}/{self.mode.value}: fps must be positive, got {self.fps}")
        step = 1.0 / self.fps
        for prev, cur in zip(self.frames, self.frames[1:]):
            if not math.isclose(cur.timestamp - prev.timestamp, step, rel_tol=1e-6, abs_tol=1e-9):
                raise DataError(
                    f"segment {self.lesion_id}/{self.mode.value}: frames at {prev.timestamp:g} s and "
                    f"{cur.timestamp:g} s are not 1/fps = {step:g} s apart"
                )

    @classmethod
    def from_pixels(
        cls, lesion_id: str, patient_id: str, mode: Mode, fps: float, pixels: Sequence[np.ndarray]
    ) -> "VideoSegment":
        frames = [Frame(p, index / fps) for index, p in enumerate(pixels)]
        return cls(lesion_id, patient_id, mode, fps, frames)

    @property
    def n_frames(self) -> int:
        return len(self.frames)

    @property
    def duration(self) -> float:
        return self.n_frames / self.fps
