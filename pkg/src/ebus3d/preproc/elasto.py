"""Elastography frame selection by chromatic coverage."""

from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from skimage.color import rgb2hsv

from ..core.errors import DataError
from ..core.types import Mode
from .frames import Frame, VideoSegment

COVERAGE_SATURATION = 0.3
COVERAGE_VALUE = 0.2
MAX_ELASTO = 3


def coverage_area(
    frame: Union[Frame, np.ndarray],
    saturation: float = COVERAGE_SATURATION,
    value: float = COVERAGE_VALUE,
) -> float:
    """Fraction of pixels with HSV saturation > ``saturation`` and value > ``value``."""
    pixels = frame.pixels if isinstance(frame, Frame) else frame
    hsv = rgb2hsv(pixels)
    chromatic = (hsv[..., 1] > saturation) & (hsv[..., 2] > value)
    return float(chromatic.mean())


@dataclass
class ElastoImage:
    """A selected elastography frame, or the zero matrix when ``pixels`` is None."""

    pixels: Optional[np.ndarray]
    coverage: float = 0.0
    timestamp: Optional[float] = None

    @classmethod
    def zero(cls) -> "ElastoImage":
        return cls(None)

    @property
    def is_zero(self) -> bool:
        return self.pixels is None

    def as_chw(self, size: Tuple[int, int]) -> np.ndarray:
        """3×H×W float32; zeros of ``size`` (width, height) for the zero matrix."""
        if self.pixels is None:
            width, height = size
            return np.zeros((3, height, width), dtype=np.float32)
        return np.ascontiguousarray(self.pixels.transpose(2, 0, 1), dtype=np.float32)


def select_elastography_frames(
    segment: VideoSegment,
    max_images: int = MAX_ELASTO,
    saturation: float = COVERAGE_SATURATION,
    value: float = COVERAGE_VALUE,
) -> List[ElastoImage]:
    """Up to ``max_images`` frames by descending coverage; ties go to the earlier frame."""
    if segment.mode is not Mode.ELASTOGRAPHY:
        raise DataError(f"elastography selection needs an elastography segment, got {segment.mode.value}")
    scored = [(coverage_area(f, saturation, value), index) for index, f in enumerate(segment.frames)]
    ranked = sorted(scored, key=lambda item: (-item[0], item[1]))[:max_images]
    return [ElastoImage(segment.frames[i].pixels, score, segment.frames[i].timestamp) for score, i in ranked]


def pair_elastography(slice_index: int, images: List[ElastoImage]) -> ElastoImage:
    """The j-th slice of a lesion uses image j mod k; no images means the zero matrix."""
    if not images:
        return ElastoImage.zero()
    return images[slice_index % len(images)]
