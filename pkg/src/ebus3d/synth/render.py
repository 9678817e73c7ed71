"""Procedural EBUS-like frames.

Under ``class_signal = "texture"`` benign lesions are smooth, low-variance
ellipses drifting slowly while malignant ones carry a high-variance texture
redrawn every frame. Under ``"flicker"`` both classes share one texture and
one multiset of per-frame brightness values; benign lesions visit them in a
smooth sinusoid and malignant ones in random order, so only the frame order
tells them apart.
"""

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
from scipy.ndimage import gaussian_filter
from skimage.color import hsv2rgb

from ..core.types import Label, Mode

BACKGROUND = 0.12
BLOB_LEVEL = 0.55
BENIGN_TEXTURE = 0.02
MALIGNANT_TEXTURE = 0.15
FLICKER_AMPLITUDE = 0.2
FLICKER_PERIOD = 2.0
EDGE_SOFTNESS = 4.0
HIGHPASS_SIGMA = 2.0


@dataclass(frozen=True)
class LesionPlan:
    """What to draw for one lesion; ``seed`` fixes every random choice."""

    patient_id: str
    lesion_id: str
    label: Label
    segments: Tuple[Tuple[Mode, int], ...]
    seed: np.random.SeedSequence = field(compare=False)


def _smooth_field(rng: np.random.Generator, shape: Tuple[int, int], sigma: float) -> np.ndarray:
    values = gaussian_filter(rng.standard_normal(shape), sigma)
    return values / (values.std() + 1e-12)


def _ellipse(yy: np.ndarray, xx: np.ndarray, cx: float, cy: float, rx: float, ry: float) -> np.ndarray:
    """Soft-edged ellipse mask in [0, 1]."""
    distance = np.sqrt(((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2)
    return np.clip((1.0 - distance) * min(rx, ry) / EDGE_SOFTNESS + 0.5, 0.0, 1.0)


class LesionRenderer:
    """Draws the grayscale, Doppler and elastography frames of one lesion."""

    def __init__(self, plan: LesionPlan, raw_size: Tuple[int, int], fps: float, class_signal: str):
        self.plan = plan
        self.fps = fps
        self.class_signal = class_signal
        width, height = raw_size
        self.shape = (height, width)
        self.rng = np.random.default_rng(plan.seed)
        rng = self.rng
        self.yy, self.xx = np.mgrid[0:height, 0:width].astype(np.float64)
        self.center = (width * rng.uniform(0.4, 0.6), height * rng.uniform(0.4, 0.6))
        self.radii = (width * rng.uniform(0.12, 0.2), height * rng.uniform(0.12, 0.2))
        self.drift = min(width, height) * 0.02
        self.drift_period = rng.uniform(4.0, 8.0)
        self.phase = rng.uniform(0.0, 2 * np.pi)
        self.background = BACKGROUND + 0.03 * _smooth_field(rng, self.shape, 4.0)
        self.smooth_texture = BENIGN_TEXTURE * _smooth_field(rng, self.shape, 6.0)
        self.stiffness = np.clip(0.5 + 0.25 * _smooth_field(rng, self.shape, 8.0), 0.0, 1.0)
        self.patches = [
            (
                self.center[0] + self.radii[0] * rng.uniform(-1.2, 1.2),
                self.center[1] + self.radii[1] * rng.uniform(-1.2, 1.2),
                min(width, height) * rng.uniform(0.03, 0.05),
                (0.9, 0.1, 0.1) if rng.random() < 0.5 else (0.1, 0.2, 0.9),
                rng.uniform(0.0, 2 * np.pi),
            )
            for _ in range(int(rng.integers(2, 5)))
        ]

    @property
    def malignant(self) -> bool:
        return self.plan.label is Label.MALIGNANT

    def _mask(self, t: float) -> np.ndarray:
        angle = 2 * np.pi * t / self.drift_period + self.phase
        cx = self.center[0] + self.drift * np.sin(angle)
        cy = self.center[1] + self.drift * np.cos(angle)
        return _ellipse(self.yy, self.xx, cx, cy, *self.radii)

    def _brightness_schedule(self, n_frames: int) -> np.ndarray:
        t = np.arange(n_frames) / self.fps
        levels = BLOB_LEVEL + FLICKER_AMPLITUDE * np.sin(2 * np.pi * t / FLICKER_PERIOD + self.phase)
        if self.malignant:
            levels = levels[self.rng.permutation(n_frames)]
        return levels

    def luminance(self, n_frames: int) -> List[np.ndarray]:
        """Grayscale B-mode frames."""
        if self.class_signal == "flicker":
            levels = self._brightness_schedule(n_frames)
        else:
            levels = np.full(n_frames, BLOB_LEVEL)
        frames = []
        for k in range(n_frames):
            t = k / self.fps
            if self.class_signal == "texture" and self.malignant:
                texture = MALIGNANT_TEXTURE * _smooth_field(self.rng, self.shape, 0.8)
            else:
                texture = self.smooth_texture
            mask = self._mask(t)
            frames.append(np.clip(self.background * (1 - mask) + (levels[k] + texture) * mask, 0.0, 1.0))
        return frames

    def grayscale(self, n_frames: int) -> List[np.ndarray]:
        return [np.repeat(lum[..., None], 3, axis=2) for lum in self.luminance(n_frames)]

    def doppler(self, n_frames: int) -> List[np.ndarray]:
        """B-mode plus pulsing red/blue flow patches."""
        frames = []
        for k, rgb in enumerate(self.grayscale(n_frames)):
            t = k / self.fps
            for cx, cy, radius, color, phase in self.patches:
                alpha = (0.5 + 0.4 * np.sin(2 * np.pi * t + phase)) * _ellipse(self.yy, self.xx, cx, cy, radius, radius)
                rgb = rgb * (1 - alpha[..., None]) + np.asarray(color) * alpha[..., None]
            frames.append(np.clip(rgb, 0.0, 1.0))
        return frames

    def elastography(self, n_frames: int) -> List[np.ndarray]:
        """B-mode under a stiffness color map whose extent breathes over time."""
        stiffness = self.stiffness
        if self.class_signal == "texture" and self.malignant:
            stiffness = np.clip(stiffness + 0.3, 0.0, 1.0)
        hsv = np.stack([0.66 * stiffness, np.full(self.shape, 0.9), np.full(self.shape, 0.85)], axis=-1)
        overlay = hsv2rgb(hsv)
        frames = []
        for k, rgb in enumerate(self.grayscale(n_frames)):
            scale = 1.2 + 0.8 * abs(np.sin(np.pi * (k + 0.5) / n_frames))
            region = _ellipse(self.yy, self.xx, *self.center, self.radii[0] * scale, self.radii[1] * scale)[..., None]
            frames.append(np.clip(rgb * (1 - region) + overlay * region, 0.0, 1.0))
        return frames

    def render(self, mode: Mode, n_frames: int) -> List[np.ndarray]:
        if mode is Mode.GRAYSCALE:
            return self.grayscale(n_frames)
        if mode is Mode.DOPPLER:
            return self.doppler(n_frames)
        return self.elastography(n_frames)


def texture_variance(frames: Sequence[np.ndarray]) -> float:
    """Mean high-pass luminance variance of a frame sequence: the texture class statistic."""
    values = []
    for frame in frames:
        lum = frame.mean(axis=2) if frame.ndim == 3 else frame
        values.append(float(np.var(lum - gaussian_filter(lum, HIGHPASS_SIGMA))))
    return float(np.mean(values))
