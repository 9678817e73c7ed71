"""Training-time slice augmentation and the frame-shuffle temporal control."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.ndimage import gaussian_filter

from ..core.errors import ConfigError
from .clips import Slice


@dataclass(frozen=True)
class AugmentConfig:
    """Augmentation probabilities and magnitudes."""

    p_flip: float = 0.2
    p_noise: float = 0.2
    noise_sigma: float = 0.01
    p_blur: float = 0.2
    blur_kernel: int = 5
    blur_sigma_min: float = 0.5
    blur_sigma_max: float = 1.5
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("p_flip", "p_noise", "p_blur"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {p}", key=name)
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be non-negative, got {self.noise_sigma}", key="noise_sigma")
        if self.blur_kernel < 1 or self.blur_kernel % 2 == 0:
            raise ConfigError(f"blur_kernel must be a positive odd size, got {self.blur_kernel}", key="blur_kernel")
        if not 0 < self.blur_sigma_min <= self.blur_sigma_max:
            raise ConfigError(
                f"blur sigma range [{self.blur_sigma_min}, {self.blur_sigma_max}] is empty", key="blur_sigma_min"
            )


class AugmentPlan(NamedTuple):
    flip: bool
    noise: bool
    blur: bool
    blur_sigma: float


def _generator(config: AugmentConfig, sample_index: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, sample_index])


def _draw_plan(rng: np.random.Generator, config: AugmentConfig) -> AugmentPlan:
    u = rng.random(3)
    sigma = float(rng.uniform(config.blur_sigma_min, config.blur_sigma_max))
    return AugmentPlan(bool(u[0] < config.p_flip), bool(u[1] < config.p_noise), bool(u[2] < config.p_blur), sigma)


def augment_plan(config: AugmentConfig, sample_index: int) -> AugmentPlan:
    """The transforms ``augment_slice`` would apply for this sample."""
    return _draw_plan(_generator(config, sample_index), config)


def augment_slice(slice_: Slice, config: AugmentConfig, sample_index: int) -> Slice:
    """Flip, noise and blur, each gated independently and applied to all frames alike.

    The result depends only on (slice, config.seed, sample_index).
    """
    rng = _generator(config, sample_index)
    plan = _draw_plan(rng, config)
    volume = slice_.volume
    if plan.flip:
        volume = volume[..., ::-1]
    if plan.noise:
        volume = np.clip(volume + rng.normal(0.0, config.noise_sigma, volume.shape), 0.0, 1.0)
    if plan.blur:
        # per-frame 2D blur over H and W only
        volume = gaussian_filter(
            volume, sigma=plan.blur_sigma, radius=config.blur_kernel // 2, axes=(2, 3), mode="nearest"
        )
    if volume is slice_.volume:
        return slice_
    return slice_.with_volume(np.ascontiguousarray(volume, dtype=np.float32))


def flip_horizontal(slice_: Slice) -> Slice:
    return slice_.with_volume(np.ascontiguousarray(slice_.volume[..., ::-1]))


def shuffle_frames(slice_: Slice, seed: int, sample_index: int) -> Slice:
    """Permute the T axis; destroys temporal order while keeping every frame."""
    order = np.random.default_rng([seed, sample_index, 1]).permutation(slice_.volume.shape[1])
    return slice_.with_volume(np.ascontiguousarray(slice_.volume[:, order]))
