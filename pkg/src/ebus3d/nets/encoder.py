"""Residual encoders for the 3D (slice) and 2D (elastography) pathways."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ShapeError
from ..tensor import ConvSpec, Tensor, relu
from .modules import BatchNorm, Conv, Module

STEM_KERNEL = 5
INPUT_CHANNELS = 3


@dataclass(frozen=True)
class ResStageSpec:
    """One residual stage: two k-kernels, in->in (strided) then in->out."""

    in_channels: int
    out_channels: int
    kernel: int = 3
    spatial_downsample: int = 2
    temporal_downsample: int = 1

    def stride(self, ndim: int) -> Tuple[int, ...]:
        spatial = (self.spatial_downsample,) * 2
        return (self.temporal_downsample,) + spatial if ndim == 3 else spatial

    def changes_shape(self) -> bool:
        return self.in_channels != self.out_channels or self.spatial_downsample != 1 or self.temporal_downsample != 1


def residual_stages(base_channels: int = 16) -> List[ResStageSpec]:
    """Six residual stages; base 16 gives (16,16), (16,32) ... (256,512)."""
    if base_channels < 1:
        raise ShapeError(f"base_channels must be positive, got {base_channels}")
    widths = [base_channels] + [base_channels * 2**i for i in range(6)]
    return [ResStageSpec(widths[i], widths[i + 1]) for i in range(6)]


def stem_spec(ndim: int, in_channels: int, out_channels: int) -> ConvSpec:
    return ConvSpec.cube(ndim, STEM_KERNEL, in_channels, out_channels, stride=1, padding=STEM_KERNEL // 2)


def block_specs(stage: ResStageSpec, ndim: int) -> Tuple[ConvSpec, ConvSpec, Optional[ConvSpec]]:
    """conv_a, conv_b and the projection skip (None for an identity skip)."""
    stride = stage.stride(ndim)
    pad = stage.kernel // 2
    conv_a = ConvSpec.cube(ndim, stage.kernel, stage.in_channels, stage.in_channels, stride=stride, padding=pad)
    conv_b = ConvSpec.cube(ndim, stage.kernel, stage.in_channels, stage.out_channels, stride=1, padding=pad)
    skip = None
    if stage.changes_shape():
        skip = ConvSpec.cube(ndim, 1, stage.in_channels, stage.out_channels, stride=stride, padding=0)
    return conv_a, conv_b, skip


def check_stage_chain(stages: Sequence[ResStageSpec], stem_channels: int) -> None:
    if not stages:
        raise ShapeError("an encoder needs at least one residual stage")
    expected = stem_channels
    for index, stage in enumerate(stages, start=1):
        if stage.in_channels != expected:
            raise ShapeError(
                f"inconsistent channels: stage Res{index} expects {stage.in_channels} input channels, "
                f"previous layer gives {expected}"
            )
        expected = stage.out_channels


def infer_encoder_shapes(
    stages: Sequence[ResStageSpec],
    input_shape: Sequence[int],
    stem_channels: Optional[int] = None,
) -> List[Tuple[str, Tuple[int, ...]]]:
    """Per-layer output shapes without allocating parameters."""
    ndim = len(input_shape) - 2
    if ndim not in (2, 3):
        raise ShapeError(f"encoder input must be N×C×H×W or N×C×T×H×W, got {tuple(input_shape)}")
    stem_channels = stages[0].in_channels if stem_channels is None else stem_channels
    check_stage_chain(stages, stem_channels)
    n, c = input_shape[0], input_shape[1]
    spec = stem_spec(ndim, c, stem_channels)
    extents = spec.output_extents(input_shape[2:])
    rows = [("conv1", (n, stem_channels) + extents)]
    for index, stage in enumerate(stages, start=1):
        conv_a, conv_b, skip = block_specs(stage, ndim)
        inner = conv_a.output_extents(extents)
        out = conv_b.output_extents(inner)
        if skip is not None and skip.output_extents(extents) != out:
            raise ShapeError(f"stage Res{index}: skip path extents {skip.output_extents(extents)} differ from {out}")
        extents = out
        rows.append((f"res{index}", (n, stage.out_channels) + extents))
    return rows


class ResidualBlock(Module):
    """conv-BN-ReLU, conv-BN, add skip, ReLU."""

    def __init__(self, stage: ResStageSpec, ndim: int, rng: np.random.Generator):
        super().__init__()
        self.stage = stage
        conv_a, conv_b, skip = block_specs(stage, ndim)
        self.conv_a = Conv(conv_a, rng)
        self.bn_a = BatchNorm(conv_a.out_channels)
        self.conv_b = Conv(conv_b, rng)
        self.bn_b = BatchNorm(conv_b.out_channels)
        self.skip: Optional[Conv] = Conv(skip, rng) if skip is not None else None
        self.bn_skip: Optional[BatchNorm] = BatchNorm(skip.out_channels) if skip is not None else None

    def __call__(self, x: Tensor) -> Tensor:
        out = relu(self.bn_a(self.conv_a(x)))
        out = self.bn_b(self.conv_b(out))
        shortcut = x if self.skip is None else self.bn_skip(self.skip(x))
        return relu(out + shortcut)


class Encoder(Module):
    """Stem conv (5-kernel, stride 1) followed by residual stages."""

    def __init__(
        self, ndim: int, stages: Sequence[ResStageSpec], rng: np.random.Generator, in_channels: int = INPUT_CHANNELS
    ):
        super().__init__()
        self.ndim = ndim
        self.in_channels = in_channels
        self.stages = list(stages)
        check_stage_chain(self.stages, self.stages[0].in_channels)
        spec = stem_spec(ndim, in_channels, self.stages[0].in_channels)
        self.stem = Conv(spec, rng)
        self.stem_bn = BatchNorm(spec.out_channels)
        self.blocks: List[ResidualBlock] = []
        for index, stage in enumerate(self.stages, start=1):
            block = ResidualBlock(stage, ndim, rng)
            setattr(self, f"res{index}", block)
            self.blocks.append(block)

    @property
    def out_channels(self) -> int:
        return self.stages[-1].out_channels

    def output_shapes(self, input_shape: Sequence[int]) -> List[Tuple[str, Tuple[int, ...]]]:
        if len(input_shape) != self.ndim + 2:
            raise ShapeError(f"{self.ndim}D encoder input must have rank {self.ndim + 2}, got {tuple(input_shape)}")
        return infer_encoder_shapes(self.stages, input_shape)

    def __call__(self, x: Tensor) -> Tensor:
        if x.ndim != self.ndim + 2:
            raise ShapeError(f"{self.ndim}D encoder input must have rank {self.ndim + 2}, got shape {x.shape}")
        out = relu(self.stem_bn(self.stem(x)))
        for block in self.blocks:
            out = block(out)
        return out


def build_encoder_3d(
    stages: Sequence[ResStageSpec], rng: np.random.Generator, in_channels: int = INPUT_CHANNELS
) -> Encoder:
    """N×3×T×H×W -> N×C_last×T×H/2^k×W/2^k."""
    return Encoder(3, stages, rng, in_channels)


def build_encoder_2d(
    stages: Sequence[ResStageSpec], rng: np.random.Generator, in_channels: int = INPUT_CHANNELS
) -> Encoder:
    """N×3×H×W -> N×C_last×H/2^k×W/2^k."""
    return Encoder(2, stages, rng, in_channels)


def encoder_parameter_count(stages: Sequence[ResStageSpec], ndim: int, in_channels: int = INPUT_CHANNELS) -> int:
    """Closed-form trainable parameter count (conv weights plus BN scale/shift)."""
    stem = stem_spec(ndim, in_channels, stages[0].in_channels)
    total = int(np.prod(stem.weight_shape)) + 2 * stem.out_channels
    for stage in stages:
        for spec in block_specs(stage, ndim):
            if spec is not None:
                total += int(np.prod(spec.weight_shape)) + 2 * spec.out_channels
    return total
