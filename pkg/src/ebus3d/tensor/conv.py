"""N-dimensional convolution (2D and 3D) with zero padding and stride.

The forward pass accumulates one matrix product per kernel offset over a
strided window of the padded input, so no im2col buffer the size of
kernel × output is ever materialised. The backward pass mirrors it, scattering
input gradients back through the same windows.
"""

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.errors import ShapeError
from .tensor import Function, Tensor

AXIS_NAMES = {2: ("H", "W"), 3: ("T", "H", "W")}


def _expand(value: "int | Sequence[int]", ndim: int) -> Tuple[int, ...]:
    if isinstance(value, int):
        return (value,) * ndim
    value = tuple(int(v) for v in value)
    if len(value) != ndim:
        raise ShapeError(f"expected {ndim} per-axis values, got {value}")
    return value


@dataclass(frozen=True)
class ConvSpec:
    """Kernel, stride and zero padding per spatial/temporal axis."""

    kernel: Tuple[int, ...]
    stride: Tuple[int, ...]
    padding: Tuple[int, ...]
    in_channels: int
    out_channels: int

    def __post_init__(self) -> None:
        if not (len(self.kernel) == len(self.stride) == len(self.padding)):
            raise ShapeError(f"kernel/stride/padding ranks differ: {self.kernel}, {self.stride}, {self.padding}")
        if len(self.kernel) not in AXIS_NAMES:
            raise ShapeError(f"only 2D and 3D convolutions are supported, got rank {len(self.kernel)}")
        if min(self.kernel) < 1 or min(self.stride) < 1 or min(self.padding) < 0:
            raise ShapeError(f"invalid ConvSpec: kernel={self.kernel} stride={self.stride} padding={self.padding}")
        if self.in_channels < 1 or self.out_channels < 1:
            raise ShapeError(f"invalid channel counts {self.in_channels}->{self.out_channels}")

    @classmethod
    def cube(
        cls,
        ndim: int,
        kernel: "int | Sequence[int]",
        in_channels: int,
        out_channels: int,
        stride: "int | Sequence[int]" = 1,
        padding: "int | Sequence[int]" = 0,
    ) -> "ConvSpec":
        return cls(_expand(kernel, ndim), _expand(stride, ndim), _expand(padding, ndim), in_channels, out_channels)

    @property
    def ndim(self) -> int:
        return len(self.kernel)

    @property
    def axis_names(self) -> Tuple[str, ...]:
        return AXIS_NAMES[self.ndim]

    @property
    def weight_shape(self) -> Tuple[int, ...]:
        return (self.out_channels, self.in_channels) + self.kernel

    def output_extents(self, extents: Sequence[int]) -> Tuple[int, ...]:
        return conv_output_shape(extents, self)


def conv_output_shape(extents: Sequence[int], spec: ConvSpec) -> Tuple[int, ...]:
    """floor((in + 2·pad − kernel)/stride) + 1 per axis."""
    if len(extents) != spec.ndim:
        raise ShapeError(f"expected {spec.ndim} spatial extents ({', '.join(spec.axis_names)}), got {tuple(extents)}")
    out = []
    for name, size, k, s, p in zip(spec.axis_names, extents, spec.kernel, spec.stride, spec.padding):
        extent = (size + 2 * p - k) // s + 1
        if extent < 1:
            raise ShapeError(f"axis {name}: extent {size} with kernel {k}, padding {p}, stride {s} leaves no output")
        out.append(extent)
    return tuple(out)


def _window(offset: Tuple[int, ...], out_extents: Tuple[int, ...], stride: Tuple[int, ...]) -> Tuple[slice, ...]:
    return (slice(None), slice(None)) + tuple(
        slice(o, o + s * (n - 1) + 1, s) for o, n, s in zip(offset, out_extents, stride)
    )


class ConvND(Function):
    def forward(self, x: np.ndarray, w: np.ndarray, *bias: np.ndarray, spec: ConvSpec) -> np.ndarray:
        self.spec = spec
        self.input_shape = x.shape
        pads = [(0, 0), (0, 0)] + [(p, p) for p in spec.padding]
        xp = np.pad(x, pads) if any(spec.padding) else x
        out_extents = spec.output_extents(x.shape[2:])
        n, c = x.shape[:2]
        out = np.zeros((n, spec.out_channels, int(np.prod(out_extents))), dtype=x.dtype)
        for offset in product(*(range(k) for k in spec.kernel)):
            window = xp[_window(offset, out_extents, spec.stride)].reshape(n, c, -1)
            out += np.matmul(w[(slice(None), slice(None)) + offset], window)
        if bias:
            out += bias[0][None, :, None]
        self.xp, self.w, self.out_extents = xp, w, out_extents
        return out.reshape((n, spec.out_channels) + out_extents)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        spec = self.spec
        n, c = self.input_shape[:2]
        g = grad.reshape(n, spec.out_channels, -1)
        dw = np.zeros_like(self.w) if self.needs_grad(1) else None
        dxp = np.zeros_like(self.xp) if self.needs_grad(0) else None
        for offset in product(*(range(k) for k in spec.kernel)):
            win = _window(offset, self.out_extents, spec.stride)
            idx = (slice(None), slice(None)) + offset
            if dw is not None:
                window = self.xp[win].reshape(n, c, -1)
                dw[idx] = np.tensordot(g, window, axes=([0, 2], [0, 2]))
            if dxp is not None:
                dxp[win] += np.matmul(self.w[idx].T, g).reshape((n, c) + self.out_extents)
        dx = None
        if dxp is not None:
            inner = tuple(slice(p, p + e) for p, e in zip(spec.padding, self.input_shape[2:]))
            dx = dxp[(slice(None), slice(None)) + inner]
        grads: Tuple[Optional[np.ndarray], ...] = (dx, dw)
        if len(self.inputs) == 3:
            grads += (g.sum(axis=(0, 2)) if self.needs_grad(2) else None,)
        return grads


def _conv(name: str, ndim: int, x: Tensor, spec: ConvSpec, weights: Tensor, bias: Optional[Tensor]) -> Tensor:
    if spec.ndim != ndim:
        raise ShapeError(f"{name} needs a {ndim}D ConvSpec, got kernel {spec.kernel}")
    layout = "N×C×" + "×".join(spec.axis_names)
    if x.ndim != ndim + 2:
        raise ShapeError(f"{name} input must be {layout}, got shape {x.shape}")
    if x.shape[1] != spec.in_channels:
        raise ShapeError(f"{name}: input channel axis C has {x.shape[1]} channels, expected {spec.in_channels}")
    if weights.shape != spec.weight_shape:
        labels = ("out_ch", "in_ch") + tuple(f"k{a}" for a in spec.axis_names)
        axis = next(
            (label for label, got, want in zip(labels, weights.shape, spec.weight_shape) if got != want),
            "rank",
        )
        raise ShapeError(f"{name}: weight axis {axis} mismatch, expected {spec.weight_shape}, got {weights.shape}")
    spec.output_extents(x.shape[2:])
    if bias is None:
        return ConvND.apply(x, weights, spec=spec)
    if bias.shape != (spec.out_channels,):
        raise ShapeError(f"{name}: bias must have shape ({spec.out_channels},), got {bias.shape}")
    return ConvND.apply(x, weights, bias, spec=spec)


def conv3d(x: Tensor, spec: ConvSpec, weights: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """3D convolution over N×C×T×H×W."""
    return _conv("conv3d", 3, x, spec, weights, bias)


def conv2d(x: Tensor, spec: ConvSpec, weights: Tensor, bias: Optional[Tensor] = None) -> Tensor:
    """2D convolution over N×C×H×W."""
    return _conv("conv2d", 2, x, spec, weights, bias)
