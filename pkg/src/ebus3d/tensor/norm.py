"""Batch normalisation over the channel axis of N×C×... tensors."""

from typing import Optional, Tuple

import numpy as np

from ..core.errors import ShapeError
from .tensor import Function, Tensor

BN_EPS = 1e-5
BN_MOMENTUM = 0.1


class BatchNorm(Function):
    def forward(
        self,
        x: np.ndarray,
        scale: np.ndarray,
        shift: np.ndarray,
        *,
        running_mean: np.ndarray,
        running_var: np.ndarray,
        training: bool,
        momentum: float,
        eps: float,
    ) -> np.ndarray:
        axes = (0,) + tuple(range(2, x.ndim))
        view = (1, -1) + (1,) * (x.ndim - 2)
        self.axes, self.view, self.training = axes, view, training
        if training:
            count = x.size // x.shape[1]
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            unbiased = var * count / (count - 1) if count > 1 else var
            running_mean *= 1 - momentum
            running_mean += momentum * mean
            running_var *= 1 - momentum
            running_var += momentum * unbiased
            self.count = count
        else:
            mean, var = running_mean, running_var
        self.inv_std = (1.0 / np.sqrt(var + eps)).astype(x.dtype)
        self.xhat = (x - mean.reshape(view)) * self.inv_std.reshape(view)
        self.scale = scale
        return (self.xhat * scale.reshape(view) + shift.reshape(view)).astype(x.dtype, copy=False)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        axes, view = self.axes, self.view
        dscale = (grad * self.xhat).sum(axis=axes) if self.needs_grad(1) else None
        dshift = grad.sum(axis=axes) if self.needs_grad(2) else None
        dx = None
        if self.needs_grad(0):
            dxhat = grad * self.scale.reshape(view)
            inv_std = self.inv_std.reshape(view)
            if self.training:
                m = self.count
                dx = inv_std / m * (
                    m * dxhat
                    - dxhat.sum(axis=axes).reshape(view)
                    - self.xhat * (dxhat * self.xhat).sum(axis=axes).reshape(view)
                )
            else:
                dx = dxhat * inv_std
        return dx, dscale, dshift


def batch_norm(
    x: Tensor,
    scale: Tensor,
    shift: Tensor,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    training: bool,
    momentum: float = BN_MOMENTUM,
    eps: float = BN_EPS,
) -> Tensor:
    """Normalise per channel; training mode also updates the running statistics in place."""
    if x.ndim < 2:
        raise ShapeError(f"batch_norm input must be N×C×..., got shape {x.shape}")
    channels = x.shape[1]
    shapes = {
        "scale": scale.shape,
        "shift": shift.shape,
        "running_mean": running_mean.shape,
        "running_var": running_var.shape,
    }
    for name, value in shapes.items():
        if value != (channels,):
            raise ShapeError(f"batch_norm: channel axis C has {channels} channels but {name} has shape {value}")
    return BatchNorm.apply(
        x,
        scale,
        shift,
        running_mean=running_mean,
        running_var=running_var,
        training=training,
        momentum=momentum,
        eps=eps,
    )
