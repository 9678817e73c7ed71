"""Elementwise, reduction, dense and loss operators."""

from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from ..core.errors import ShapeError
from .tensor import Function, Tensor, as_tensor

BCE_EPS = 1e-7

_KINKS: ContextVar[Optional[List[np.ndarray]]] = ContextVar("ebus3d_relu_masks", default=None)


@contextmanager
def record_relu_masks() -> Iterator[List[np.ndarray]]:
    """Collect the activation mask of every ReLU evaluated inside the block."""
    masks: List[np.ndarray] = []
    token = _KINKS.set(masks)
    try:
        yield masks
    finally:
        _KINKS.reset(token)


class Add(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a + b

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return grad, grad


class Mul(Function):
    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.a, self.b = a, b
        return a * b

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (
            grad * self.b if self.needs_grad(0) else None,
            grad * self.a if self.needs_grad(1) else None,
        )


class SumAll(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.shape = x.shape
        return np.asarray(x.sum(), dtype=x.dtype)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (np.broadcast_to(grad, self.shape).copy(),)


class Reshape(Function):
    def forward(self, x: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        self.shape = x.shape
        return x.reshape(shape)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (grad.reshape(self.shape),)


class ReLU(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.mask = x > 0
        masks = _KINKS.get()
        if masks is not None:
            masks.append(self.mask)
        return np.where(self.mask, x, 0).astype(x.dtype, copy=False)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (grad * self.mask,)


class Sigmoid(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.out = expit(x).astype(x.dtype, copy=False)
        return self.out

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (grad * self.out * (1 - self.out),)


class GlobalAvgPool(Function):
    def forward(self, x: np.ndarray) -> np.ndarray:
        self.shape = x.shape
        self.count = int(np.prod(x.shape[2:]))
        return x.reshape(x.shape[0], x.shape[1], -1).mean(axis=2)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        expanded = grad.reshape(grad.shape + (1,) * (len(self.shape) - 2)) / self.count
        return (np.broadcast_to(expanded, self.shape).copy(),)


class Linear(Function):
    def forward(self, x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.x, self.w = x, w
        return x @ w.T + b

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        return (
            grad @ self.w if self.needs_grad(0) else None,
            grad.T @ self.x if self.needs_grad(1) else None,
            grad.sum(axis=0) if self.needs_grad(2) else None,
        )


class BinaryCrossEntropy(Function):
    def forward(self, p: np.ndarray, y: np.ndarray) -> np.ndarray:
        self.p = np.clip(p, BCE_EPS, 1 - BCE_EPS)
        self.y = y
        loss = -(y * np.log(self.p) + (1 - y) * np.log(1 - self.p))
        return np.asarray(loss.mean(), dtype=p.dtype)

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        dp = (self.p - self.y) / (self.p * (1 - self.p)) / self.p.size
        return grad * dp, None


def _binary(a: Union[Tensor, float], b: Union[Tensor, float]) -> Tuple[Tensor, Tensor]:
    left, right = as_tensor(a), as_tensor(b)
    try:
        np.broadcast_shapes(left.shape, right.shape)
    except ValueError:
        raise ShapeError(f"cannot broadcast shapes {left.shape} and {right.shape}") from None
    return left, right


def add(a: Union[Tensor, float], b: Union[Tensor, float]) -> Tensor:
    return Add.apply(*_binary(a, b))


def mul(a: Union[Tensor, float], b: Union[Tensor, float]) -> Tensor:
    return Mul.apply(*_binary(a, b))


def sum_all(x: Tensor) -> Tensor:
    return SumAll.apply(x)


def mean_all(x: Tensor) -> Tensor:
    return SumAll.apply(x) * (1.0 / x.size)


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    return Reshape.apply(x, shape=tuple(shape))


def relu(x: Tensor) -> Tensor:
    return ReLU.apply(x)


def sigmoid(x: Tensor) -> Tensor:
    return Sigmoid.apply(x)


def global_avg_pool(x: Tensor) -> Tensor:
    """Mean over every axis after batch and channel: N×C×... -> N×C."""
    if x.ndim < 3:
        raise ShapeError(f"global_avg_pool needs rank >= 3, got shape {x.shape}")
    return GlobalAvgPool.apply(x)


def linear(x: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Affine map N×F_in -> N×F_out with weights F_out×F_in."""
    if x.ndim != 2:
        raise ShapeError(f"linear input must be N×F, got shape {x.shape}")
    if weights.ndim != 2 or weights.shape[1] != x.shape[1]:
        raise ShapeError(
            f"linear: input feature axis has {x.shape[1]} features, "
            f"weights expect shape (F_out, {x.shape[1]}), got {weights.shape}"
        )
    if bias.shape != (weights.shape[0],):
        raise ShapeError(f"linear: bias must have shape ({weights.shape[0]},), got {bias.shape}")
    return Linear.apply(x, weights, bias)


def bce_loss(score: Tensor, label: Union[Tensor, float, Sequence[float]]) -> Tensor:
    """Mean binary cross-entropy with the score clamped to [1e-7, 1 - 1e-7]."""
    if isinstance(label, Tensor):
        target = label
    else:
        target = Tensor(np.broadcast_to(np.asarray(label, dtype=score.dtype), score.shape))
    if target.shape != score.shape:
        raise ShapeError(f"bce_loss: label shape {target.shape} differs from score shape {score.shape}")
    return BinaryCrossEntropy.apply(score, target)
