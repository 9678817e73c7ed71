"""Tensor with reverse-mode automatic differentiation.

A ``Tensor`` wraps a contiguous NumPy array. Operations are ``Function``
subclasses; ``Function.apply`` runs the forward pass on raw arrays and links
the output to its inputs when gradients are required. ``Tensor.backward``
walks that graph in reverse topological order.
"""

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..core.errors import GradientError, NumericalError, ShapeError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[Any]]

_DTYPE: ContextVar[np.dtype] = ContextVar("ebus3d_dtype", default=np.dtype(np.float32))
_GRAD_ENABLED: ContextVar[bool] = ContextVar("ebus3d_grad_enabled", default=True)


def default_dtype() -> np.dtype:
    """Floating dtype new tensors are created with."""
    return _DTYPE.get()


@contextmanager
def precision(dtype: Any) -> Iterator[np.dtype]:
    """Create tensors with ``dtype`` inside the block (float64 for gradient checks)."""
    resolved = np.dtype(dtype)
    if resolved.kind != "f":
        raise ValueError(f"precision must be a floating dtype, got {resolved}")
    token = _DTYPE.set(resolved)
    try:
        yield resolved
    finally:
        _DTYPE.reset(token)


def grad_enabled() -> bool:
    return _GRAD_ENABLED.get()


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph recording inside the block."""
    token = _GRAD_ENABLED.set(False)
    try:
        yield
    finally:
        _GRAD_ENABLED.reset(token)


class Function:
    """Base class for differentiable operations.

    ``forward`` receives the input arrays (plus keyword options) and returns
    the output array. ``backward`` receives dL/d(output) and returns one
    gradient per input, or ``None`` for inputs that need none.
    """

    def __init__(self, *inputs: "Tensor"):
        self.inputs = inputs

    def forward(self, *arrays: np.ndarray, **kwargs: Any) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__}.forward")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        raise NotImplementedError(f"{type(self).__name__}.backward")

    def needs_grad(self, index: int) -> bool:
        return self.inputs[index].requires_grad

    @classmethod
    def apply(cls, *inputs: "Tensor", **kwargs: Any) -> "Tensor":
        fn = cls(*inputs)
        out = fn.forward(*(t.data for t in inputs), **kwargs)
        if not np.all(np.isfinite(out)):
            raise NumericalError(f"non-finite output from {cls.__name__}")
        track = grad_enabled() and any(t.requires_grad for t in inputs)
        return Tensor(out, requires_grad=track, dtype=out.dtype, _creator=fn if track else None)


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum out broadcast axes so ``grad`` matches ``shape``."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """N-dimensional real array with an optional gradient."""

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        dtype: Any = None,
        _creator: Optional[Function] = None,
    ):
        self.data = np.ascontiguousarray(data, dtype=dtype if dtype is not None else default_dtype())
        self.requires_grad = requires_grad
        self.grad: Optional[np.ndarray] = None
        self._creator = _creator

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return self._creator is None

    def item(self) -> float:
        if self.size != 1:
            raise ShapeError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data, dtype=self.dtype)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}{flag})"

    def _topological_order(self) -> List["Tensor"]:
        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            if node._creator is not None:
                for parent in node._creator.inputs:
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return order

    def backward(self) -> None:
        """Populate ``grad`` of every leaf tensor that requires it.

        Gradients accumulate across calls until ``zero_grad``.
        """
        if self.size != 1:
            raise GradientError(f"backward() needs a scalar loss, got shape {self.shape}")
        if not self.requires_grad:
            raise GradientError("backward() on a tensor that does not require grad")

        grads = {id(self): np.ones_like(self.data)}
        for node in reversed(self._topological_order()):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            if node._creator is None:
                node.grad = grad.copy() if node.grad is None else node.grad + grad
                continue
            input_grads = node._creator.backward(grad)
            for parent, parent_grad in zip(node._creator.inputs, input_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                parent_grad = unbroadcast(np.asarray(parent_grad, dtype=parent.dtype), parent.shape)
                if not np.all(np.isfinite(parent_grad)):
                    raise NumericalError(f"non-finite gradient through {type(node._creator).__name__}")
                if id(parent) in grads:
                    grads[id(parent)] = grads[id(parent)] + parent_grad
                else:
                    grads[id(parent)] = parent_grad

    def __add__(self, other: Union["Tensor", float]) -> "Tensor":
        from .ops import add

        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other: Union["Tensor", float]) -> "Tensor":
        from .ops import mul

        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> "Tensor":
        return self * -1.0

    def __sub__(self, other: Union["Tensor", float]) -> "Tensor":
        return self + (-other if isinstance(other, Tensor) else -float(other))

    def sum(self) -> "Tensor":
        from .ops import sum_all

        return sum_all(self)

    def mean(self) -> "Tensor":
        from .ops import mean_all

        return mean_all(self)

    def reshape(self, *shape: int) -> "Tensor":
        from .ops import reshape

        return reshape(self, shape)


def as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def parameter(data: ArrayLike) -> Tensor:
    """Leaf tensor that requires grad."""
    return Tensor(data, requires_grad=True)
