"""Parameter containers: the layer building blocks of the encoders and heads."""

from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from ..tensor import ConvSpec, Tensor, batch_norm, conv2d, conv3d, default_dtype, linear


class Module:
    """Ordered registry of parameters, buffers and child modules."""

    def __init__(self) -> None:
        object.__setattr__(self, "_params", {})
        object.__setattr__(self, "_buffers", {})
        object.__setattr__(self, "_children", {})
        object.__setattr__(self, "training", True)

    def __setattr__(self, name: str, value: object) -> None:
        if isinstance(value, Tensor) and value.requires_grad:
            self._params[name] = value
        elif isinstance(value, Module):
            self._children[name] = value
        object.__setattr__(self, name, value)

    def register_buffer(self, name: str, value: np.ndarray) -> None:
        self._buffers[name] = value
        object.__setattr__(self, name, value)

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Tensor]]:
        for name, param in self._params.items():
            yield prefix + name, param
        for name, child in self._children.items():
            yield from child.named_parameters(f"{prefix}{name}.")

    def named_buffers(self, prefix: str = "") -> Iterator[Tuple[str, np.ndarray]]:
        for name, buf in self._buffers.items():
            yield prefix + name, buf
        for name, child in self._children.items():
            yield from child.named_buffers(f"{prefix}{name}.")

    def parameters(self) -> List[Tensor]:
        return [p for _, p in self.named_parameters()]

    def state(self) -> List[Tuple[str, np.ndarray]]:
        """Parameters then buffers, in registration order; this is what checkpoints store."""
        return [(n, p.data) for n, p in self.named_parameters()] + list(self.named_buffers())

    def parameter_count(self) -> int:
        return sum(p.size for p in self.parameters())

    def train(self, mode: bool = True) -> "Module":
        object.__setattr__(self, "training", mode)
        for child in self._children.values():
            child.train(mode)
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.grad = None


def he_normal(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int) -> Tensor:
    """Fan-in scaled normal init: std = sqrt(2 / fan_in)."""
    values = rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)
    return Tensor(values.astype(default_dtype()), requires_grad=True)


def zeros_param(shape: Tuple[int, ...]) -> Tensor:
    return Tensor(np.zeros(shape, dtype=default_dtype()), requires_grad=True)


class Conv(Module):
    """Convolution layer, 2D or 3D by the rank of its ConvSpec."""

    def __init__(self, spec: ConvSpec, rng: np.random.Generator, bias: bool = False):
        super().__init__()
        self.spec = spec
        fan_in = spec.in_channels * int(np.prod(spec.kernel))
        self.weight = he_normal(rng, spec.weight_shape, fan_in)
        self.bias: Optional[Tensor] = zeros_param((spec.out_channels,)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        op = conv3d if self.spec.ndim == 3 else conv2d
        return op(x, self.spec, self.weight, self.bias)


class BatchNorm(Module):
    """Per-channel scale/shift with running statistics kept as buffers."""

    def __init__(self, channels: int):
        super().__init__()
        dtype = default_dtype()
        self.scale = Tensor(np.ones(channels, dtype=dtype), requires_grad=True)
        self.shift = zeros_param((channels,))
        self.register_buffer("running_mean", np.zeros(channels, dtype=dtype))
        self.register_buffer("running_var", np.ones(channels, dtype=dtype))

    def __call__(self, x: Tensor) -> Tensor:
        return batch_norm(x, self.scale, self.shift, self.running_mean, self.running_var, self.training)


class Dense(Module):
    """Fully connected layer with bias."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator):
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.weight = he_normal(rng, (out_features, in_features), in_features)
        self.bias = zeros_param((out_features,))

    def __call__(self, x: Tensor) -> Tensor:
        return linear(x, self.weight, self.bias)


def load_state(module: Module, values: Dict[str, np.ndarray]) -> None:
    """Copy named arrays into a module's parameters and buffers in place."""
    for name, param in module.named_parameters():
        param.data = np.ascontiguousarray(values[name], dtype=param.dtype).reshape(param.shape)
        param.grad = None
    for name, buf in module.named_buffers():
        buf[...] = values[name]
