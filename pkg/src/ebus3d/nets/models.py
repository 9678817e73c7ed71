"""Res3D_U, Res3D_UD and Res3D_UDE: 3D slice encoders fused with elastography and mode attention.

All three heads share the same tail::

    f3d = linear(pool(enc3d(slice)))             # N×F
    s   = f3d + linear(pool(enc2d(elasto)))      # UDE only
    h   = s ⊙ linear(signal)                     # UD and UDE
    score = sigmoid(linear(h))                   # N
"""

import logging
from typing import List, NamedTuple, Optional, Sequence, Tuple, Type, Union

import numpy as np

from ..core.errors import DataError, ShapeError
from ..core.types import GraphicSignal, Variant
from ..tensor import Tensor, default_dtype, global_avg_pool, reshape, sigmoid
from .encoder import (
    INPUT_CHANNELS,
    Encoder,
    ResStageSpec,
    build_encoder_2d,
    build_encoder_3d,
    infer_encoder_shapes,
    residual_stages,
)
from .modules import Dense, Module

logger = logging.getLogger(__name__)

FEATURE_DIM = 1000
SIGNAL_DIM = 3

SignalLike = Union[GraphicSignal, Sequence[GraphicSignal], Tensor]


def signal_tensor(signal: SignalLike, batch: int) -> Tensor:
    """Stack graphic signals into an N×3 tensor, broadcasting a single signal over the batch."""
    if isinstance(signal, Tensor):
        values = signal.data
    elif isinstance(signal, GraphicSignal):
        values = np.tile(np.asarray(signal.as_list()), (batch, 1))
    else:
        values = np.asarray([s.as_list() for s in signal])
    if values.shape != (batch, SIGNAL_DIM):
        raise ShapeError(f"graphic signal must be {batch}×{SIGNAL_DIM}, got shape {values.shape}")
    return Tensor(values.astype(default_dtype()))


def _signals(signal: SignalLike) -> List[GraphicSignal]:
    if isinstance(signal, GraphicSignal):
        return [signal]
    if isinstance(signal, Tensor):
        return [GraphicSignal(*(int(v) for v in row)) for row in signal.data]
    return list(signal)


class FusionModel(Module):
    """Shared 3D pathway plus the sigmoid head; subclasses decide what gets fused in."""

    variant: Variant

    def __init__(
        self,
        stages: Sequence[ResStageSpec],
        feature_dim: int,
        rng: np.random.Generator,
        in_channels: int = INPUT_CHANNELS,
    ):
        super().__init__()
        self.feature_dim = feature_dim
        self.encoder3d = build_encoder_3d(stages, rng, in_channels)

    def _finish(self, feature_dim: int, rng: np.random.Generator) -> None:
        self.head = Dense(feature_dim, 1, rng)

    def _check_volume(self, volume: Tensor) -> None:
        if volume.ndim != 5:
            raise ShapeError(f"{self.name} expects slices shaped N×C×T×H×W, got {volume.shape}")

    @property
    def name(self) -> str:
        return f"Res3D_{self.variant.value}"

    def features_3d(self, volume: Tensor) -> Tensor:
        return self.proj3d(global_avg_pool(self.encoder3d(volume)))

    def score(self, fused: Tensor) -> Tensor:
        logits = self.head(fused)
        return sigmoid(reshape(logits, (logits.shape[0],)))

    def __call__(self, volume: Tensor, signal: Optional[SignalLike] = None, elasto: Optional[Tensor] = None) -> Tensor:
        raise NotImplementedError


class Res3DU(FusionModel):
    """Grayscale-only model: score = sigmoid(linear(f3d))."""

    variant = Variant.U

    def __init__(
        self,
        stages: Sequence[ResStageSpec],
        feature_dim: int,
        rng: np.random.Generator,
        in_channels: int = INPUT_CHANNELS,
    ):
        super().__init__(stages, feature_dim, rng, in_channels)
        self.proj3d = Dense(self.encoder3d.out_channels, feature_dim, rng)
        self._finish(feature_dim, rng)

    def __call__(self, volume: Tensor, signal: Optional[SignalLike] = None, elasto: Optional[Tensor] = None) -> Tensor:
        if elasto is not None:
            raise DataError("Res3D_U does not consume elastography images")
        if signal is not None and any(s.is_doppler for s in _signals(signal)):
            raise DataError("Res3D_U accepts grayscale slices only, got a Doppler slice")
        self._check_volume(volume)
        return self.score(self.features_3d(volume))


class Res3DUD(FusionModel):
    """Grayscale and Doppler slices gated by graphic-signal attention: h = f3d ⊙ w."""

    variant = Variant.UD

    def __init__(
        self,
        stages: Sequence[ResStageSpec],
        feature_dim: int,
        rng: np.random.Generator,
        in_channels: int = INPUT_CHANNELS,
    ):
        super().__init__(stages, feature_dim, rng, in_channels)
        self.proj3d = Dense(self.encoder3d.out_channels, feature_dim, rng)
        self.attention = Dense(SIGNAL_DIM, feature_dim, rng)
        self._finish(feature_dim, rng)

    def attention_weights(self, signal: Optional[SignalLike], batch: int) -> Tensor:
        if signal is None:
            raise DataError(f"{self.name} requires a graphic signal")
        return self.attention(signal_tensor(signal, batch))

    def __call__(self, volume: Tensor, signal: Optional[SignalLike] = None, elasto: Optional[Tensor] = None) -> Tensor:
        if elasto is not None:
            raise DataError("Res3D_UD does not consume elastography images")
        self._check_volume(volume)
        w = self.attention_weights(signal, volume.shape[0])
        return self.score(self.features_3d(volume) * w)


class Res3DUDE(Res3DUD):
    """Adds the 2D elastography pathway: h = (f3d + f2d) ⊙ w."""

    variant = Variant.UDE

    def __init__(
        self,
        stages: Sequence[ResStageSpec],
        feature_dim: int,
        rng: np.random.Generator,
        in_channels: int = INPUT_CHANNELS,
    ):
        FusionModel.__init__(self, stages, feature_dim, rng, in_channels)
        self.encoder2d: Encoder = build_encoder_2d(stages, rng, in_channels)
        self.proj3d = Dense(self.encoder3d.out_channels, feature_dim, rng)
        self.proj2d = Dense(self.encoder2d.out_channels, feature_dim, rng)
        self.attention = Dense(SIGNAL_DIM, feature_dim, rng)
        self._finish(feature_dim, rng)

    def features_2d(self, elasto: Tensor) -> Tensor:
        return self.proj2d(global_avg_pool(self.encoder2d(elasto)))

    def __call__(self, volume: Tensor, signal: Optional[SignalLike] = None, elasto: Optional[Tensor] = None) -> Tensor:
        self._check_volume(volume)
        n, c, _, height, width = volume.shape
        w = self.attention_weights(signal, n)
        if elasto is None:
            elasto = Tensor(np.zeros((n, c, height, width), dtype=default_dtype()))
        elif elasto.ndim != 4 or elasto.shape[0] != n:
            raise ShapeError(f"elastography input must be {n}×C×H×W, got {elasto.shape}")
        fused = self.features_3d(volume) + self.features_2d(elasto)
        return self.score(fused * w)


MODEL_CLASSES: dict = {Variant.U: Res3DU, Variant.UD: Res3DUD, Variant.UDE: Res3DUDE}


def _require(model: FusionModel, cls: Type[FusionModel]) -> None:
    if type(model) is not cls:
        raise DataError(f"expected a {cls.variant.value} model, got {model.name}")


def forward_u(
    model: FusionModel, volume: Tensor, signal: Optional[SignalLike] = None, elasto: Optional[Tensor] = None
) -> Tensor:
    _require(model, Res3DU)
    return model(volume, signal, elasto)


def forward_ud(model: FusionModel, volume: Tensor, signal: Optional[SignalLike]) -> Tensor:
    _require(model, Res3DUD)
    return model(volume, signal)


def forward_ude(model: FusionModel, volume: Tensor, elasto: Optional[Tensor], signal: Optional[SignalLike]) -> Tensor:
    """``elasto=None`` stands for the zero matrix used when a lesion has no elastography."""
    _require(model, Res3DUDE)
    return model(volume, signal, elasto)


def build_model(
    variant: Union[Variant, str],
    base_channels: int = 16,
    feature_dim: int = FEATURE_DIM,
    seed: int = 0,
    in_channels: int = INPUT_CHANNELS,
    stages: Optional[Sequence[ResStageSpec]] = None,
) -> FusionModel:
    """Build a freshly initialized model; parameters depend only on ``seed``."""
    variant = Variant(variant)
    stages = list(stages) if stages is not None else residual_stages(base_channels)
    rng = np.random.default_rng(seed)
    model: FusionModel = MODEL_CLASSES[variant](stages, feature_dim, rng, in_channels)
    logger.debug("built %s with %d parameters", model.name, model.parameter_count())
    return model


class ShapeRow(NamedTuple):
    path: str
    layer: str
    shape: Tuple[int, ...]


def describe_model_shapes(
    variant: Union[Variant, str],
    frame_size: Tuple[int, int] = (704, 576),
    frames: int = 24,
    base_channels: int = 16,
    feature_dim: int = FEATURE_DIM,
    batch: int = 1,
) -> List[ShapeRow]:
    """Layer-by-layer output shapes of a variant; no parameters are allocated.

    ``frame_size`` is width × height; tensors are laid out N×C×T×H×W.
    """
    variant = Variant(variant)
    width, height = frame_size
    stages = residual_stages(base_channels)
    rows: List[ShapeRow] = []

    def pathway(path: str, input_shape: Tuple[int, ...]) -> None:
        rows.append(ShapeRow(path, "input", input_shape))
        rows.extend(ShapeRow(path, layer, shape) for layer, shape in infer_encoder_shapes(stages, input_shape))
        rows.append(ShapeRow(path, "pool", (batch, stages[-1].out_channels)))
        rows.append(ShapeRow(path, "fc", (batch, feature_dim)))

    pathway("3d", (batch, INPUT_CHANNELS, frames, height, width))
    if variant.uses_elastography:
        pathway("2d", (batch, INPUT_CHANNELS, height, width))
        rows.append(ShapeRow("fusion", "add", (batch, feature_dim)))
    if variant.uses_signal:
        rows.append(ShapeRow("signal", "attention", (batch, feature_dim)))
        rows.append(ShapeRow("fusion", "multiply", (batch, feature_dim)))
    rows.append(ShapeRow("head", "fc_sigmoid", (batch, 1)))
    return rows
