"""Residual encoders, fusion heads and checkpoint serialization."""

from .modules import BatchNorm, Conv, Dense, Module, he_normal, load_state
from .encoder import (
    Encoder,
    ResidualBlock,
    ResStageSpec,
    build_encoder_2d,
    build_encoder_3d,
    encoder_parameter_count,
    infer_encoder_shapes,
    residual_stages,
)
from .models import (
    FEATURE_DIM,
    FusionModel,
    Res3DU,
    Res3DUD,
    Res3DUDE,
    ShapeRow,
    build_model,
    describe_model_shapes,
    forward_u,
    forward_ud,
    forward_ude,
    signal_tensor,
)
from .checkpoint import FORMAT_VERSION, MAGIC, Checkpoint, load_checkpoint, save_checkpoint

__all__ = [
    "BatchNorm",
    "Conv",
    "Dense",
    "Module",
    "he_normal",
    "load_state",
    "Encoder",
    "ResidualBlock",
    "ResStageSpec",
    "build_encoder_2d",
    "build_encoder_3d",
    "encoder_parameter_count",
    "infer_encoder_shapes",
    "residual_stages",
    "FEATURE_DIM",
    "FusionModel",
    "Res3DU",
    "Res3DUD",
    "Res3DUDE",
    "ShapeRow",
    "build_model",
    "describe_model_shapes",
    "forward_u",
    "forward_ud",
    "forward_ude",
    "signal_tensor",
    "FORMAT_VERSION",
    "MAGIC",
    "Checkpoint",
    "load_checkpoint",
    "save_checkpoint",
]
