"""Tensor arithmetic with reverse-mode autodiff, network operators and SGD."""

from .tensor import Function, Tensor, as_tensor, default_dtype, grad_enabled, no_grad, parameter, precision
from .ops import (
    BCE_EPS,
    add,
    bce_loss,
    global_avg_pool,
    linear,
    mean_all,
    mul,
    record_relu_masks,
    relu,
    reshape,
    sigmoid,
    sum_all,
)
from .conv import ConvSpec, conv2d, conv3d, conv_output_shape
from .norm import BN_EPS, BN_MOMENTUM, batch_norm
from .optim import SGD, CosineSchedule, SgdConfig, sgd_step
from .gradcheck import GradcheckReport, gradcheck

__all__ = [
    "Function",
    "Tensor",
    "as_tensor",
    "default_dtype",
    "grad_enabled",
    "no_grad",
    "parameter",
    "precision",
    "BCE_EPS",
    "add",
    "bce_loss",
    "global_avg_pool",
    "linear",
    "mean_all",
    "mul",
    "record_relu_masks",
    "relu",
    "reshape",
    "sigmoid",
    "sum_all",
    "ConvSpec",
    "conv2d",
    "conv3d",
    "conv_output_shape",
    "BN_EPS",
    "BN_MOMENTUM",
    "batch_norm",
    "SGD",
    "CosineSchedule",
    "SgdConfig",
    "sgd_step",
    "GradcheckReport",
    "gradcheck",
]
