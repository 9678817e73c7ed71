"""SGD with cosine learning-rate decay and gradient accumulation."""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

from ..core.errors import GradientError
from .tensor import Tensor

logger = logging.getLogger(__name__)


@dataclass
class CosineSchedule:
    """Half-cosine decay from ``lr0`` to zero over ``total_steps``, no restarts."""

    lr0: float = 1e-4
    total_steps: int = 1
    current_step: int = 0

    def __post_init__(self) -> None:
        if self.total_steps < 1:
            raise ValueError(f"total_steps must be positive, got {self.total_steps}")
        if self.lr0 < 0:
            raise ValueError(f"lr0 must be non-negative, got {self.lr0}")

    def lr(self, step: Optional[int] = None) -> float:
        t = self.current_step if step is None else step
        t = min(max(t, 0), self.total_steps)
        return self.lr0 * 0.5 * (1.0 + math.cos(math.pi * t / self.total_steps))

    def advance(self) -> None:
        self.current_step += 1


@dataclass
class SgdConfig:
    schedule: CosineSchedule = field(default_factory=CosineSchedule)
    accumulation: int = 12
    loss: str = "bce"

    def __post_init__(self) -> None:
        if self.accumulation < 1:
            raise ValueError(f"accumulation must be positive, got {self.accumulation}")
        if self.loss != "bce":
            raise ValueError(f"unsupported loss: {self.loss}")


def sgd_step(params: Sequence[Tensor], config: SgdConfig, samples: Optional[int] = None) -> float:
    """p <- p - lr(t) · grad / samples; zero grads; advance the schedule.

    Gradients hold the sum over ``samples`` accumulated backward passes, so the
    update uses their mean. Returns the learning rate that was applied.
    """
    count = config.accumulation if samples is None else samples
    if count < 1:
        raise GradientError("sgd_step with no accumulated samples")
    with_grad = [p for p in params if p.grad is not None]
    if not with_grad:
        raise GradientError("sgd_step called with empty gradients")
    lr = config.schedule.lr()
    factor = lr / count
    for p in with_grad:
        p.data -= (factor * p.grad).astype(p.dtype, copy=False)
        p.grad = None
    config.schedule.advance()
    return lr


class SGD:
    """Streams single-sample gradients and steps once per ``accumulation`` samples."""

    def __init__(self, params: Sequence[Tensor], config: SgdConfig):
        self.params: List[Tensor] = list(params)
        self.config = config
        self.pending = 0
        self.steps_taken = 0

    @property
    def schedule(self) -> CosineSchedule:
        return self.config.schedule

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def observe_sample(self) -> Optional[float]:
        """Count one backward pass; step when the accumulation window is full.

        Returns the applied learning rate when a step happened.
        """
        self.pending += 1
        if self.pending == self.config.accumulation:
            return self.step()
        return None

    def flush(self) -> Optional[float]:
        """Step on a partially filled window, averaging over what was accumulated."""
        if self.pending:
            return self.step()
        return None

    def step(self) -> float:
        lr = sgd_step(self.params, self.config, samples=self.pending)
        logger.debug("optimizer step %d: lr=%.6e over %d samples", self.steps_taken, lr, self.pending)
        self.pending = 0
        self.steps_taken += 1
        return lr
