"""Central finite-difference checks of analytic gradients."""

from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from ..core.errors import GradientError
from .ops import record_relu_masks
from .tensor import Tensor


@dataclass
class GradcheckReport:
    max_rel_error: float
    checked: int
    skipped_kinks: int

    @property
    def ok(self) -> bool:
        return self.checked > 0


def _masks_equal(a: List[np.ndarray], b: List[np.ndarray]) -> bool:
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))


def gradcheck(
    fn: Callable[..., Tensor],
    inputs: Sequence[Tensor],
    h: float = 1e-3,
    rtol: float = 1e-4,
    atol: float = 1e-6,
    raise_on_failure: bool = True,
) -> GradcheckReport:
    """Compare ``backward`` against central differences for every input element.

    ``fn`` must return a scalar tensor. Inputs should be float64 (see
    ``precision``). A coordinate passes when |analytic - numeric| <= atol +
    rtol·|numeric|. Coordinates whose ±h evaluations flip a ReLU activation sit
    on a kink, where the function is not differentiable, and are skipped.
    """
    for t in inputs:
        if t.dtype != np.float64:
            raise GradientError(f"gradcheck needs float64 inputs, got {t.dtype}")
        t.grad = None
    fn(*inputs).backward()
    analytic = [np.zeros_like(t.data) if t.grad is None else t.grad.copy() for t in inputs]

    worst = 0.0
    checked = skipped = 0
    for t, grad in zip(inputs, analytic):
        flat = t.data.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            with record_relu_masks() as plus_masks:
                f_plus = fn(*inputs).item()
            flat[i] = orig - h
            with record_relu_masks() as minus_masks:
                f_minus = fn(*inputs).item()
            flat[i] = orig
            if not _masks_equal(plus_masks, minus_masks):
                skipped += 1
                continue
            numeric = (f_plus - f_minus) / (2 * h)
            got = float(grad.reshape(-1)[i])
            err = abs(got - numeric)
            rel = err / max(abs(numeric), abs(got), 1e-12)
            checked += 1
            if err > atol + rtol * abs(numeric):
                worst = max(worst, rel)
                if raise_on_failure:
                    raise GradientError(
                        f"gradient mismatch at input {inputs.index(t)} element {i}: "
                        f"analytic {got:.8e}, numeric {numeric:.8e}"
                    )
            elif err > atol:
                worst = max(worst, rel)
    for t in inputs:
        t.grad = None
    return GradcheckReport(max_rel_error=worst, checked=checked, skipped_kinks=skipped)
