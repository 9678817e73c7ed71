"""Tests for batch normalisation, the cosine schedule and SGD with accumulation."""

import math

import numpy as np
import pytest

from ebus3d.core.errors import GradientError, ShapeError
from ebus3d.tensor import (
    BN_EPS,
    SGD,
    CosineSchedule,
    SgdConfig,
    Tensor,
    batch_norm,
    parameter,
    precision,
    sgd_step,
)


def _bn_inputs(channels, dtype=np.float32):
    return (
        Tensor(np.ones(channels, dtype=dtype)),
        Tensor(np.zeros(channels, dtype=dtype)),
        np.zeros(channels, dtype=dtype),
        np.ones(channels, dtype=dtype),
    )


@pytest.mark.unit
class TestBatchNorm:
    """Per-channel normalisation in training and eval mode."""

    def test_training_statistics(self):
        rng = np.random.default_rng(0)
        with precision(np.float64):
            x = Tensor(rng.normal(3.0, 2.0, (4, 3, 5, 6, 6)))
            scale, shift, mean, var = _bn_inputs(3, np.float64)
            out = batch_norm(x, scale, shift, mean, var, training=True)
        per_channel = out.data.transpose(1, 0, 2, 3, 4).reshape(3, -1)
        np.testing.assert_allclose(per_channel.mean(axis=1), 0.0, atol=1e-5)
        np.testing.assert_allclose(per_channel.var(axis=1), 1.0, atol=1e-3)

    def test_running_stats_update(self):
        x = Tensor(np.full((2, 1, 4, 4), 5.0))
        scale, shift, mean, var = _bn_inputs(1)
        batch_norm(x, scale, shift, mean, var, training=True)
        np.testing.assert_allclose(mean, [0.5])
        np.testing.assert_allclose(var, [0.9])

    def test_constant_channel_gives_zero(self):
        x = Tensor(np.full((2, 2, 3, 3), 7.0))
        out = batch_norm(x, *_bn_inputs(2), training=True)
        np.testing.assert_allclose(out.data, 0.0, atol=1e-6)

    def test_eval_uses_stored_stats(self):
        x = Tensor(np.full((1, 1, 1, 1), 2.0))
        out = batch_norm(x, Tensor([3.0]), Tensor([1.0]), np.array([1.0], np.float32), np.array([1.0], np.float32), training=False)
        assert out.item() == pytest.approx(1.0 / math.sqrt(1.0 + BN_EPS) * 3.0 + 1.0, abs=1e-4)
        assert out.item() == pytest.approx(4.0, abs=1e-4)

    def test_eval_leaves_stats_alone(self):
        scale, shift, mean, var = _bn_inputs(2)
        batch_norm(Tensor(np.ones((1, 2, 2, 2))), scale, shift, mean, var, training=False)
        np.testing.assert_array_equal(mean, [0.0, 0.0])
        np.testing.assert_array_equal(var, [1.0, 1.0])

    def test_channel_mismatch(self):
        with pytest.raises(ShapeError, match="channel axis C"):
            batch_norm(Tensor(np.ones((1, 3, 2, 2))), *_bn_inputs(2), training=True)


@pytest.mark.unit
class TestCosineSchedule:
    """Half-cosine decay endpoints and monotonicity."""

    def test_endpoints(self):
        schedule = CosineSchedule(1e-4, 100)
        assert schedule.lr(0) == 1e-4
        assert schedule.lr(100) == pytest.approx(0.0, abs=1e-20)
        assert schedule.lr(50) == pytest.approx(5e-5)

    def test_non_increasing(self):
        schedule = CosineSchedule(1e-4, 37)
        values = [schedule.lr(t) for t in range(38)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_last_step_is_tiny_on_long_runs(self):
        schedule = CosineSchedule(1e-4, 60)
        assert schedule.lr(59) < 1e-6

    def test_invalid_total(self):
        with pytest.raises(ValueError):
            CosineSchedule(1e-4, 0)


@pytest.mark.unit
class TestSgd:
    """Parameter updates with gradient accumulation."""

    def test_single_update(self):
        p = parameter([1.0])
        p.grad = np.array([1.0], dtype=np.float32)
        lr = sgd_step([p], SgdConfig(CosineSchedule(1e-4, 10), accumulation=1))
        assert lr == 1e-4
        assert p.data[0] == pytest.approx(0.9999, abs=1e-7)
        assert p.grad is None

    def test_mean_over_window(self):
        with precision(np.float64):
            p = parameter([1.0])
        config = SgdConfig(CosineSchedule(0.1, 10), accumulation=12)
        optimizer = SGD([p], config)
        for _ in range(12):
            (p * 2.0).sum().backward()
            optimizer.observe_sample()
        # mean gradient 2.0, lr 0.1
        assert p.data[0] == pytest.approx(0.8)

    def test_24_samples_make_two_steps(self):
        p = parameter([0.0])
        optimizer = SGD([p], SgdConfig(CosineSchedule(1e-4, 2), accumulation=12))
        applied = []
        for _ in range(24):
            p.sum().backward()
            lr = optimizer.observe_sample()
            if lr is not None:
                applied.append(lr)
        assert optimizer.flush() is None
        assert optimizer.steps_taken == 2
        assert applied[0] == 1e-4

    def test_flush_partial_window(self):
        p = parameter([0.0])
        optimizer = SGD([p], SgdConfig(CosineSchedule(1e-4, 5), accumulation=12))
        for _ in range(5):
            p.sum().backward()
            optimizer.observe_sample()
        assert optimizer.steps_taken == 0
        assert optimizer.flush() == 1e-4
        assert optimizer.steps_taken == 1
        assert optimizer.schedule.current_step == 1

    def test_step_without_gradients(self):
        with pytest.raises(GradientError):
            sgd_step([parameter([1.0])], SgdConfig())

    def test_invalid_accumulation(self):
        with pytest.raises(ValueError):
            SgdConfig(accumulation=0)
