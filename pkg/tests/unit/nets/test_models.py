"""Tests for the fusion models and their heads."""

import numpy as np
import pytest

from ebus3d.core.errors import DataError, ShapeError
from ebus3d.core.types import GraphicSignal, Variant
from ebus3d.nets import (
    Res3DU,
    Res3DUD,
    Res3DUDE,
    ResStageSpec,
    build_model,
    forward_u,
    forward_ud,
    forward_ude,
    signal_tensor,
)
from ebus3d.tensor import BN_EPS, Tensor, bce_loss, gradcheck, precision

GRAY = GraphicSignal(1, 0, 0)
DOPPLER = GraphicSignal(0, 1, 0)
GRAY_E = GraphicSignal(1, 0, 1)


def small_model(variant, seed=0):
    return build_model(variant, base_channels=2, feature_dim=8, seed=seed)


def volume(batch=2, seed=1):
    return Tensor(np.random.default_rng(seed).random((batch, 3, 4, 16, 16)))


def elasto(batch=2, seed=2):
    return Tensor(np.random.default_rng(seed).random((batch, 3, 16, 16)))


@pytest.mark.unit
class TestBuildModel:
    """Variant selection and deterministic initialisation."""

    def test_variant_classes(self):
        assert isinstance(small_model("U"), Res3DU)
        assert isinstance(small_model(Variant.UD), Res3DUD)
        assert isinstance(small_model("UDE"), Res3DUDE)
        assert small_model("UDE").name == "Res3D_UDE"

    def test_ud_has_no_2d_path(self):
        names = [name for name, _ in small_model("UD").named_parameters()]
        assert not any(name.startswith("encoder2d.") for name in names)
        assert any(name.startswith("attention.") for name in names)

    def test_same_seed_same_parameters(self):
        a, b = small_model("UDE", seed=3), small_model("UDE", seed=3)
        for (_, p), (_, q) in zip(a.named_parameters(), b.named_parameters()):
            np.testing.assert_array_equal(p.data, q.data)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            build_model("UE")


@pytest.mark.unit
class TestForward:
    """Scores and input contracts of each variant."""

    def test_scores_in_unit_interval(self):
        for variant, args in (("U", ()), ("UD", (GRAY,)), ("UDE", (GRAY_E, elasto()))):
            score = small_model(variant)(volume(), *args)
            assert score.shape == (2,)
            assert np.all((score.data > 0) & (score.data < 1))

    def test_u_rejects_doppler(self):
        with pytest.raises(DataError, match="grayscale"):
            forward_u(small_model("U"), volume(), DOPPLER)

    def test_u_rejects_elastography(self):
        with pytest.raises(DataError):
            small_model("U")(volume(), GRAY, elasto())

    def test_ud_requires_signal(self):
        with pytest.raises(DataError, match="graphic signal"):
            forward_ud(small_model("UD"), volume(), None)

    def test_forward_helpers_check_variant(self):
        with pytest.raises(DataError):
            forward_ude(small_model("UD"), volume(), None, GRAY)

    def test_signal_changes_ud_score(self):
        model = small_model("UD").eval()
        gray = forward_ud(model, volume(), GRAY).data
        doppler = forward_ud(model, volume(), DOPPLER).data
        assert not np.allclose(gray, doppler)

    def test_missing_elastography_is_zero_matrix(self):
        model = small_model("UDE").eval()
        implicit = forward_ude(model, volume(), None, GRAY).data
        explicit = forward_ude(model, volume(), Tensor(np.zeros((2, 3, 16, 16))), GRAY).data
        np.testing.assert_array_equal(implicit, explicit)

    def test_elastography_batch_mismatch(self):
        with pytest.raises(ShapeError):
            forward_ude(small_model("UDE"), volume(batch=2), elasto(batch=1), GRAY_E)

    def test_volume_rank(self):
        with pytest.raises(ShapeError):
            small_model("U")(Tensor(np.zeros((1, 3, 16, 16))))

    def test_signal_tensor_broadcasts(self):
        t = signal_tensor(GRAY_E, 3)
        assert t.shape == (3, 3)
        np.testing.assert_array_equal(t.data, [[1, 0, 1]] * 3)
        with pytest.raises(ShapeError):
            signal_tensor([GRAY, DOPPLER], 3)


@pytest.mark.unit
class TestGradientFlow:
    """One BCE backward reaches every trainable parameter."""

    @pytest.mark.parametrize("variant", ["U", "UD", "UDE"])
    def test_all_parameters_receive_gradients(self, variant):
        model = small_model(variant)
        args = {"U": (), "UD": (GRAY,), "UDE": (GRAY_E, elasto())}[variant]
        bce_loss(model(volume(), *args), Tensor([1.0, 0.0])).backward()
        missing = [name for name, p in model.named_parameters() if p.grad is None]
        assert missing == []
        model.zero_grad()
        assert all(p.grad is None for p in model.parameters())


def expit(z):
    return 1.0 / (1.0 + np.exp(-z))


@pytest.mark.unit
class TestHeadAndAttention:
    """Scores under forced head and attention weights."""

    @pytest.mark.parametrize("variant", ["U", "UD", "UDE"])
    def test_zero_head_scores_one_half(self, variant):
        model = small_model(variant).eval()
        model.head.weight.data[...] = 0.0
        model.head.bias.data[...] = 0.0
        args = {"U": (), "UD": (GRAY,), "UDE": (GRAY_E, elasto())}[variant]
        np.testing.assert_array_equal(model(volume(), *args).data, [0.5, 0.5])

    def test_unit_attention_passes_features(self):
        ud, ude = small_model("UD").eval(), small_model("UDE").eval()
        for model in (ud, ude):
            model.attention.weight.data[...] = 0.0
            model.attention.bias.data[...] = 1.0
        expected = ud.score(ud.features_3d(volume())).data
        np.testing.assert_allclose(forward_ud(ud, volume(), DOPPLER).data, expected, rtol=1e-6)
        fused = ude.features_3d(volume()) + ude.features_2d(elasto())
        np.testing.assert_allclose(forward_ude(ude, volume(), elasto(), GRAY_E).data, ude.score(fused).data, rtol=1e-6)

    @pytest.mark.parametrize("variant", ["UD", "UDE"])
    def test_zero_attention_ignores_slice(self, variant):
        model = small_model(variant).eval()
        model.attention.weight.data[...] = 0.0
        model.attention.bias.data[...] = 0.0
        model.head.bias.data[...] = 0.3
        for seed in (1, 5):
            if variant == "UD":
                score = forward_ud(model, volume(seed=seed), GRAY)
            else:
                score = forward_ude(model, volume(seed=seed), elasto(seed=seed + 1), GRAY_E)
            np.testing.assert_allclose(score.data, np.full(2, expit(0.3)), rtol=1e-6)


def set_center(conv, value):
    """Zero a conv kernel except its centre tap."""
    conv.weight.data[...] = 0.0
    conv.weight.data[(0, 0) + tuple(k // 2 for k in conv.spec.kernel)] = value


@pytest.mark.unit
class TestSingleVoxelNetwork:
    """One channel, one voxel, one 1-kernel identity stage: every score worked out by hand."""

    @staticmethod
    def toy(variant):
        stage = ResStageSpec(1, 1, kernel=1, spatial_downsample=1)
        model = build_model(variant, feature_dim=1, in_channels=1, stages=[stage]).eval()
        encoders = [model.encoder3d] + ([model.encoder2d] if variant == "UDE" else [])
        for encoder in encoders:
            set_center(encoder.stem, 1.0)
            set_center(encoder.res1.conv_a, 3.0)
            set_center(encoder.res1.conv_b, 0.5)
        model.proj3d.weight.data[...] = 0.5
        model.proj3d.bias.data[...] = -1.0
        if variant == "UDE":
            model.proj2d.weight.data[...] = 1.0
            model.proj2d.bias.data[...] = 0.0
        if variant != "U":
            model.attention.weight.data[...] = [[0.5, 2.0, -1.0]]
            model.attention.bias.data[...] = 0.25
        model.head.weight.data[...] = 1.0
        model.head.bias.data[...] = 0.25
        return model

    @staticmethod
    def encoded(v):
        # eval-mode BN with unit running variance scales by k
        k = 1.0 / np.sqrt(1.0 + BN_EPS)
        stem = k * 1.0 * v
        inner = k * 3.0 * stem
        return k * 0.5 * inner + stem

    def test_scores(self):
        with precision(np.float64):
            x = Tensor(np.full((1, 1, 1, 1, 1), 2.0))
            e = Tensor(np.full((1, 1, 1, 1), 0.5))
            u = forward_u(self.toy("U"), x).data
            ud = forward_ud(self.toy("UD"), x, GRAY).data
            ude = forward_ude(self.toy("UDE"), x, e, GRAY_E).data
        f3d = 0.5 * self.encoded(2.0) - 1.0
        assert f3d == pytest.approx(1.5, rel=1e-4)
        # attention: GRAY gives 0.5 + 0.25, GRAY_E gives 0.5 - 1.0 + 0.25
        np.testing.assert_allclose(u, [expit(f3d + 0.25)], rtol=1e-12)
        np.testing.assert_allclose(ud, [expit(f3d * 0.75 + 0.25)], rtol=1e-12)
        np.testing.assert_allclose(ude, [expit((f3d + self.encoded(0.5)) * -0.25 + 0.25)], rtol=1e-12)


TOY_STAGES = [ResStageSpec(2, 2, spatial_downsample=1), ResStageSpec(2, 3)]
CHECKED_PARAMETERS = [
    "encoder3d.stem_bn.scale",
    "encoder3d.res1.bn_b.shift",
    "encoder3d.res2.skip.weight",
    "encoder3d.res2.bn_skip.scale",
    "proj3d.weight",
    "head.weight",
    "head.bias",
]
FUSION_PARAMETERS = {
    "U": [],
    "UD": ["attention.weight", "attention.bias"],
    "UDE": [
        "attention.weight",
        "attention.bias",
        "encoder2d.stem_bn.shift",
        "encoder2d.res2.skip.weight",
        "proj2d.weight",
    ],
}


@pytest.mark.unit
class TestVariantGradcheck:
    """Finite differences through the identity and projection skips, attention product and fusion sum."""

    @pytest.mark.parametrize("trial", range(7))
    @pytest.mark.parametrize("variant", ["U", "UD", "UDE"])
    def test_full_graph(self, variant, trial):
        with precision(np.float64):
            model = build_model(variant, feature_dim=3, seed=trial, stages=TOY_STAGES).eval()
            rng = np.random.default_rng(600 + trial)
            x = Tensor(rng.random((2, 3, 2, 4, 4)))
            e = Tensor(rng.random((2, 3, 4, 4)))
            labels = Tensor([1.0, 0.0])
            args = {"U": (), "UD": ([GRAY, DOPPLER],), "UDE": ([GRAY_E, DOPPLER], e)}[variant]
            params = dict(model.named_parameters())
            inputs = [params[name] for name in CHECKED_PARAMETERS + FUSION_PARAMETERS[variant]]
            report = gradcheck(lambda *_: bce_loss(model(x, *args), labels), inputs)
        assert report.checked > 0
        assert report.max_rel_error <= 1e-4
