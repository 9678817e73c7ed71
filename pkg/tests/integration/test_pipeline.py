"""End-to-end run: synth, preprocess, train and eval through the command line."""

import csv

import pytest

from ebus3d.cli.app import main
from ebus3d.core.workers import THREADS_ENV
from ebus3d.preproc import INDEX_NAME, DatasetIndex
from ebus3d.training import FINAL_CHECKPOINT

SYNTH_KEYS = [
    "synth.patients = 6",
    "synth.lesions_min = 1",
    "synth.lesions_max = 1",
    "synth.duration_min = 6",
    "synth.duration_max = 6",
    "synth.frame_size = 16 12",
    "synth.p_doppler = 1",
    "synth.p_elastography = 1",
    "synth.elasto_duration = 0.5",
    "synth.seed = 11",
]


def write_run_config(root, variant="U", checkpoint_dir="ckpt", metrics_dir="metrics"):
    lines = SYNTH_KEYS + [
        f"variant = {variant}",
        "epochs = 2",
        "base_channels = 2",
        "feature_dim = 4",
        "frame_size = 16 12",
        f"dataset_dir = {root / 'data'}",
        f"slices_dir = {root / 'slices'}",
        f"checkpoint_dir = {root / checkpoint_dir}",
        f"metrics_dir = {root / metrics_dir}",
    ]
    path = root / f"{variant}-{checkpoint_dir}.conf"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


@pytest.fixture
def prepared(tmp_path):
    """Synthesised and preprocessed dataset under ``tmp_path``."""
    config = write_run_config(tmp_path)
    assert main(["synth", "--config", str(config), "--out", str(tmp_path / "data")]) == 0
    assert main(["preprocess", "--config", str(config)]) == 0
    return tmp_path


@pytest.mark.integration
class TestEndToEnd:
    """The documented workflow on a six-patient synthetic dataset."""

    def test_index_covers_every_lesion(self, prepared):
        index = DatasetIndex.read(prepared / "slices" / INDEX_NAME)
        assert len(index.lesions) == 6
        for lesion in index.lesions:
            assert (lesion.n_grayscale, lesion.n_doppler) == (1, 1)
            assert 1 <= lesion.n_elasto <= 3
        assert {s.split.value for s in index.slices} == {"train", "validation"}

    def test_preprocess_independent_of_workers(self, prepared, tmp_path, monkeypatch):
        config = write_run_config(tmp_path)
        reference = (prepared / "slices" / INDEX_NAME).read_bytes()
        monkeypatch.setenv(THREADS_ENV, "3")
        assert main(["preprocess", "--config", str(config), "--out", str(tmp_path / "slices3")]) == 0
        assert (tmp_path / "slices3" / INDEX_NAME).read_bytes() == reference
        for record in DatasetIndex.read(prepared / "slices" / INDEX_NAME).slices:
            assert (tmp_path / "slices3" / record.path).read_bytes() == (prepared / "slices" / record.path).read_bytes()

    def test_train_and_eval_reproducible(self, prepared):
        first = write_run_config(prepared, checkpoint_dir="ckpt_a", metrics_dir="metrics_a")
        second = write_run_config(prepared, checkpoint_dir="ckpt_b", metrics_dir="metrics_b")
        for config in (first, second):
            assert main(["train", "--config", str(config)]) == 0
            assert main(["eval", "--config", str(config)]) == 0

        final_a = (prepared / "ckpt_a" / FINAL_CHECKPOINT).read_bytes()
        assert final_a == (prepared / "ckpt_b" / FINAL_CHECKPOINT).read_bytes()
        assert read_rows(prepared / "metrics_a" / "scores.csv") == read_rows(prepared / "metrics_b" / "scores.csv")

        metrics = read_rows(prepared / "metrics_a" / "metrics.csv")
        assert [row["level"] for row in metrics] == ["slice", "lesion"]
        # two validation patients, one grayscale slice each
        assert [row["n"] for row in metrics] == ["2", "2"]
        for row in metrics:
            assert 0.0 <= float(row["accuracy"]) <= 1.0

    def test_fusion_variants_run(self, prepared):
        for variant in ("UD", "UDE"):
            config = write_run_config(
                prepared, variant=variant, checkpoint_dir=f"ckpt_{variant}", metrics_dir=f"m_{variant}"
            )
            assert main(["train", "--config", str(config)]) == 0
            assert main(["eval", "--config", str(config)]) == 0
            metrics = read_rows(prepared / f"m_{variant}" / "metrics.csv")
            assert metrics[0]["model"] == f"Res3D_{variant}"
            # grayscale and Doppler slices of both validation lesions
            assert metrics[0]["n"] == "4"
