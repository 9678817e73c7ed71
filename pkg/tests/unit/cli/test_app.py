"""Tests for the ``ebus3d`` command line entry point."""

import csv
import logging

import pytest
from conftest import mixed_lesions, write_slice_dataset

from ebus3d.cli.app import RUN_LOG, build_parser, format_shape_table, main
from ebus3d.core.logs import LOGGER_NAME
from ebus3d.metrics.export import METRICS_COLUMNS
from ebus3d.nets import describe_model_shapes
from ebus3d.synth import MANIFEST_NAME
from ebus3d.training import EPOCHS_CSV, FINAL_CHECKPOINT, STEPS_CSV


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    logger = logging.getLogger(LOGGER_NAME)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


def write_config(tmp_path, text):
    path = tmp_path / "run.conf"
    path.write_text(text, encoding="utf-8")
    return path


@pytest.fixture
def trained_run(tmp_path):
    """A tiny slice dataset plus a config that trains on it in seconds."""
    slices = tmp_path / "slices"
    write_slice_dataset(slices, mixed_lesions())
    config = write_config(
        tmp_path,
        "\n".join(
            [
                "variant = U",
                "epochs = 1",
                "base_channels = 2",
                "feature_dim = 4",
                "frame_size = 8 8",
                f"slices_dir = {slices}",
                f"checkpoint_dir = {tmp_path / 'ckpt'}",
                f"metrics_dir = {tmp_path / 'metrics'}",
                "",
            ]
        ),
    )
    return config, tmp_path


@pytest.mark.unit
class TestParser:
    """Subcommands and shared options."""

    def test_commands(self):
        parser = build_parser()
        for command in ("synth", "preprocess", "train", "eval", "shapes"):
            args = parser.parse_args([command, "--seed", "3"])
            assert args.command == command
            assert args.seed == 3

    def test_eval_options(self):
        args = build_parser().parse_args(["eval", "--checkpoint", "a.ckpt", "--split", "train"])
        assert str(args.checkpoint) == "a.ckpt"
        assert args.split == "train"

    def test_command_required(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2


@pytest.mark.unit
class TestShapes:
    """``ebus3d shapes`` prints layer output shapes."""

    def test_default_variant_table(self, capsys):
        assert main(["shapes"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0].startswith("path")
        assert "1x3x24x576x704" in out
        assert "1x512x24x9x11" in out
        assert "fc_sigmoid" in out

    def test_configured_variant(self, tmp_path, capsys):
        config = write_config(tmp_path, "variant = UDE\nframe_size = 64 48\n")
        assert main(["shapes", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        assert "attention" in out
        assert "1x3x48x64" in out

    def test_format_shape_table(self):
        rows = describe_model_shapes("U")
        lines = format_shape_table(rows).splitlines()
        assert len(lines) == len(rows) + 1
        assert lines[1].split() == [rows[0].path, rows[0].layer, "x".join(str(d) for d in rows[0].shape)]


@pytest.mark.unit
class TestExitCodes:
    """Failures map onto 2 (configuration) and 3 (I/O)."""

    def test_invalid_config_value(self, tmp_path, capsys):
        config = write_config(tmp_path, "# comment\nepochs = -1\n")
        assert main(["shapes", "--config", str(config)]) == 2
        err = capsys.readouterr().err
        assert err.startswith("ebus3d: error:")
        assert "line 2" in err
        assert "key 'epochs'" in err

    def test_malformed_config_line(self, tmp_path, capsys):
        config = write_config(tmp_path, "epochs\n")
        assert main(["shapes", "--config", str(config)]) == 2
        assert "ebus3d: error:" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path):
        assert main(["shapes", "--config", str(tmp_path / "absent.conf")]) == 3

    def test_output_under_regular_file(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("not a directory")
        assert main(["preprocess", "--out", str(blocker / "slices")]) == 3

    def test_missing_manifest(self, tmp_path):
        args = ["preprocess", "--manifest", str(tmp_path / MANIFEST_NAME), "--out", str(tmp_path / "slices")]
        assert main(args) == 3

    def test_missing_checkpoint(self, trained_run, capsys):
        config, _ = trained_run
        assert main(["eval", "--config", str(config)]) == 3
        assert FINAL_CHECKPOINT in capsys.readouterr().err


@pytest.mark.unit
class TestTrainAndEval:
    """Training writes checkpoints and logs; eval reads final.ckpt by default."""

    def test_train_then_eval(self, trained_run, capsys):
        config, root = trained_run
        assert main(["train", "--config", str(config), "--seed", "7"]) == 0
        ckpt = root / "ckpt"
        assert (ckpt / FINAL_CHECKPOINT).is_file()
        assert (ckpt / STEPS_CSV).is_file()
        assert (ckpt / EPOCHS_CSV).is_file()

        log = (ckpt / RUN_LOG).read_text(encoding="utf-8")
        assert "effective train configuration:" in log
        assert "data_seed = 7" in log
        assert "init_seed = 7" in log
        capsys.readouterr()

        assert main(["eval", "--config", str(config)]) == 0
        out = capsys.readouterr().out
        assert "Res3D_U" in out
        with open(root / "metrics" / "metrics.csv", newline="") as handle:
            rows = list(csv.reader(handle))
        assert tuple(rows[0]) == METRICS_COLUMNS
        assert [row[0] for row in rows[1:]] == ["slice", "lesion"]
        # validation split: L0003 has one slice, L0004 two
        assert [row[4] for row in rows[1:]] == ["3", "2"]
        for name in ("roc_slice.csv", "roc_lesion.csv", "scores.csv"):
            assert (root / "metrics" / name).is_file()

    def test_eval_train_split(self, trained_run):
        config, root = trained_run
        assert main(["train", "--config", str(config)]) == 0
        out = root / "train_metrics"
        checkpoint = root / "ckpt" / FINAL_CHECKPOINT
        args = ["eval", "--config", str(config), "--split", "train", "--checkpoint", str(checkpoint), "--out", str(out)]
        assert main(args) == 0
        with open(out / "scores.csv", newline="") as handle:
            lesions = {row["lesion_id"] for row in csv.DictReader(handle)}
        # L0002 has no grayscale slice, so U never scores it
        assert lesions == {"L0000", "L0001"}

    def test_variant_mismatch_is_config_error(self, trained_run):
        config, root = trained_run
        assert main(["train", "--config", str(config)]) == 0
        ud_config = root / "ud.conf"
        text = config.read_text(encoding="utf-8").replace("variant = U\n", "variant = UD\n")
        ud_config.write_text(text, encoding="utf-8")
        assert main(["eval", "--config", str(ud_config)]) == 2


@pytest.mark.unit
class TestSynth:
    """``ebus3d synth`` writes a manifest into --out."""

    def test_tiny_dataset(self, tmp_path, capsys):
        config = write_config(
            tmp_path,
            "\n".join(
                [
                    "synth.patients = 2",
                    "synth.lesions_max = 1",
                    "synth.duration_min = 1",
                    "synth.duration_max = 1",
                    "synth.frame_size = 16 12",
                    "synth.elasto_duration = 0.5",
                    "",
                ]
            ),
        )
        out = tmp_path / "data"
        assert main(["synth", "--config", str(config), "--out", str(out), "--seed", "4"]) == 0
        assert (out / MANIFEST_NAME).is_file()
        assert str(out / MANIFEST_NAME) in capsys.readouterr().out
        assert "synth.seed = 4" in (out / RUN_LOG).read_text(encoding="utf-8")
