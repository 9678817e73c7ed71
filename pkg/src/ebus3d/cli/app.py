"""``ebus3d`` command line: synth, preprocess, train, eval and shapes.

Exit codes: 0 success, 2 usage or configuration, 3 I/O, 4 numerical failure.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import anyio

from ..core.anyio_compat import first_leaf_exception, get_exception_group_types
from ..core.errors import Ebus3dError, exit_code_for
from ..core.logs import configure_logging, echo_config
from ..core.types import Split
from ..core.workers import worker_limit
from ..metrics.export import format_summary_table
from ..nets import ShapeRow, describe_model_shapes
from ..preproc.pipeline import INDEX_NAME, preprocess_dataset
from ..synth import MANIFEST_NAME, generate_dataset
from ..training import FINAL_CHECKPOINT, evaluate, train
from .config import LoadedConfig, load_config, seed_overrides

logger = logging.getLogger(__name__)

RUN_LOG = "run.log"
COMMANDS = ("synth", "preprocess", "train", "eval", "shapes")

# --out sets this RunConfig field per command; synth writes to synth.out_dir
_OUT_FIELD = {"preprocess": "slices_dir", "train": "checkpoint_dir", "eval": "metrics_dir"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value run configuration file")
    common.add_argument("--seed", type=int, help="set every seed (data, init, augment, synth)")
    common.add_argument("--out", type=Path, help="output directory of the command")
    common.add_argument("-v", "--verbose", action="store_true", help="log per-step details")

    parser = argparse.ArgumentParser(prog="ebus3d", description="EBUS lesion video classification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("synth", parents=[common], help="generate a synthetic labeled EBUS dataset")
    preprocess = sub.add_parser("preprocess", parents=[common], help="turn a manifest into slices and an index")
    preprocess.add_argument("--manifest", type=Path, help="manifest to read (default: <dataset_dir>/manifest.tsv)")
    sub.add_parser("train", parents=[common], help="train the configured model variant")
    evaluate_cmd = sub.add_parser("eval", parents=[common], help="score a split and export metrics")
    evaluate_cmd.add_argument("--checkpoint", type=Path, help="checkpoint to evaluate (default: final.ckpt)")
    evaluate_cmd.add_argument("--split", choices=[Split.TRAIN.value, Split.VALIDATION.value], help="split to evaluate")
    sub.add_parser("shapes", parents=[common], help="print the layer output shapes of the configured variant")
    return parser


def _overrides(args: argparse.Namespace) -> tuple:
    run: Dict[str, Any] = seed_overrides(args.seed)
    synth: Dict[str, Any] = {}
    if args.seed is not None:
        synth["seed"] = args.seed
    if args.out is not None:
        if args.command == "synth":
            synth["out_dir"] = args.out
        elif args.command in _OUT_FIELD:
            run[_OUT_FIELD[args.command]] = args.out
    if getattr(args, "checkpoint", None) is not None:
        run["checkpoint"] = args.checkpoint
    if getattr(args, "split", None) is not None:
        run["eval_split"] = args.split
    return run, synth


def _output_dir(command: str, config: LoadedConfig) -> Optional[Path]:
    if command == "synth":
        return config.synth.out_dir
    if command in _OUT_FIELD:
        return getattr(config.run, _OUT_FIELD[command])
    return None


def format_shape_table(rows: Sequence[ShapeRow]) -> str:
    lines = [f"{'path':<8}{'layer':<12}shape"]
    for row in rows:
        lines.append(f"{row.path:<8}{row.layer:<12}{'x'.join(str(d) for d in row.shape)}")
    return "\n".join(lines)


async def run_command(command: str, config: LoadedConfig, workers: int, manifest: Optional[Path] = None) -> None:
    """Execute one subcommand with an already validated configuration."""
    run = config.run
    if command == "synth":
        await generate_dataset(config.synth, workers=workers)
        print(config.synth.out_dir / MANIFEST_NAME)
    elif command == "preprocess":
        manifest_path = manifest or run.dataset_dir / MANIFEST_NAME
        await preprocess_dataset(manifest_path, run.slices_dir, run.preprocess_settings(workers))
        print(run.slices_dir / INDEX_NAME)
    elif command == "train":
        result = train(run.train_settings(), run.slices_dir, run.checkpoint_dir)
        print(result.final_path)
    elif command == "eval":
        checkpoint = run.checkpoint or run.checkpoint_dir / FINAL_CHECKPOINT
        summary = evaluate(checkpoint, run.train_settings(), run.slices_dir, run.metrics_dir, run.eval_split)
        print(format_summary_table(summary.rows))
    elif command == "shapes":
        rows = describe_model_shapes(
            run.variant, run.frame_size, base_channels=run.base_channels, feature_dim=run.feature_dim
        )
        print(format_shape_table(rows))
    else:
        raise ValueError(f"unknown command: {command}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.INFO
    try:
        workers = worker_limit()
        run_overrides, synth_overrides = _overrides(args)
        config = load_config(args.config, run_overrides, synth_overrides)
        out_dir = _output_dir(args.command, config)
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
        log = configure_logging(level, out_dir / RUN_LOG if out_dir is not None else None)
        echo_config(log, args.command, config.items() + (("workers", workers),))
        anyio.run(run_command, args.command, config, workers, getattr(args, "manifest", None))
    except get_exception_group_types() as group:
        return _fail(first_leaf_exception(group, prefer=(Ebus3dError, OSError)))
    except (Ebus3dError, OSError) as exc:
        return _fail(exc)
    return 0


def _fail(exc: BaseException) -> int:
    code = exit_code_for(exc)
    if code == 1:
        raise exc
    print(f"ebus3d: error: {exc}", file=sys.stderr)
    logger.debug("command failed", exc_info=exc)
    return code


if __name__ == "__main__":
    sys.exit(main())
