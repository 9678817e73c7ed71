"""Run configuration: the ``key = value`` file, its pydantic models and CLI overrides."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Literal, Mapping, Optional, Tuple, Union

from pydantic import Field, model_validator

from ..core.config import ConfigModel, IntPair, build_config
from ..core.types import Split, Variant
from ..parsing import parse_key_values
from ..preproc.augment import AugmentConfig
from ..preproc.pipeline import PreprocessSettings
from ..synth.config import SynthConfig
from ..training import TrainSettings

SYNTH_PREFIX = "synth."
SEED_FIELDS = ("data_seed", "init_seed", "augment_seed")


class RunConfig(ConfigModel):
    """Training, preprocessing and evaluation knobs."""

    variant: Variant = Variant.U
    lr0: float = Field(1e-4, gt=0.0)
    accumulation: int = Field(12, ge=1)
    epochs: int = Field(30, ge=1)
    frame_size: IntPair = (704, 576)
    crop_origin: IntPair = (0, 0)
    base_channels: int = Field(16, ge=1)
    feature_dim: int = Field(1000, ge=1)

    p_flip: float = Field(0.2, ge=0.0, le=1.0)
    p_noise: float = Field(0.2, ge=0.0, le=1.0)
    noise_sigma: float = Field(0.01, ge=0.0)
    p_blur: float = Field(0.2, ge=0.0, le=1.0)
    blur_sigma_min: float = Field(0.5, gt=0.0)
    blur_sigma_max: float = Field(1.5, gt=0.0)
    blur_kernel: int = Field(5, ge=1)

    coverage_saturation: float = Field(0.3, ge=0.0, le=1.0)
    coverage_value: float = Field(0.2, ge=0.0, le=1.0)
    max_elasto: int = Field(3, ge=0)

    data_seed: int = Field(0, ge=0)
    init_seed: int = Field(0, ge=0)
    augment_seed: int = Field(0, ge=0)

    dataset_dir: Path = Path("synth_data")
    slices_dir: Path = Path("slices")
    checkpoint_dir: Path = Path("checkpoints")
    metrics_dir: Path = Path("metrics")
    checkpoint: Optional[Path] = None

    threshold: float = Field(0.5, ge=0.0, le=1.0)
    eval_split: Split = Split.VALIDATION
    temporal_control: Literal["none", "shuffle"] = "none"

    @model_validator(mode="after")
    def _check_ranges(self) -> "RunConfig":
        if self.blur_sigma_min > self.blur_sigma_max:
            raise ValueError(f"blur_sigma_min ({self.blur_sigma_min}) exceeds blur_sigma_max ({self.blur_sigma_max})")
        if self.blur_kernel % 2 == 0:
            raise ValueError(f"blur_kernel must be odd, got {self.blur_kernel}")
        if self.eval_split is Split.UNASSIGNED:
            raise ValueError("eval_split must be train or validation")
        return self

    def augment_config(self) -> AugmentConfig:
        return AugmentConfig(
            p_flip=self.p_flip,
            p_noise=self.p_noise,
            noise_sigma=self.noise_sigma,
            p_blur=self.p_blur,
            blur_kernel=self.blur_kernel,
            blur_sigma_min=self.blur_sigma_min,
            blur_sigma_max=self.blur_sigma_max,
            seed=self.augment_seed,
        )

    def train_settings(self) -> TrainSettings:
        return TrainSettings(
            variant=self.variant,
            lr0=self.lr0,
            accumulation=self.accumulation,
            epochs=self.epochs,
            base_channels=self.base_channels,
            feature_dim=self.feature_dim,
            init_seed=self.init_seed,
            data_seed=self.data_seed,
            augment=self.augment_config(),
            temporal_control=self.temporal_control,
            threshold=self.threshold,
        )

    def preprocess_settings(self, workers: int = 1) -> PreprocessSettings:
        return PreprocessSettings(
            frame_size=self.frame_size,
            crop_origin=self.crop_origin,
            coverage_saturation=self.coverage_saturation,
            coverage_value=self.coverage_value,
            max_elasto=self.max_elasto,
            workers=workers,
        )


@dataclass
class ConfigSource:
    """Raw values of one config file, split into the run and ``synth.`` sections."""

    run: Dict[str, Any] = field(default_factory=dict)
    synth: Dict[str, Any] = field(default_factory=dict)
    run_lines: Dict[str, int] = field(default_factory=dict)
    synth_lines: Dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "ConfigSource":
        source = cls()
        for entry in parse_key_values(text):
            if entry.key.startswith(SYNTH_PREFIX):
                name = entry.key[len(SYNTH_PREFIX):]
                source.synth[name] = entry.value
                source.synth_lines[name] = entry.line
            else:
                source.run[entry.key] = entry.value
                source.run_lines[entry.key] = entry.line
        return source

    @classmethod
    def read(cls, path: Optional[Union[str, Path]]) -> "ConfigSource":
        if path is None:
            return cls()
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class LoadedConfig:
    run: RunConfig
    synth: SynthConfig

    def items(self) -> Tuple[Tuple[str, Any], ...]:
        """Every effective value, synth keys under their ``synth.`` prefix."""
        run_items = [(k, _echo(v)) for k, v in self.run.items().items()]
        synth_items = [(SYNTH_PREFIX + k, _echo(v)) for k, v in self.synth.items().items()]
        return tuple(run_items + synth_items)


def _echo(value: Any) -> Any:
    if isinstance(value, (Variant, Split)):
        return value.value
    if isinstance(value, tuple):
        return " ".join(str(v) for v in value)
    return value


def load_config(
    path: Optional[Union[str, Path]] = None,
    run_overrides: Optional[Mapping[str, Any]] = None,
    synth_overrides: Optional[Mapping[str, Any]] = None,
) -> LoadedConfig:
    """Read a config file (or none, for all defaults) and apply CLI overrides.

    Syntax errors raise ParseError and invalid or unknown keys raise ConfigError,
    both carrying the line number.
    """
    source = ConfigSource.read(path)
    run_values = {**source.run, **(run_overrides or {})}
    synth_values = {**source.synth, **(synth_overrides or {})}
    run = build_config(RunConfig, run_values, source.run_lines)
    synth = build_config(SynthConfig, synth_values, source.synth_lines, prefix=SYNTH_PREFIX)
    return LoadedConfig(run, synth)


def seed_overrides(seed: Optional[int]) -> Dict[str, Any]:
    """``--seed N`` sets every run seed at once."""
    if seed is None:
        return {}
    return {name: seed for name in SEED_FIELDS}
