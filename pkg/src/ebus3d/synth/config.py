"""Synthetic dataset parameters (the ``synth.*`` config keys)."""

from pathlib import Path
from typing import Literal

from pydantic import Field, model_validator

from ..core.config import ConfigModel, IntPair


class SynthConfig(ConfigModel):
    """Everything ``generate_dataset`` needs; the output is a pure function of it."""

    patients: int = Field(20, ge=2)
    lesions_min: int = Field(1, ge=1)
    lesions_max: int = Field(3, ge=1)
    malignant_ratio: float = Field(0.5, gt=0.0, lt=1.0)
    fps: float = Field(8.0, gt=0.0)
    duration_min: float = Field(5.0, ge=0.0)
    duration_max: float = Field(14.0, ge=0.0)
    frame_size: IntPair = (704, 576)
    border: int = Field(0, ge=0)
    p_doppler: float = Field(0.7, ge=0.0, le=1.0)
    p_elastography: float = Field(0.7, ge=0.0, le=1.0)
    elasto_duration: float = Field(2.0, gt=0.0)
    train_fraction: float = Field(0.67, gt=0.0, lt=1.0)
    class_signal: Literal["texture", "flicker"] = "texture"
    seed: int = Field(0, ge=0)
    out_dir: Path = Path("synth_data")

    @model_validator(mode="after")
    def _check_ranges(self) -> "SynthConfig":
        if self.lesions_min > self.lesions_max:
            raise ValueError(f"lesions_min ({self.lesions_min}) exceeds lesions_max ({self.lesions_max})")
        if self.duration_min > self.duration_max:
            raise ValueError(f"duration_min ({self.duration_min}) exceeds duration_max ({self.duration_max})")
        if min(self.frame_size) < 8:
            raise ValueError(f"frame_size {self.frame_size} is too small to draw a lesion")
        return self

    @property
    def raw_size(self) -> IntPair:
        """Width and height of the written frames, before cropping."""
        width, height = self.frame_size
        return width + 2 * self.border, height + 2 * self.border
