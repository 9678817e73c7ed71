"""Deterministic synthetic EBUS datasets."""

from .config import SynthConfig
from .manifest import (
    FRAME_PATTERN,
    MANIFEST_HEADER,
    MANIFEST_NAME,
    Manifest,
    SegmentEntry,
    manifest_violations,
    split_by_patient,
    validate_manifest,
)
from .render import LesionPlan, LesionRenderer, texture_variance
from .generator import generate_dataset, malignant_count, plan_dataset, render_lesion

__all__ = [
    "SynthConfig",
    "FRAME_PATTERN",
    "MANIFEST_HEADER",
    "MANIFEST_NAME",
    "Manifest",
    "SegmentEntry",
    "manifest_violations",
    "split_by_patient",
    "validate_manifest",
    "LesionPlan",
    "LesionRenderer",
    "texture_variance",
    "generate_dataset",
    "malignant_count",
    "plan_dataset",
    "render_lesion",
]
