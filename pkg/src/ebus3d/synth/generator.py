"""Synthetic dataset generation: plan lesions, render frames, write the manifest."""

import logging
import math
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..core.types import Label, Mode, Split
from ..core.workers import map_concurrently
from ..preproc.frames import write_ppm
from .config import SynthConfig
from .manifest import FRAME_PATTERN, MANIFEST_NAME, Manifest, SegmentEntry, split_by_patient
from .render import LesionPlan, LesionRenderer

logger = logging.getLogger(__name__)


def malignant_count(n_lesions: int, ratio: float) -> int:
    """round(ratio·n) with halves rounded up."""
    return int(math.floor(ratio * n_lesions + 0.5))


def plan_dataset(config: SynthConfig) -> List[LesionPlan]:
    """Patients, lesions, labels, modes and durations; one spawned seed per lesion."""
    plan_seed, lesion_seed = np.random.SeedSequence(config.seed).spawn(2)
    rng = np.random.default_rng(plan_seed)

    owners: List[str] = []
    for p in range(config.patients):
        owners.extend([f"P{p:03d}"] * int(rng.integers(config.lesions_min, config.lesions_max + 1)))
    n_lesions = len(owners)
    n_malignant = malignant_count(n_lesions, config.malignant_ratio)
    labels = np.array([1] * n_malignant + [0] * (n_lesions - n_malignant))[rng.permutation(n_lesions)]

    def frames_for(duration: float) -> int:
        return max(1, int(round(duration * config.fps)))

    plans = []
    for index, (patient_id, seed) in enumerate(zip(owners, lesion_seed.spawn(n_lesions))):
        segments = [(Mode.GRAYSCALE, frames_for(rng.uniform(config.duration_min, config.duration_max)))]
        if rng.random() < config.p_doppler:
            segments.append((Mode.DOPPLER, frames_for(rng.uniform(config.duration_min, config.duration_max))))
        if rng.random() < config.p_elastography:
            segments.append((Mode.ELASTOGRAPHY, frames_for(config.elasto_duration)))
        plans.append(LesionPlan(patient_id, f"L{index:04d}", Label(int(labels[index])), tuple(segments), seed))
    return plans


def render_lesion(plan: LesionPlan, config: SynthConfig, out_dir: Path) -> List[SegmentEntry]:
    """Write every segment of one lesion as PPM frames; returns its manifest rows."""
    renderer = LesionRenderer(plan, config.raw_size, config.fps, config.class_signal)
    entries = []
    for mode, n_frames in plan.segments:
        rel_path = f"{plan.patient_id}/{plan.lesion_id}/{mode.value}"
        directory = out_dir / rel_path
        directory.mkdir(parents=True, exist_ok=True)
        for i, pixels in enumerate(renderer.render(mode, n_frames)):
            write_ppm(directory / FRAME_PATTERN.format(i), pixels)
        entries.append(
            SegmentEntry(
                plan.patient_id, Split.UNASSIGNED, plan.lesion_id, plan.label, mode, config.fps, n_frames, rel_path
            )
        )
    logger.debug("rendered lesion %s (%s)", plan.lesion_id, plan.label)
    return entries


async def generate_dataset(config: SynthConfig, workers: int = 1, out_dir: Optional[Path] = None) -> Manifest:
    """Render the dataset under ``out_dir`` (default ``config.out_dir``) and write ``manifest.tsv``.

    Lesions render concurrently with per-lesion seeds, so the tree is
    byte-identical for any ``workers``.
    """
    out_dir = Path(out_dir or config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    plans = plan_dataset(config)
    rendered = await map_concurrently(render_lesion, plans, limit=workers, config=config, out_dir=out_dir)
    manifest = Manifest([entry for entries in rendered for entry in entries])
    manifest = split_by_patient(manifest, config.train_fraction, config.seed)
    path = manifest.write(out_dir / MANIFEST_NAME)
    n_malignant = sum(1 for p in plans if p.label is Label.MALIGNANT)
    logger.info(
        "synthesized %d lesions (%d malignant) for %d patients; manifest at %s",
        len(plans),
        n_malignant,
        config.patients,
        path,
    )
    return manifest
