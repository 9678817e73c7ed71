"""Pytest configuration and shared fixtures for ebus3d."""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence

import numpy as np
import pytest

from ebus3d.core.types import Label, Mode, Split
from ebus3d.preproc import (
    INDEX_NAME,
    DatasetIndex,
    ElastoImage,
    LesionSummary,
    Slice,
    SliceRecord,
    SliceStore,
    build_graphic_signal,
)

TINY_FRAME = (8, 8)


@pytest.fixture
def anyio_backend():
    """Configure AnyIO backend for tests."""
    return "asyncio"


@dataclass(frozen=True)
class LesionSpec:
    """How many slices and elastography images a fake lesion gets."""

    lesion_id: str
    patient_id: str
    split: Split
    label: Label
    n_grayscale: int = 1
    n_doppler: int = 0
    n_elasto: int = 0


def _volume(rng: np.random.Generator, label: Label, size: Sequence[int]) -> np.ndarray:
    width, height = size
    if label is Label.MALIGNANT:
        return rng.random((3, 24, height, width)).astype(np.float32)
    return np.full((3, 24, height, width), 0.3, dtype=np.float32) + 0.01 * rng.random((1, 24, 1, 1)).astype(np.float32)


def write_slice_dataset(
    root: Path, lesions: Sequence[LesionSpec], size: Sequence[int] = TINY_FRAME, seed: int = 0
) -> DatasetIndex:
    """Write slices, elastography images and ``index.tsv`` without going through frames."""
    rng = np.random.default_rng(seed)
    store = SliceStore(root)
    index = DatasetIndex()
    width, height = size
    for spec in lesions:
        for j in range(spec.n_elasto):
            pixels = rng.random((height, width, 3)).astype(np.float32)
            store.write_elasto(ElastoImage(pixels, 1.0 - 0.1 * j), spec.lesion_id, j)
        for mode, count in ((Mode.GRAYSCALE, spec.n_grayscale), (Mode.DOPPLER, spec.n_doppler)):
            signal = build_graphic_signal(mode, spec.n_elasto > 0)
            for k in range(count):
                slice_id = f"{spec.lesion_id}-{mode.value[0]}{k:03d}"
                volume = _volume(rng, spec.label, size)
                slice_ = Slice(volume, signal, spec.lesion_id, 3.0 * k, spec.patient_id, spec.label, spec.split)
                path = store.write_slice(slice_, slice_id)
                index.slices.append(
                    SliceRecord(
                        slice_id, spec.lesion_id, spec.patient_id, spec.split, spec.label, mode, 3.0 * k, signal, path
                    )
                )
        flags = ("excluded_u",) if spec.n_grayscale == 0 else ()
        index.lesions.append(
            LesionSummary(
                spec.lesion_id,
                spec.patient_id,
                spec.split,
                spec.label,
                spec.n_grayscale,
                spec.n_doppler,
                spec.n_elasto,
                flags,
            )
        )
    index.sort()
    index.write(root / INDEX_NAME)
    return index


def mixed_lesions() -> List[LesionSpec]:
    """Both splits, both classes, every mode, one Doppler-only lesion."""
    return [
        LesionSpec("L0000", "P000", Split.TRAIN, Label.MALIGNANT, n_grayscale=2, n_doppler=1, n_elasto=2),
        LesionSpec("L0001", "P000", Split.TRAIN, Label.BENIGN, n_grayscale=1),
        LesionSpec("L0002", "P001", Split.TRAIN, Label.BENIGN, n_grayscale=0, n_doppler=1, n_elasto=1),
        LesionSpec("L0003", "P002", Split.VALIDATION, Label.MALIGNANT, n_grayscale=1, n_elasto=3),
        LesionSpec("L0004", "P003", Split.VALIDATION, Label.BENIGN, n_grayscale=2),
    ]


@pytest.fixture
def slice_dataset(tmp_path) -> Path:
    """A tiny preprocessed dataset; returns its directory."""
    root = tmp_path / "slices"
    write_slice_dataset(root, mixed_lesions())
    return root
