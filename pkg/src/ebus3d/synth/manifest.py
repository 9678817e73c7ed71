"""The ``manifest.tsv`` dataset description and the patient-level split."""

import logging
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from ..core.errors import DataError
from ..core.types import Label, Mode, Split
from ..parsing import ParseError, format_table, parse_table

logger = logging.getLogger(__name__)

MANIFEST_HEADER = "#ebus-synth v1"
MANIFEST_NAME = "manifest.tsv"
FRAME_PATTERN = "frame_{:06d}.ppm"
COLUMNS = ("patient_id", "split", "lesion_id", "label", "mode", "fps", "n_frames", "rel_path")


@dataclass(frozen=True)
class SegmentEntry:
    """One manifest row: a mode-tagged video segment of one lesion."""

    patient_id: str
    split: Split
    lesion_id: str
    label: Label
    mode: Mode
    fps: float
    n_frames: int
    rel_path: str
    line: int = field(default=0, compare=False)

    @property
    def duration(self) -> float:
        return self.n_frames / self.fps

    def cells(self) -> List[str]:
        return [
            self.patient_id,
            self.split.value,
            self.lesion_id,
            str(self.label),
            self.mode.value,
            f"{self.fps:g}",
            str(self.n_frames),
            self.rel_path,
        ]


@dataclass
class Manifest:
    entries: List[SegmentEntry] = field(default_factory=list)

    def lesions(self) -> Dict[str, List[SegmentEntry]]:
        """Entries grouped by lesion id, lesions in sorted order."""
        grouped: Dict[str, List[SegmentEntry]] = defaultdict(list)
        for entry in self.entries:
            grouped[entry.lesion_id].append(entry)
        return {lesion_id: grouped[lesion_id] for lesion_id in sorted(grouped)}

    def patients(self) -> List[str]:
        return sorted({e.patient_id for e in self.entries})

    def patient_splits(self) -> Dict[str, Split]:
        return {e.patient_id: e.split for e in self.entries}

    def to_text(self) -> str:
        return format_table(MANIFEST_HEADER, (e.cells() for e in self.entries))

    @classmethod
    def from_text(cls, text: str) -> "Manifest":
        table = parse_table(text, expected_header=MANIFEST_HEADER)
        entries = []
        for row in table.rows:
            row.expect_columns(len(COLUMNS))
            patient_id, split, lesion_id, label, mode, fps, n_frames, rel_path = row.cells
            try:
                entries.append(
                    SegmentEntry(
                        patient_id,
                        Split(split),
                        lesion_id,
                        Label.parse(label),
                        Mode(mode),
                        float(fps),
                        int(n_frames),
                        rel_path,
                        row.line,
                    )
                )
            except ValueError as exc:
                raise ParseError(f"invalid manifest row: {exc}", line=row.line) from None
        return cls(entries)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.to_text(), encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Union[str, Path]) -> "Manifest":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _has_both_classes(manifest: Manifest, patients: Sequence[str]) -> bool:
    members = set(patients)
    return {e.label for e in manifest.entries if e.patient_id in members} == {Label.BENIGN, Label.MALIGNANT}


def split_by_patient(manifest: Manifest, train_fraction: float, seed: int, attempts: int = 100) -> Manifest:
    """Assign whole patients to train or validation.

    The first shuffle whose two sides both contain benign and malignant lesions
    is used; when no such shuffle turns up, the first one is kept.
    """
    patients = manifest.patients()
    if len(patients) < 2:
        raise DataError(f"a patient-level split needs at least 2 patients, got {len(patients)}")
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n_train = min(max(int(round(train_fraction * len(patients))), 1), len(patients) - 1)

    rng = np.random.default_rng(seed)
    chosen = None
    for _ in range(attempts):
        order = [patients[i] for i in rng.permutation(len(patients))]
        if chosen is None:
            chosen = order
        if _has_both_classes(manifest, order[:n_train]) and _has_both_classes(manifest, order[n_train:]):
            chosen = order
            break
    train = set(chosen[:n_train])
    logger.info("split %d patients: %d train, %d validation", len(patients), n_train, len(patients) - n_train)
    return Manifest(
        [replace(e, split=Split.TRAIN if e.patient_id in train else Split.VALIDATION) for e in manifest.entries]
    )


def manifest_violations(manifest: Manifest, root: Path) -> List[str]:
    violations: List[str] = []
    seen: Dict[tuple, int] = {}
    owners: Dict[str, tuple] = {}
    for entry in manifest.entries:
        key = (entry.lesion_id, entry.mode)
        if key in seen:
            violations.append(f"duplicate lesion id {entry.lesion_id} ({entry.mode.value}) on line {entry.line}")
        seen[key] = entry.line
        owner = (entry.patient_id, entry.label)
        if owners.setdefault(entry.lesion_id, owner) != owner:
            violations.append(
                f"duplicate lesion id {entry.lesion_id} used by another patient or label on line {entry.line}"
            )

    splits: Dict[str, set] = defaultdict(set)
    for entry in manifest.entries:
        splits[entry.patient_id].add(entry.split)
    for patient_id in sorted(splits):
        if len(splits[patient_id]) > 1:
            violations.append(f"patient {patient_id} appears in more than one split")

    for lesion_id, entries in manifest.lesions().items():
        if not any(e.mode is Mode.GRAYSCALE for e in entries):
            violations.append(f"lesion {lesion_id} has no grayscale segment")

    for entry in manifest.entries:
        if entry.fps <= 0:
            violations.append(f"non-positive fps for lesion {entry.lesion_id} on line {entry.line}")
        directory = root / entry.rel_path
        for index in range(entry.n_frames):
            frame = directory / FRAME_PATTERN.format(index)
            if not frame.is_file():
                violations.append(f"missing file: {frame}")
    return violations


def validate_manifest(path: Union[str, Path]) -> List[str]:
    """Check manifest invariants and frame files; an empty list means valid."""
    path = Path(path)
    return manifest_violations(Manifest.read(path), path.parent)
