"""Variant-specific views of a preprocessed dataset."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Union

import numpy as np

from ..core.errors import DataError
from ..core.types import GraphicSignal, Label, Mode, Split, Variant
from ..metrics.exclusions import LesionRecord, apply_exclusions
from ..preproc.augment import AugmentConfig, augment_slice, shuffle_frames
from ..preproc.clips import Slice
from ..preproc.pipeline import INDEX_NAME, DatasetIndex, LesionSummary, SliceRecord
from ..preproc.store import SliceStore

logger = logging.getLogger(__name__)

TEMPORAL_CONTROLS = ("none", "shuffle")


def lesion_record(summary: LesionSummary) -> LesionRecord:
    return LesionRecord(
        summary.lesion_id,
        summary.patient_id,
        summary.label,
        {Mode.GRAYSCALE: summary.n_grayscale, Mode.DOPPLER: summary.n_doppler},
    )


@dataclass(frozen=True)
class Sample:
    """One slice of the view plus the elastography image it is paired with."""

    record: SliceRecord
    key: int
    elasto_path: Optional[str] = None

    @property
    def label(self) -> Label:
        return self.record.label

    @property
    def signal(self) -> GraphicSignal:
        return self.record.signal


@dataclass
class LoadedSample:
    slice_: Slice
    elasto: Optional[np.ndarray]
    signal: GraphicSignal

    @property
    def target(self) -> float:
        return 1.0 if self.slice_.label is Label.MALIGNANT else 0.0


class SliceDataset:
    """The slices a variant consumes from one split, in index order.

    ``key`` is the slice's position in the full index, so per-slice seeds do not
    depend on which split or variant is being viewed.
    """

    def __init__(self, root: Union[str, Path], index: DatasetIndex, variant: Variant, split: Optional[Split] = None):
        self.root = Path(root)
        self.store = SliceStore(self.root)
        self.variant = variant
        self.split = split

        summaries = [s for s in index.lesions if split is None or s.split is split]
        self.lesions: List[LesionRecord] = apply_exclusions((lesion_record(s) for s in summaries), variant)
        eligible = {r.lesion_id for r in self.lesions}
        n_elasto = {s.lesion_id: s.n_elasto for s in summaries}

        position: Dict[str, int] = {}
        self.samples: List[Sample] = []
        for key, record in enumerate(index.slices):
            if record.lesion_id not in eligible or record.mode not in variant.video_modes:
                continue
            if split is not None and record.split is not split:
                continue
            elasto_path = None
            if variant.uses_elastography:
                j = position.get(record.lesion_id, 0)
                position[record.lesion_id] = j + 1
                k = n_elasto.get(record.lesion_id, 0)
                if k:
                    elasto_path = self.store.elasto_path(record.lesion_id, j % k)
            self.samples.append(Sample(record, key, elasto_path))
        logger.debug(
            "%s view of split %s: %d slices over %d lesions",
            variant.value,
            split.value if split is not None else "all",
            len(self.samples),
            len(self.lesions),
        )

    @classmethod
    def open(cls, root: Union[str, Path], variant: Variant, split: Optional[Split] = None) -> "SliceDataset":
        root = Path(root)
        return cls(root, DatasetIndex.read(root / INDEX_NAME), variant, split)

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, i: int) -> Sample:
        return self.samples[i]

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    @property
    def labels(self) -> List[Label]:
        return [s.label for s in self.samples]

    def load(
        self,
        i: int,
        temporal_control: str = "none",
        shuffle_seed: int = 0,
        augment: Optional[AugmentConfig] = None,
        augment_index: int = 0,
    ) -> LoadedSample:
        """Read slice ``i`` from disk and apply the requested transforms.

        Augmentation is applied only when ``augment`` is given, i.e. in training.
        """
        sample = self.samples[i]
        slice_ = self.store.read_slice(sample.record.path)
        if slice_.lesion_id != sample.record.lesion_id:
            raise DataError(f"{sample.record.path}: stored lesion {slice_.lesion_id} disagrees with the index")
        if augment is not None:
            slice_ = augment_slice(slice_, augment, augment_index)
        if temporal_control == "shuffle":
            slice_ = shuffle_frames(slice_, shuffle_seed, sample.key)
        elif temporal_control != "none":
            raise DataError(f"unknown temporal control {temporal_control!r}")

        elasto = None
        if sample.elasto_path is not None:
            elasto = self.store.read_elasto(sample.elasto_path).as_chw(_size_of(slice_))
            if elasto.shape[1:] != slice_.volume.shape[2:]:
                raise DataError(
                    f"{sample.elasto_path}: elastography extents {elasto.shape[1:]} "
                    f"differ from slice {slice_.volume.shape[2:]}"
                )
        return LoadedSample(slice_, elasto, sample.signal)


def _size_of(slice_: Slice) -> tuple:
    _, _, height, width = slice_.volume.shape
    return width, height
