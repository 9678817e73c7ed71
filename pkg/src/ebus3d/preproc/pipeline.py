"""Manifest -> slices, elastography selections and ``index.tsv``."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from ..core.errors import DataError, MissingFrameError
from ..core.types import GraphicSignal, Label, Mode, Split
from ..core.workers import map_concurrently
from ..parsing import ParseError, format_table, parse_table
from ..synth.manifest import FRAME_PATTERN, Manifest, SegmentEntry
from .clips import Slice, clip_count, clip_frame_indices, clip_intervals, stack_slice
from .elasto import COVERAGE_SATURATION, COVERAGE_VALUE, MAX_ELASTO, select_elastography_frames
from .frames import FRAME_SIZE, Frame, VideoSegment, crop_frame, read_ppm
from .signal import build_graphic_signal
from .store import SliceStore

logger = logging.getLogger(__name__)

INDEX_HEADER = "#ebus-index v1"
INDEX_NAME = "index.tsv"
EXCLUDED_U = "excluded_u"
_MODE_ORDER = {Mode.GRAYSCALE: 0, Mode.DOPPLER: 1, Mode.ELASTOGRAPHY: 2}


@dataclass(frozen=True)
class SliceRecord:
    slice_id: str
    lesion_id: str
    patient_id: str
    split: Split
    label: Label
    mode: Mode
    clip_start: float
    signal: GraphicSignal
    path: str

    def cells(self) -> List[str]:
        return [
            "slice",
            self.slice_id,
            self.lesion_id,
            self.patient_id,
            self.split.value,
            str(self.label),
            self.mode.value,
            f"{self.clip_start:g}",
            str(self.signal),
            self.path,
        ]


@dataclass(frozen=True)
class LesionSummary:
    lesion_id: str
    patient_id: str
    split: Split
    label: Label
    n_grayscale: int
    n_doppler: int
    n_elasto: int
    flags: Tuple[str, ...] = ()

    @property
    def excluded_u(self) -> bool:
        return EXCLUDED_U in self.flags

    def cells(self) -> List[str]:
        return [
            "lesion",
            self.lesion_id,
            self.patient_id,
            self.split.value,
            str(self.label),
            str(self.n_grayscale),
            str(self.n_doppler),
            str(self.n_elasto),
            ",".join(self.flags) or "-",
        ]


@dataclass
class DatasetIndex:
    """Every slice and lesion of a preprocessed dataset, in a fixed order."""

    slices: List[SliceRecord] = field(default_factory=list)
    lesions: List[LesionSummary] = field(default_factory=list)

    def sort(self) -> None:
        self.lesions.sort(key=lambda r: r.lesion_id)
        self.slices.sort(key=lambda r: (r.lesion_id, _MODE_ORDER[r.mode], r.clip_start))

    def lesion(self, lesion_id: str) -> LesionSummary:
        for record in self.lesions:
            if record.lesion_id == lesion_id:
                return record
        raise KeyError(lesion_id)

    def slices_of(self, lesion_id: str) -> List[SliceRecord]:
        return [s for s in self.slices if s.lesion_id == lesion_id]

    def to_text(self) -> str:
        rows = [r.cells() for r in self.lesions] + [s.cells() for s in self.slices]
        return format_table(INDEX_HEADER, rows)

    @classmethod
    def from_text(cls, text: str) -> "DatasetIndex":
        index = cls()
        for row in parse_table(text, expected_header=INDEX_HEADER).rows:
            kind = row.cells[0]
            try:
                if kind == "slice":
                    row.expect_columns(10)
                    _, slice_id, lesion_id, patient_id, split, label, mode, start, signal, path = row.cells
                    index.slices.append(
                        SliceRecord(
                            slice_id,
                            lesion_id,
                            patient_id,
                            Split(split),
                            Label.parse(label),
                            Mode(mode),
                            float(start),
                            GraphicSignal.parse(signal),
                            path,
                        )
                    )
                elif kind == "lesion":
                    row.expect_columns(9)
                    _, lesion_id, patient_id, split, label, n_g, n_d, n_e, flags = row.cells
                    index.lesions.append(
                        LesionSummary(
                            lesion_id,
                            patient_id,
                            Split(split),
                            Label.parse(label),
                            int(n_g),
                            int(n_d),
                            int(n_e),
                            () if flags == "-" else tuple(flags.split(",")),
                        )
                    )
                else:
                    raise ParseError(f"unknown index row kind {kind!r}", line=row.line)
            except ValueError as exc:
                raise ParseError(f"invalid index row: {exc}", line=row.line) from None
        return index

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(self.to_text(), encoding="utf-8")
        return path

    @classmethod
    def read(cls, path: Union[str, Path]) -> "DatasetIndex":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class PreprocessSettings:
    frame_size: Tuple[int, int] = FRAME_SIZE
    crop_origin: Tuple[int, int] = (0, 0)
    coverage_saturation: float = COVERAGE_SATURATION
    coverage_value: float = COVERAGE_VALUE
    max_elasto: int = MAX_ELASTO
    workers: int = 1


def _read_frame(directory: Path, index: int, entry: SegmentEntry, settings: PreprocessSettings) -> Frame:
    raw = read_ppm(directory / FRAME_PATTERN.format(index))
    return crop_frame(raw, settings.crop_origin, settings.frame_size, index / entry.fps)


def load_segment(entry: SegmentEntry, root: Path, settings: PreprocessSettings) -> VideoSegment:
    """Read ``frame_000000.ppm`` … of a manifest entry and crop each frame."""
    directory = root / entry.rel_path
    frames = [_read_frame(directory, i, entry, settings) for i in range(entry.n_frames)]
    return VideoSegment(entry.lesion_id, entry.patient_id, entry.mode, entry.fps, frames)


def load_clip_slices(
    entry: SegmentEntry, root: Path, settings: PreprocessSettings, signal: GraphicSignal
) -> Iterator[Slice]:
    """Yield one slice per clip of a video entry, decoding only the frames each clip samples.

    Every frame file must exist, but only one clip's frames are held at a time;
    frames shared with the previous (overlapping) clip are not read again.
    """
    directory = root / entry.rel_path
    for i in range(entry.n_frames):
        path = directory / FRAME_PATTERN.format(i)
        if not path.is_file():
            raise MissingFrameError(str(path))
    name = f"{entry.lesion_id}/{entry.mode.value}"
    held: Dict[int, Frame] = {}
    for clip in clip_intervals(entry.duration):
        indices = clip_frame_indices(name, entry.fps, entry.n_frames, clip)
        held = {i: held[i] if i in held else _read_frame(directory, i, entry, settings) for i in indices}
        frames = [held[i] for i in indices]
        yield stack_slice(frames, signal, entry.lesion_id, clip.start, entry.patient_id, entry.label, entry.split)


def preprocess_lesion(
    entries: Sequence[SegmentEntry], root: Path, store: SliceStore, settings: PreprocessSettings
) -> Tuple[LesionSummary, List[SliceRecord]]:
    """Clip, sample and stack one lesion's videos and store its elastography selection."""
    first = entries[0]
    if any(e.lesion_id != first.lesion_id for e in entries):
        raise DataError("entries of one lesion must share a lesion id")

    n_elasto = 0
    for entry in entries:
        if entry.mode is Mode.ELASTOGRAPHY:
            segment = load_segment(entry, root, settings)
            images = select_elastography_frames(
                segment, settings.max_elasto, settings.coverage_saturation, settings.coverage_value
            )
            for j, image in enumerate(images, start=n_elasto):
                store.write_elasto(image, first.lesion_id, j)
            n_elasto += len(images)

    records: List[SliceRecord] = []
    counts = {Mode.GRAYSCALE: 0, Mode.DOPPLER: 0}
    for entry in sorted(entries, key=lambda e: _MODE_ORDER[e.mode]):
        if not entry.mode.is_video:
            continue
        if clip_count(entry.duration) == 0:
            continue
        signal = build_graphic_signal(entry.mode, n_elasto > 0)
        for slice_ in load_clip_slices(entry, root, settings, signal):
            slice_id = f"{entry.lesion_id}-{entry.mode.value[0]}{counts[entry.mode]:03d}"
            counts[entry.mode] += 1
            path = store.write_slice(slice_, slice_id)
            records.append(
                SliceRecord(
                    slice_id,
                    entry.lesion_id,
                    entry.patient_id,
                    entry.split,
                    entry.label,
                    entry.mode,
                    slice_.clip_start,
                    signal,
                    path,
                )
            )

    flags = (EXCLUDED_U,) if counts[Mode.GRAYSCALE] == 0 else ()
    if flags:
        logger.warning("lesion %s has no grayscale clip of 6 s; excluded for variant U", first.lesion_id)
    summary = LesionSummary(
        first.lesion_id,
        first.patient_id,
        first.split,
        first.label,
        counts[Mode.GRAYSCALE],
        counts[Mode.DOPPLER],
        n_elasto,
        flags,
    )
    logger.debug("lesion %s: %d slices, %d elastography images", first.lesion_id, len(records), n_elasto)
    return summary, records


async def preprocess_dataset(
    manifest_path: Union[str, Path],
    out_dir: Union[str, Path],
    settings: Optional[PreprocessSettings] = None,
) -> DatasetIndex:
    """Preprocess every lesion of a manifest and write ``index.tsv`` into ``out_dir``.

    Lesions are processed in worker threads (``settings.workers``); the index is
    sorted afterwards so its bytes do not depend on scheduling.
    """
    settings = settings or PreprocessSettings()
    manifest_path = Path(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = Manifest.read(manifest_path)
    store = SliceStore(out_dir)

    results = await map_concurrently(
        preprocess_lesion,
        list(manifest.lesions().values()),
        limit=settings.workers,
        root=manifest_path.parent,
        store=store,
        settings=settings,
    )
    index = DatasetIndex()
    for summary, records in results:
        index.lesions.append(summary)
        index.slices.extend(records)
    index.sort()
    index.write(out_dir / INDEX_NAME)
    logger.info("preprocessed %d lesions into %d slices", len(index.lesions), len(index.slices))
    logger.info("wrote %s", out_dir / INDEX_NAME)
    return index
