"""On-disk slice and elastography arrays: raw little-endian float32 plus a ``.hdr`` sidecar."""

from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..core.errors import DataError
from ..core.types import GraphicSignal, Label, Mode, Split
from ..parsing import format_key_values, read_key_values
from .clips import Slice
from .elasto import ElastoImage

_FLOAT = np.dtype("<f4")
SLICE_DIR = "slices"
ELASTO_DIR = "elasto"


def _extents(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split())
    except ValueError:
        raise DataError(f"malformed extents: {text!r}") from None


def _label(text: str) -> Optional[Label]:
    return None if text == "-" else Label.parse(text)


class SliceStore:
    """Reads and writes arrays under ``root``; returned paths are relative to it."""

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)

    @staticmethod
    def slice_path(slice_id: str) -> str:
        return f"{SLICE_DIR}/{slice_id}.f32"

    @staticmethod
    def elasto_path(lesion_id: str, index: int) -> str:
        return f"{ELASTO_DIR}/{lesion_id}_e{index}.f32"

    def _write(self, rel_path: str, values: np.ndarray, header: Dict[str, object]) -> str:
        target = self.root / rel_path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(np.ascontiguousarray(values, dtype=_FLOAT).tobytes())
        items = [("extents", " ".join(str(v) for v in values.shape))] + list(header.items())
        target.with_suffix(".hdr").write_text(format_key_values(items), encoding="utf-8")
        return rel_path

    def _read(self, rel_path: str) -> Tuple[np.ndarray, Dict[str, str]]:
        target = self.root / rel_path
        header = read_key_values(target.with_suffix(".hdr"))
        if "extents" not in header:
            raise DataError(f"{target.with_suffix('.hdr')}: missing 'extents'")
        shape = _extents(header["extents"])
        raw = target.read_bytes()
        expected = int(np.prod(shape)) * _FLOAT.itemsize
        if len(raw) != expected:
            raise DataError(f"{target}: expected {expected} bytes for extents {shape}, found {len(raw)}")
        return np.frombuffer(raw, dtype=_FLOAT).reshape(shape).astype(np.float32), header

    def write_slice(self, slice_: Slice, slice_id: str) -> str:
        return self._write(
            self.slice_path(slice_id),
            slice_.volume,
            {
                "mode": slice_.mode.value,
                "lesion_id": slice_.lesion_id,
                "patient_id": slice_.patient_id or "-",
                "split": slice_.split.value,
                "label": str(slice_.label) if slice_.label is not None else "-",
                "clip_start": f"{slice_.clip_start:g}",
                "signal": str(slice_.signal),
            },
        )

    def read_slice(self, rel_path: str) -> Slice:
        volume, header = self._read(rel_path)
        try:
            signal = GraphicSignal.parse(header["signal"])
            if Mode(header["mode"]) is not signal.mode:
                raise DataError(f"{rel_path}: mode {header['mode']} disagrees with signal {signal}")
            return Slice(
                volume,
                signal,
                header["lesion_id"],
                float(header["clip_start"]),
                "" if header["patient_id"] == "-" else header["patient_id"],
                _label(header["label"]),
                Split(header["split"]),
            )
        except KeyError as exc:
            raise DataError(f"{rel_path}: sidecar lacks key {exc}") from None
        except ValueError as exc:
            raise DataError(f"{rel_path}: {exc}") from None

    def write_elasto(self, image: ElastoImage, lesion_id: str, index: int) -> str:
        if image.is_zero:
            raise DataError("the zero matrix is implicit and never stored")
        header = {"mode": Mode.ELASTOGRAPHY.value, "lesion_id": lesion_id, "coverage": repr(image.coverage)}
        if image.timestamp is not None:
            header["timestamp"] = repr(image.timestamp)
        return self._write(self.elasto_path(lesion_id, index), image.pixels.transpose(2, 0, 1), header)

    def read_elasto(self, rel_path: str) -> ElastoImage:
        chw, header = self._read(rel_path)
        timestamp = float(header["timestamp"]) if "timestamp" in header else None
        return ElastoImage(np.ascontiguousarray(chw.transpose(1, 2, 0)), float(header.get("coverage", 0.0)), timestamp)
