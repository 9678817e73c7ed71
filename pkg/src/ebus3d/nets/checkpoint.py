"""Checkpoint file codec.

Layout (little-endian)::

    magic "EBUS3D\\0" | version u32 | variant tag u8 | count u32
    count × (name_len u16 | name utf-8 | rank u8 | extents u32×rank | float32×prod(extents))
    step u64 | schedule T u64 | seed u64
"""

import logging
import struct
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..core.errors import (
    CheckpointMismatchError,
    CheckpointTruncatedError,
    CheckpointVersionError,
    NotACheckpointError,
)
from ..core.types import BinaryRecord, Variant
from .modules import load_state

logger = logging.getLogger(__name__)

MAGIC = b"EBUS3D\x00"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<IBI")
_FOOTER = struct.Struct("<QQQ")
_NAME_LEN = struct.Struct("<H")
_RANK = struct.Struct("<B")
_FLOAT = np.dtype("<f4")


class _Reader:
    """Cursor over checkpoint bytes; every short read is a truncation."""

    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise CheckpointTruncatedError(f"checkpoint too short for {what}: need {end} bytes, have {len(self.data)}")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: struct.Struct, what: str) -> Tuple[int, ...]:
        return fmt.unpack(self.take(fmt.size, what))


class Checkpoint(BinaryRecord):
    """Named float32 arrays (parameters, then buffers) plus training state."""

    def __init__(
        self,
        variant: Variant,
        arrays: List[Tuple[str, np.ndarray]],
        step: int = 0,
        total_steps: int = 0,
        seed: int = 0,
        version: int = FORMAT_VERSION,
    ):
        self.variant = variant
        self.arrays = [(name, np.ascontiguousarray(values, dtype=_FLOAT)) for name, values in arrays]
        self.step = step
        self.total_steps = total_steps
        self.seed = seed
        self.version = version

    @classmethod
    def from_model(cls, model, step: int = 0, total_steps: int = 0, seed: int = 0) -> "Checkpoint":
        return cls(model.variant, model.state(), step=step, total_steps=total_steps, seed=seed)

    @property
    def names(self) -> List[str]:
        return [name for name, _ in self.arrays]

    def as_dict(self) -> Dict[str, np.ndarray]:
        return dict(self.arrays)

    def to_bytes(self) -> bytes:
        parts = [MAGIC, _HEADER.pack(self.version, self.variant.tag, len(self.arrays))]
        for name, values in self.arrays:
            encoded = name.encode("utf-8")
            parts.append(_NAME_LEN.pack(len(encoded)))
            parts.append(encoded)
            parts.append(_RANK.pack(values.ndim))
            parts.append(struct.pack(f"<{values.ndim}I", *values.shape))
            parts.append(values.astype(_FLOAT, copy=False).tobytes())
        parts.append(_FOOTER.pack(self.step, self.total_steps, self.seed))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Checkpoint":
        if data[: len(MAGIC)] != MAGIC:
            raise NotACheckpointError("not a checkpoint: bad magic bytes")
        reader = _Reader(data)
        reader.offset = len(MAGIC)
        version, tag, count = reader.unpack(_HEADER, "header")
        if version != FORMAT_VERSION:
            raise CheckpointVersionError(f"unsupported checkpoint version {version} (expected {FORMAT_VERSION})")
        try:
            variant = Variant.from_tag(tag)
        except ValueError as exc:
            raise NotACheckpointError(f"not a checkpoint: {exc}") from None

        arrays: List[Tuple[str, np.ndarray]] = []
        for index in range(count):
            (name_len,) = reader.unpack(_NAME_LEN, f"parameter {index} name length")
            try:
                name = reader.take(name_len, f"parameter {index} name").decode("utf-8")
            except UnicodeDecodeError:
                raise NotACheckpointError(f"not a checkpoint: parameter {index} name is not UTF-8") from None
            (rank,) = reader.unpack(_RANK, f"{name} rank")
            shape = struct.unpack(f"<{rank}I", reader.take(4 * rank, f"{name} extents"))
            size = int(np.prod(shape, dtype=np.int64))
            raw = reader.take(size * _FLOAT.itemsize, f"{name} values")
            arrays.append((name, np.frombuffer(raw, dtype=_FLOAT).reshape(shape).copy()))

        step, total_steps, seed = reader.unpack(_FOOTER, "footer")
        if reader.offset != len(data):
            raise NotACheckpointError(f"not a checkpoint: {len(data) - reader.offset} trailing bytes")
        return cls(variant, arrays, step=step, total_steps=total_steps, seed=seed, version=version)

    def validate(self) -> bool:
        names = self.names
        return len(set(names)) == len(names) and all(np.isfinite(v).all() for _, v in self.arrays)

    def apply_to(self, model) -> None:
        """Load into ``model``, which must have exactly this parameter set."""
        stored = self.as_dict()
        expected = model.state()
        for name, values in expected:
            if name not in stored:
                raise CheckpointMismatchError(
                    f"checkpoint ({self.variant.value}) is missing parameter {name!r} required by {model.name}"
                )
            if stored[name].shape != values.shape:
                raise CheckpointMismatchError(
                    f"parameter {name!r}: checkpoint shape {stored[name].shape}, model expects {values.shape}"
                )
        extra = [name for name in self.names if name not in dict(expected)]
        if extra:
            raise CheckpointMismatchError(f"checkpoint has unexpected parameter {extra[0]!r} for {model.name}")
        if self.variant is not model.variant:
            raise CheckpointMismatchError(f"checkpoint variant {self.variant.value} does not match model {model.name}")
        load_state(model, stored)


def save_checkpoint(model, path: Union[str, Path], step: int = 0, total_steps: int = 0, seed: int = 0) -> Checkpoint:
    checkpoint = Checkpoint.from_model(model, step=step, total_steps=total_steps, seed=seed)
    Path(path).write_bytes(checkpoint.to_bytes())
    logger.info("wrote checkpoint %s (step %d/%d)", path, step, total_steps)
    return checkpoint


def load_checkpoint(path: Union[str, Path], into: Optional[object] = None) -> Checkpoint:
    """Decode a checkpoint file; with ``into``, also copy its values into that model."""
    checkpoint = Checkpoint.from_bytes(Path(path).read_bytes())
    if into is not None:
        checkpoint.apply_to(into)
    return checkpoint
