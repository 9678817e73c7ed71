"""Shared enumerations and base interfaces."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import List

from typing_extensions import Self


class Mode(Enum):
    """EBUS imaging modes."""

    GRAYSCALE = "grayscale"
    DOPPLER = "doppler"
    ELASTOGRAPHY = "elastography"

    @property
    def is_video(self) -> bool:
        """Grayscale and Doppler are consumed as 3D slices."""
        return self is not Mode.ELASTOGRAPHY


class Variant(Enum):
    """Model variants; the suffix names the modes the model consumes."""

    U = "U"
    UD = "UD"
    UDE = "UDE"

    @property
    def tag(self) -> int:
        """Checkpoint variant tag byte."""
        return _VARIANT_TAGS[self]

    @classmethod
    def from_tag(cls, tag: int) -> "Variant":
        for variant, value in _VARIANT_TAGS.items():
            if value == tag:
                return variant
        raise ValueError(f"unknown variant tag: {tag}")

    @property
    def video_modes(self) -> frozenset:
        """Slice modes the 3D path consumes."""
        if self is Variant.U:
            return frozenset({Mode.GRAYSCALE})
        return frozenset({Mode.GRAYSCALE, Mode.DOPPLER})

    @property
    def uses_signal(self) -> bool:
        return self is not Variant.U

    @property
    def uses_elastography(self) -> bool:
        return self is Variant.UDE


_VARIANT_TAGS = {Variant.U: 0, Variant.UD: 1, Variant.UDE: 2}


class Label(Enum):
    """Ground-truth lesion label."""

    BENIGN = 0
    MALIGNANT = 1

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown label: {text!r}") from None

    def __str__(self) -> str:
        return self.name.lower()


class Split(Enum):
    """Patient-level dataset split."""

    TRAIN = "train"
    VALIDATION = "validation"
    UNASSIGNED = "unassigned"


class BinaryRecord(ABC):
    """Base class for records with a fixed little-endian binary layout."""

    @abstractmethod
    def to_bytes(self) -> bytes:
        """Serialize the record."""

    @classmethod
    @abstractmethod
    def from_bytes(cls, data: bytes) -> Self:
        """Deserialize a record, raising on malformed input."""

    @abstractmethod
    def validate(self) -> bool:
        """Check internal consistency of the record."""


@dataclass(frozen=True)
class GraphicSignal:
    """[is_grayscale, is_doppler, has_elastography] mode vector for a slice."""

    is_grayscale: int
    is_doppler: int
    has_elastography: int = 0

    def __post_init__(self) -> None:
        values = (self.is_grayscale, self.is_doppler, self.has_elastography)
        if any(v not in (0, 1) for v in values):
            raise ValueError(f"graphic signal components must be 0 or 1, got {list(values)}")
        if self.is_grayscale + self.is_doppler != 1:
            raise ValueError(f"exactly one of is_grayscale/is_doppler must be set, got {list(values)}")

    @classmethod
    def parse(cls, text: str) -> "GraphicSignal":
        """Parse the compact form written to sidecars, e.g. ``1,0,1``."""
        try:
            parts = [int(p) for p in text.strip().strip("[]").split(",")]
        except ValueError:
            raise ValueError(f"malformed graphic signal: {text!r}") from None
        if len(parts) != 3:
            raise ValueError(f"graphic signal needs 3 components, got {text!r}")
        return cls(*parts)

    @property
    def mode(self) -> Mode:
        return Mode.GRAYSCALE if self.is_grayscale else Mode.DOPPLER

    def as_list(self) -> List[int]:
        return [self.is_grayscale, self.is_doppler, self.has_elastography]

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.as_list())
