"""Graphic-signal construction."""

from ..core.errors import DataError
from ..core.types import GraphicSignal, Mode


def build_graphic_signal(mode: Mode, has_elasto: bool) -> GraphicSignal:
    """[1,0,e] for grayscale, [0,1,e] for Doppler; e = has_elasto."""
    if mode is Mode.GRAYSCALE:
        return GraphicSignal(1, 0, int(bool(has_elasto)))
    if mode is Mode.DOPPLER:
        return GraphicSignal(0, 1, int(bool(has_elasto)))
    raise DataError(f"{mode.value} cannot be the source of a 3D slice")
