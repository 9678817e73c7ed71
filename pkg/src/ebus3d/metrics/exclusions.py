"""Lesion eligibility per model variant."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Tuple

from ..core.types import Label, Mode, Variant
from ..preproc.clips import clip_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LesionRecord:
    """A lesion with its number of usable clips per video mode."""

    lesion_id: str
    patient_id: str
    label: Label
    clips: Mapping[Mode, int] = field(default_factory=dict)

    @classmethod
    def from_segments(
        cls, lesion_id: str, patient_id: str, label: Label, segments: Iterable[Tuple[Mode, float]]
    ) -> "LesionRecord":
        """Build from (mode, duration in seconds) pairs."""
        clips: Dict[Mode, int] = {}
        for mode, duration in segments:
            if mode.is_video:
                clips[mode] = clips.get(mode, 0) + clip_count(duration)
        return cls(lesion_id, patient_id, label, clips)

    def usable_clips(self, modes: Iterable[Mode]) -> int:
        return sum(self.clips.get(m, 0) for m in modes)


def is_eligible(lesion: LesionRecord, variant: Variant) -> bool:
    """U needs a grayscale clip; UD and UDE need a clip in any consumed mode."""
    return lesion.usable_clips(variant.video_modes) > 0


def apply_exclusions(lesions: Iterable[LesionRecord], variant: Variant) -> List[LesionRecord]:
    kept: List[LesionRecord] = []
    for lesion in lesions:
        if is_eligible(lesion, variant):
            kept.append(lesion)
        else:
            logger.info("lesion %s excluded for Res3D_%s: no usable slice", lesion.lesion_id, variant.value)
    return kept
