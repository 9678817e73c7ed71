"""Tests for cropping, clip segmentation, 4 Hz sampling and slice stacking."""

import numpy as np
import pytest

from ebus3d.core.errors import DataError
from ebus3d.core.types import GraphicSignal, Mode
from ebus3d.preproc import (
    ClipInterval,
    Frame,
    VideoSegment,
    build_graphic_signal,
    clip_count,
    crop_frame,
    sample_clip_frames,
    sample_indices,
    segment_clips,
    stack_slice,
)


def segment(n_frames, fps=4.0, mode=Mode.GRAYSCALE, size=(8, 6)):
    width, height = size
    pixels = [np.full((height, width, 3), k / max(n_frames, 1), dtype=np.float32) for k in range(n_frames)]
    return VideoSegment.from_pixels("L0001", "P000", mode, fps, pixels)


@pytest.mark.unit
class TestCrop:
    """704×576 windows out of larger raw frames."""

    def test_window_origin(self):
        raw = np.random.default_rng(0).random((768, 1024, 3)).astype(np.float32)
        frame = crop_frame(raw, origin=(100, 50))
        assert frame.size == (704, 576)
        np.testing.assert_array_equal(frame.pixels[0, 0], raw[50, 100])
        np.testing.assert_array_equal(frame.pixels[-1, -1], raw[50 + 575, 100 + 703])

    def test_out_of_bounds(self):
        with pytest.raises(DataError, match="exceeds raw frame"):
            crop_frame(np.zeros((768, 1024, 3), dtype=np.float32), origin=(400, 300))

    def test_constant_stays_constant(self):
        frame = crop_frame(np.full((20, 30, 3), 0.25, dtype=np.float32), origin=(3, 4), size=(10, 8))
        assert frame.pixels.shape == (8, 10, 3)
        assert np.all(frame.pixels == 0.25)

    def test_segment_timestamps(self):
        seg = segment(5, fps=4.0)
        assert [f.timestamp for f in seg.frames] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert seg.duration == 1.25

    def test_segment_rejects_bad_fps(self):
        with pytest.raises(DataError, match="fps"):
            segment(3, fps=0.0)

    def test_segment_frames_spaced_one_over_fps(self):
        pixels = np.zeros((2, 2, 3), dtype=np.float32)
        with pytest.raises(DataError, match="not 1/fps"):
            VideoSegment("L0001", "P000", Mode.GRAYSCALE, 4.0, [Frame(pixels, t) for t in (0.0, 0.25, 0.75)])
        shifted = VideoSegment("L0001", "P000", Mode.GRAYSCALE, 4.0, [Frame(pixels, t) for t in (2.0, 2.25, 2.5)])
        assert shifted.n_frames == 3


@pytest.mark.unit
class TestClipSegmentation:
    """6 s clips with 3 s hop."""

    @pytest.mark.parametrize("duration, count", [(0.0, 0), (5.9, 0), (6.0, 1), (9.0, 2), (12.0, 3), (60.0, 19)])
    def test_clip_count(self, duration, count):
        assert clip_count(duration) == count

    def test_clip_count_matches_window_enumeration(self):
        for tenths in range(0, 400):
            d = tenths / 10
            expected = sum(1 for k in range(20) if 3 * k + 6 <= d + 1e-9)
            assert clip_count(d) == expected

    def test_twelve_seconds(self):
        assert segment_clips(segment(48)) == [ClipInterval(0.0, 6.0), ClipInterval(3.0, 9.0), ClipInterval(6.0, 12.0)]

    def test_adjacent_clips_overlap_three_seconds(self):
        clips = segment_clips(segment(30 * 8, fps=8.0))
        assert all(b.start - a.start == 3.0 and a.end - b.start == 3.0 for a, b in zip(clips, clips[1:]))

    def test_short_segment_has_no_clips(self):
        assert segment_clips(segment(22)) == []

    def test_elastography_cannot_be_clipped(self):
        with pytest.raises(DataError):
            segment_clips(segment(48, mode=Mode.ELASTOGRAPHY))


@pytest.mark.unit
class TestSampling:
    """Nearest-index sampling at 4 Hz."""

    def test_fps_30(self):
        assert sample_indices(30, 0.0) == [
            0, 8, 15, 23, 30, 38, 45, 53, 60, 68, 75, 83,
            90, 98, 105, 113, 120, 128, 135, 143, 150, 158, 165, 173,
        ]  # fmt: skip

    def test_fps_4_takes_every_frame(self):
        assert sample_indices(4, 0.0) == list(range(24))

    def test_fps_8_takes_every_other_frame(self):
        assert sample_indices(8, 0.0) == list(range(0, 48, 2))

    def test_fps_25(self):
        indices = sample_indices(25, 0.0)
        assert indices[:9] == [0, 6, 13, 19, 25, 31, 38, 44, 50]
        assert indices[-1] == 144

    def test_clip_start_offset(self):
        assert sample_indices(4, 3.0)[:3] == [12, 13, 14]

    def test_sample_clip_frames(self):
        seg = segment(48)
        frames = sample_clip_frames(seg, ClipInterval(6.0, 12.0))
        assert len(frames) == 24
        assert frames[0] is seg.frames[24]
        assert np.diff([f.timestamp for f in frames]).tolist() == [0.25] * 23

    def test_corrupt_fps_is_caught(self):
        with pytest.raises(DataError, match="beyond last frame"):
            sample_clip_frames(segment(20), ClipInterval(0.0, 6.0))


@pytest.mark.unit
class TestStacking:
    """24 frames become one C×T×H×W volume."""

    def test_layout(self):
        seg = segment(24)
        slice_ = stack_slice(seg.frames, GraphicSignal(1, 0, 0), "L0001", 0.0)
        assert slice_.volume.shape == (3, 24, 6, 8)
        assert slice_.volume.dtype == np.float32
        np.testing.assert_array_equal(slice_.volume[:, 5], seg.frames[5].pixels.transpose(2, 0, 1))
        assert slice_.mode is Mode.GRAYSCALE

    def test_wrong_frame_count(self):
        with pytest.raises(DataError, match="24 frames"):
            stack_slice(segment(23).frames, GraphicSignal(1, 0, 0), "L0001", 0.0)


@pytest.mark.unit
class TestGraphicSignal:
    """Mode vectors built from the source mode."""

    def test_vectors(self):
        assert build_graphic_signal(Mode.GRAYSCALE, False).as_list() == [1, 0, 0]
        assert build_graphic_signal(Mode.DOPPLER, True).as_list() == [0, 1, 1]

    def test_elastography_is_not_a_slice_source(self):
        with pytest.raises(DataError):
            build_graphic_signal(Mode.ELASTOGRAPHY, True)
