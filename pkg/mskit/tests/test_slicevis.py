"""
Tests for vertical-slice visualization.

How to run:
    pytest mskit/tests/test_slicevis.py -v
"""

import numpy as np
import pytest

from mskit.core.errors import SliceError
from mskit.core.slicevis import (
    SEPARATOR_WIDTH,
    add_labels,
    band_columns,
    load_frame_sequence,
    marker_position,
    panel_offsets,
    slice_image,
    slice_triptych,
    transition_counts,
)
from mskit.models.schemas import FrameSequence
from mskit.utils.files import write_png


def moving_bar(frames: int = 10, height: int = 4, width: int = 10) -> FrameSequence:
    """Frame t is black except for a white column at x = t."""
    seq = []
    for t in range(frames):
        frame = np.zeros((height, width))
        frame[:, t % width] = 1.0
        seq.append(frame)
    return FrameSequence(frames=seq)


def static_frames(frames: int = 6, height: int = 5, width: int = 8) -> FrameSequence:
    """Identical frames with a vertical gradient."""
    frame = np.tile(np.linspace(0.0, 1.0, height)[:, None], (1, width))
    return FrameSequence(frames=[frame] * frames)


# ============================================================================
# SLICES
# ============================================================================


def test_slice_is_exact_gather():
    """Test that column t of the slice is the chosen column of frame t."""
    seq = moving_bar()

    image = slice_image(seq, column=3)

    assert image.shape == (4, 10)
    for t, frame in enumerate(seq.frames):
        assert np.array_equal(image[:, t], frame[:, 3])
    assert np.array_equal(np.nonzero(image[0])[0], [3])


def test_static_frames_give_constant_rows():
    """Test that a still video slices to horizontal lines."""
    image = slice_image(static_frames(), column=2)

    assert np.all(transition_counts(image) == 0)
    assert np.all(image == image[:, :1])


def test_column_out_of_range():
    """Test the column bounds check."""
    with pytest.raises(SliceError, match="column 8 out of range"):
        slice_image(static_frames(), column=8)
    with pytest.raises(SliceError, match="out of range"):
        slice_image(static_frames(), column=-1)


def test_band_averages_adjacent_columns():
    """Test averaging a band of columns."""
    seq = moving_bar()

    image = slice_image(seq, column=4, band=3)

    assert np.array_equal(band_columns(10, 4, 3), [3, 4, 5])
    assert np.allclose(image[0], [0, 0, 0, 1 / 3, 1 / 3, 1 / 3, 0, 0, 0, 0])


def test_band_is_clipped_at_the_edge():
    """Test that a band at the border repeats the edge column."""
    assert np.array_equal(band_columns(10, 0, 3), [0, 0, 1])
    with pytest.raises(SliceError, match="band must be >= 1"):
        band_columns(10, 0, 0)


def test_jitter_adds_transitions():
    """Test that a bar that jumps back shows more edges than a steady one."""
    steady = moving_bar()
    jumpy_frames = [np.array(frame) for frame in steady.frames]
    jumpy_frames[5] = jumpy_frames[3]

    steady_image = slice_image(steady, column=3)
    jumpy_image = slice_image(FrameSequence(frames=jumpy_frames), column=3)

    assert transition_counts(jumpy_image)[0] > transition_counts(steady_image)[0]


# ============================================================================
# TRIPTYCH
# ============================================================================


def test_triptych_layout():
    """Test panel placement, separators and the marker row."""
    seqs = [static_frames(frames=5), moving_bar(frames=5, height=5, width=8), static_frames(frames=5)]

    image = slice_triptych(seqs, column=7)

    assert image.shape == (6, 3 * 5 + 2 * SEPARATOR_WIDTH)
    assert np.all(image[:, 5:7] == 1.0)
    assert np.all(image[:, 12:14] == 1.0)
    assert np.array_equal(image[1:, 0:5], slice_image(seqs[0], 7))
    assert np.array_equal(image[1:, 7:12], slice_image(seqs[1], 7))
    # rightmost column maps to the panel's last frame
    assert np.array_equal(np.nonzero(image[0, 0:5])[0], [4])
    assert panel_offsets(seqs) == [(0, 5), (7, 5), (14, 5)]


def test_marker_position():
    """Test that the tick scales the column to the panel width."""
    assert marker_position(0, 8, 5) == 0
    assert marker_position(7, 8, 5) == 4
    assert marker_position(3, 7, 13) == 6
    assert marker_position(0, 1, 5) == 0


def test_triptych_panel_limits():
    """Test that one to three panels are accepted."""
    seq = static_frames()

    assert slice_triptych([seq], column=0).shape == (6, 6)
    with pytest.raises(SliceError, match="1 to 3 sequences"):
        slice_triptych([seq] * 4, column=0)
    with pytest.raises(SliceError, match="1 to 3 sequences"):
        slice_triptych([], column=0)


def test_triptych_height_mismatch():
    """Test that panels must share their frame height."""
    with pytest.raises(SliceError, match="share frame height"):
        slice_triptych([static_frames(height=5), static_frames(height=6)], column=0)


def test_add_labels():
    """Test that labels go into a strip above the composite."""
    seqs = [static_frames(), static_frames()]
    image = slice_triptych(seqs, column=0)

    labelled = add_labels(image, ["A", "B"], panel_offsets(seqs))

    assert labelled.shape == (image.shape[0] + 12, image.shape[1])
    assert np.array_equal(labelled[12:], image)
    assert labelled[:12].max() > 0.0
    with pytest.raises(SliceError, match="1 labels for 2 panels"):
        add_labels(image, ["A"], panel_offsets(seqs))


# ============================================================================
# FRAME FILES
# ============================================================================


def write_frames(directory, seq: FrameSequence, start: int = 0) -> None:
    for index, frame in enumerate(seq.frames):
        write_png(directory / f"frame_{start + index:06d}.png", frame)


def test_load_frame_sequence(tmp_path):
    """Test reading frames back from PNG files in index order."""
    seq = moving_bar()
    write_frames(tmp_path, seq)
    (tmp_path / "notes.txt").write_text("ignored")

    loaded = load_frame_sequence(tmp_path, threads=2)

    assert loaded.length == 10
    assert np.array_equal(slice_image(loaded, 3), slice_image(seq, 3))


def test_frame_gap_is_rejected(tmp_path):
    """Test that a missing frame index is an error."""
    write_frames(tmp_path, moving_bar(frames=4))
    (tmp_path / "frame_000002.png").unlink()

    with pytest.raises(SliceError, match="Non-contiguous"):
        load_frame_sequence(tmp_path)


def test_mismatched_frame_sizes(tmp_path):
    """Test that frames of different sizes are rejected."""
    write_png(tmp_path / "frame_000000.png", np.zeros((4, 4)))
    write_png(tmp_path / "frame_000001.png", np.zeros((4, 5)))

    with pytest.raises(SliceError, match="invalid frame sequence"):
        load_frame_sequence(tmp_path)
