"""Vertical-slice ("slice along time") jitter visualization.

Column ``t`` of a slice image is the chosen pixel column of frame ``t``, so
smooth motion draws smooth curves and jitter shows up as jagged horizontal
discontinuities.
"""

from collections.abc import Sequence
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from mskit.core.errors import SliceError
from mskit.models.schemas import FrameSequence
from mskit.utils.files import list_frame_files, read_png
from mskit.utils.parallel import gather_ordered

SEPARATOR_WIDTH = 2
MAX_PANELS = 3


def load_frame_sequence(directory: Path, threads: int = 1) -> FrameSequence:
    """
    Read ``frame_%06d.png`` files in index order.

    Raises:
        SliceError: On gaps in the frame indices or mismatched frame sizes.
    """
    try:
        files = list_frame_files(directory)
    except ValueError as e:
        raise SliceError(str(e))
    frames = gather_ordered(read_png, files, threads)
    try:
        return FrameSequence(frames=frames)
    except ValueError as e:
        raise SliceError(f"invalid frame sequence in {directory}: {e}")


def band_columns(width: int, column: int, band: int = 1) -> np.ndarray:
    """Columns averaged for a band of ``band`` pixels centred on ``column``."""
    if not 0 <= column < width:
        raise SliceError(f"column {column} out of range for frame width {width}")
    if band < 1:
        raise SliceError(f"band must be >= 1, got {band}")
    start = column - (band - 1) // 2
    return np.clip(np.arange(start, start + band), 0, width - 1)


def slice_image(seq: FrameSequence, column: int, band: int = 1) -> np.ndarray:
    """
    Stack one pixel column of every frame along time.

    Args:
        seq: Frames, all of the same size.
        column: Pixel column to slice.
        band: Number of adjacent columns to average (1 = exact gather).

    Returns:
        H×T (or H×T×C) array; column ``t`` comes from frame ``t``.

    Raises:
        SliceError: If the column is out of range.
    """
    columns = band_columns(seq.width, column, band)
    if band == 1:
        return np.stack([frame[:, column] for frame in seq.frames], axis=1)
    return np.stack([frame[:, columns].mean(axis=1) for frame in seq.frames], axis=1)


def marker_position(column: int, width: int, frames: int) -> int:
    """Output column of the tick that marks the slice position."""
    if width <= 1:
        return 0
    return int(round(column / (width - 1) * (frames - 1)))


def slice_triptych(
    seqs: Sequence[FrameSequence],
    column: int,
    band: int = 1,
    marker_value: float = 1.0,
    separator_value: float = 1.0,
) -> np.ndarray:
    """
    Slice up to three sequences and lay the slices out side by side.

    Each panel gets a marker row on top with a single tick whose position
    along the panel reflects ``column`` within the frame width. Panels are
    separated by 2-pixel columns of ``separator_value``.

    Args:
        seqs: One to three sequences with the same frame height and channels.
        column: Pixel column to slice in every sequence.
        band: Averaging band width.
        marker_value: Tick intensity.
        separator_value: Separator intensity.

    Returns:
        (H + 1)×W_total (or ×C) composite.

    Raises:
        SliceError: For zero or more than three sequences, or mismatched heights.
    """
    if not 1 <= len(seqs) <= MAX_PANELS:
        raise SliceError(f"slice_triptych takes 1 to {MAX_PANELS} sequences, got {len(seqs)}")
    shapes = {(seq.height, *seq.frames[0].shape[2:]) for seq in seqs}
    if len(shapes) != 1:
        raise SliceError(f"sequences must share frame height and channels, got {sorted(shapes)}")

    panels = []
    for seq in seqs:
        panel = slice_image(seq, column, band)
        marker = np.zeros((1, *panel.shape[1:]))
        marker[0, marker_position(column, seq.width, seq.length)] = marker_value
        panels.append(np.concatenate([marker, panel], axis=0))

    height = panels[0].shape[0]
    separator = np.full((height, SEPARATOR_WIDTH, *panels[0].shape[2:]), separator_value)
    pieces = []
    for index, panel in enumerate(panels):
        if index:
            pieces.append(separator)
        pieces.append(panel)
    return np.concatenate(pieces, axis=1)


def panel_offsets(seqs: Sequence[FrameSequence]) -> list[tuple[int, int]]:
    """(start, width) of each panel in a triptych."""
    offsets, start = [], 0
    for seq in seqs:
        offsets.append((start, seq.length))
        start += seq.length + SEPARATOR_WIDTH
    return offsets


def transition_counts(image: np.ndarray, threshold: float = 0.0) -> np.ndarray:
    """
    Number of horizontal value changes in every row.

    Args:
        image: H×W (or H×W×C, channels averaged) image.
        threshold: Minimum absolute step that counts as a change.

    Returns:
        Length-H integer array.
    """
    gray = image.mean(axis=2) if image.ndim == 3 else image
    return (np.abs(np.diff(gray, axis=1)) > threshold).sum(axis=1)


def add_labels(
    image: np.ndarray, labels: Sequence[str], offsets: Sequence[tuple[int, int]], strip_height: int = 12
) -> np.ndarray:
    """
    Draw panel labels in a strip above a composite.

    Args:
        image: Composite from ``slice_triptych`` (values in [0, 1]).
        labels: One label per panel.
        offsets: Panel (start, width) from ``panel_offsets``.
        strip_height: Height of the label strip in pixels.

    Returns:
        Composite with the label strip prepended.
    """
    if len(labels) != len(offsets):
        raise SliceError(f"got {len(labels)} labels for {len(offsets)} panels")

    width = image.shape[1]
    strip = Image.new("L", (width, strip_height), 0)
    draw = ImageDraw.Draw(strip)
    font = ImageFont.load_default()
    for label, (start, _) in zip(labels, offsets):
        draw.text((start + 1, 0), label, fill=255, font=font)

    rows = np.asarray(strip, dtype=np.float64) / 255.0
    if image.ndim == 3:
        rows = np.repeat(rows[:, :, None], image.shape[2], axis=2)
    return np.concatenate([rows, image], axis=0)
