"""Landmark trajectory I/O, crop normalization and region selection."""

import json
from io import StringIO
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from mskit.core.errors import DegenerateCropError, RegionError, TrajectoryParseError
from mskit.models.schemas import CropBox, CropSpec, LandmarkTrajectory, RegionMap, SpaceTag
from mskit.utils import logger
from mskit.utils.files import require_file, write_text_atomic

TrajectoryFormat = Literal["csv", "json"]

CSV_COLUMNS = ["frame", "point", "x", "y"]
MIN_MOUTH_WIDTH = 1e-6


def infer_format(path: Path, format: Optional[str] = None) -> TrajectoryFormat:
    """
    Pick the landmark file format from an explicit value or the file suffix.

    Args:
        path: Landmark file path.
        format: "csv", "json" or None to infer from the suffix.

    Returns:
        The resolved format.
    """
    resolved = (format or path.suffix.lstrip(".")).lower()
    if resolved not in ("csv", "json"):
        raise TrajectoryParseError(f"Unknown landmark format '{resolved}' for {path} (expected csv or json)")
    return resolved  # type: ignore[return-value]


# ============================================================================
# LOADING
# ============================================================================


def load_trajectory(
    path: Path, format: Optional[str] = None, fps: float = 25.0
) -> LandmarkTrajectory:
    """
    Load a landmark trajectory from a CSV or JSON file.

    Args:
        path: Landmark file.
        format: "csv" or "json" (None infers from the suffix).
        fps: Frame rate recorded for CSV input, which carries none.

    Returns:
        Trajectory in raw space with the file's frame/point ordering.

    Raises:
        FileNotFoundError: If the file doesn't exist.
        TrajectoryParseError: On malformed content, with row/column location.
    """
    require_file(path)
    resolved = infer_format(path, format)
    text = path.read_text(encoding="utf-8")
    if resolved == "csv":
        coords = _parse_csv(text)
    else:
        coords, fps = _parse_json(text)

    try:
        return LandmarkTrajectory(coords=coords, fps=fps, space_tag=SpaceTag.RAW)
    except ValidationError as e:
        raise TrajectoryParseError(f"Invalid trajectory in {path}: {e.errors()[0]['msg']}")


def _parse_csv(text: str) -> np.ndarray:
    try:
        df = pd.read_csv(StringIO(text), dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise TrajectoryParseError("empty landmark file", row=1)
    except pd.errors.ParserError as e:
        raise TrajectoryParseError(f"malformed row: {e}")

    header = [str(c).strip() for c in df.columns]
    if header != CSV_COLUMNS:
        expected = ",".join(CSV_COLUMNS)
        raise TrajectoryParseError(f"header must be '{expected}', got '{','.join(header)}'", row=1)
    df.columns = CSV_COLUMNS
    if df.empty:
        raise TrajectoryParseError("landmark file has no rows", row=2)

    # File row numbers: header is row 1
    rows = np.arange(len(df)) + 2

    values: dict[str, np.ndarray] = {}
    for column in CSV_COLUMNS:
        raw = df[column]
        parsed = pd.to_numeric(raw.where(raw != "", None), errors="coerce").to_numpy(dtype=np.float64)
        bad = ~np.isfinite(parsed)
        if column in ("frame", "point"):
            bad |= np.isfinite(parsed) & ((parsed != np.floor(parsed)) | (parsed < 0))
        if bad.any():
            i = int(np.argmax(bad))
            cell = raw.iloc[i]
            if pd.isna(cell) or cell == "":
                raise TrajectoryParseError("missing value", row=int(rows[i]), column=column)
            kind = "non-finite value" if _is_float(cell) else "malformed value"
            raise TrajectoryParseError(f"{kind} '{cell}'", row=int(rows[i]), column=column)
        values[column] = parsed

    frame = values["frame"].astype(np.int64)
    point = values["point"].astype(np.int64)

    counts = pd.Series(point).groupby(frame).size()
    n_frames = int(frame.max()) + 1
    if len(counts) != n_frames:
        missing = sorted(set(range(n_frames)) - set(counts.index.tolist()))
        raise TrajectoryParseError(f"missing frame {missing[0]} (frames must be contiguous from 0)")
    if counts.nunique() > 1:
        first = int(counts.iloc[0])
        odd = counts[counts != first]
        raise TrajectoryParseError(
            f"inconsistent point count: frame {int(odd.index[0])} has {int(odd.iloc[0])} points "
            f"while frame {int(counts.index[0])} has {first}"
        )
    n_points = int(counts.iloc[0])

    duplicated = pd.DataFrame({"frame": frame, "point": point}).duplicated().to_numpy()
    if duplicated.any():
        i = int(np.argmax(duplicated))
        raise TrajectoryParseError(
            f"duplicate (frame, point) pair ({frame[i]}, {point[i]})", row=int(rows[i]), column="point"
        )
    out_of_range = point >= n_points
    if out_of_range.any():
        i = int(np.argmax(out_of_range))
        raise TrajectoryParseError(
            f"missing (frame, point) pair: point {point[i]} found but frame {frame[i]} "
            f"has only {n_points} points",
            row=int(rows[i]),
            column="point",
        )

    coords = np.empty((n_frames, n_points, 2), dtype=np.float64)
    coords[frame, point, 0] = values["x"]
    coords[frame, point, 1] = values["y"]
    return coords


def _is_float(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _parse_json(text: str) -> tuple[np.ndarray, float]:
    try:
        data: Any = json.loads(text)
    except json.JSONDecodeError as e:
        raise TrajectoryParseError(f"invalid JSON: {e.msg}", row=e.lineno)

    if not isinstance(data, dict) or "frames" not in data:
        raise TrajectoryParseError("JSON landmark file must be an object with a 'frames' list")

    fps = data.get("fps", 25.0)
    if not isinstance(fps, (int, float)) or isinstance(fps, bool) or not np.isfinite(fps) or fps <= 0:
        raise TrajectoryParseError(f"invalid fps {fps!r}", column="fps")

    frames = data["frames"]
    if not isinstance(frames, list) or not frames:
        raise TrajectoryParseError("'frames' must be a non-empty list", column="frames")

    declared = data.get("points")
    expected = declared if declared is not None else len(frames[0])
    for t, frame in enumerate(frames):
        if not isinstance(frame, list) or len(frame) != expected:
            size = len(frame) if isinstance(frame, list) else "no"
            raise TrajectoryParseError(
                f"inconsistent point count: frame {t} has {size} points, expected {expected}",
                row=t,
                column="frames",
            )
        for i, point in enumerate(frame):
            if (
                not isinstance(point, list)
                or len(point) != 2
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in point)
            ):
                raise TrajectoryParseError(f"point {i} of frame {t} must be [x, y]", row=t, column="frames")
            if not all(np.isfinite(c) for c in point):
                raise TrajectoryParseError(
                    f"non-finite value in point {i} of frame {t}", row=t, column="frames"
                )

    return np.array(frames, dtype=np.float64), float(fps)


# ============================================================================
# SAVING
# ============================================================================


def save_trajectory(traj: LandmarkTrajectory, path: Path, format: Optional[str] = None) -> None:
    """
    Write a trajectory as CSV or JSON.

    CSV values are printed with 17 significant digits, which round-trips binary64
    exactly. JSON uses Python's shortest round-trip float repr.

    Args:
        traj: Trajectory to write.
        path: Destination file.
        format: "csv" or "json" (None infers from the suffix).
    """
    resolved = infer_format(path, format)
    if resolved == "csv":
        content = trajectory_to_csv(traj)
    else:
        content = json.dumps(
            {"fps": traj.fps, "points": traj.points, "frames": traj.coords.tolist()},
            allow_nan=False,
        ) + "\n"
    write_text_atomic(path, content)


def trajectory_to_csv(traj: LandmarkTrajectory) -> str:
    """Render a trajectory in the frame,point,x,y CSV layout (frame-major order)."""
    frame_index, point_index = np.meshgrid(
        np.arange(traj.frames), np.arange(traj.points), indexing="ij"
    )
    df = pd.DataFrame(
        {
            "frame": frame_index.ravel(),
            "point": point_index.ravel(),
            "x": traj.coords[:, :, 0].ravel(),
            "y": traj.coords[:, :, 1].ravel(),
        }
    )
    return df.to_csv(index=False, float_format="%.17g", lineterminator="\n")


# ============================================================================
# NORMALIZATION & REGIONS
# ============================================================================


def crop_box(
    traj: LandmarkTrajectory, spec: CropSpec, mouth_corner_indices: tuple[int, int]
) -> CropBox:
    """
    Place the square crop box from the first ``spec.warmup_frames`` frames.

    The box side is the mean mouth-corner distance divided by ``spec.ratio``,
    centred on the mean mouth-corner midpoint.

    Raises:
        RegionError: If the corner indices are invalid or identical.
        DegenerateCropError: If the mean mouth width is below 1e-6 pixels, or the
            trajectory is shorter than the warmup.
    """
    left, right = mouth_corner_indices
    if left == right:
        raise RegionError(f"mouth corner indices must be distinct, got ({left}, {right})")
    for index in (left, right):
        if not 0 <= index < traj.points:
            raise RegionError(f"mouth corner index {index} out of range for {traj.points} points")
    if traj.frames < spec.warmup_frames:
        raise DegenerateCropError(
            f"trajectory has {traj.frames} frames, fewer than warmup_frames={spec.warmup_frames}"
        )

    warmup = traj.coords[: spec.warmup_frames]
    corner_left = warmup[:, left, :]
    corner_right = warmup[:, right, :]

    mouth_width = float(np.mean(np.abs(corner_right[:, 0] - corner_left[:, 0])))
    if not mouth_width >= MIN_MOUTH_WIDTH:
        raise DegenerateCropError(f"degenerate mouth width ({mouth_width:.3g} px)")

    center = np.mean((corner_left + corner_right) / 2.0, axis=0)
    side = mouth_width / spec.ratio
    return CropBox(
        mouth_width=mouth_width,
        side=side,
        left=float(center[0] - side / 2.0),
        top=float(center[1] - side / 2.0),
        scale=spec.out_size / side,
        spec=spec,
    )


def normalize_crop(
    traj: LandmarkTrajectory,
    spec: CropSpec,
    mouth_corner_indices: tuple[int, int],
) -> LandmarkTrajectory:
    """
    Map raw coordinates into the normalized ``out_size`` crop.

    Output = (coords - box_top_left) * (out_size / S). Points that land far
    outside the crop are reported but kept.

    Args:
        traj: Raw-space trajectory.
        spec: Crop constants.
        mouth_corner_indices: (left, right) mouth-corner point indices.

    Returns:
        Trajectory tagged ``normalized256``.
    """
    if traj.space_tag != SpaceTag.RAW:
        raise DegenerateCropError("normalize_crop expects a raw-space trajectory")
    box = crop_box(traj, spec, mouth_corner_indices)
    return apply_crop(traj, box)


def apply_crop(traj: LandmarkTrajectory, box: CropBox) -> LandmarkTrajectory:
    """Apply a precomputed crop box to any trajectory."""
    offset = np.array([box.left, box.top])
    coords = (traj.coords - offset) * box.scale

    low, high = -box.spec.out_size / 4.0, box.spec.out_size * 1.25
    outside = (coords < low) | (coords > high)
    if outside.any():
        logger.warning(
            f"{int(outside.any(axis=2).sum())} normalized point samples fall outside "
            f"[{low:g}, {high:g}]"
        )
    return traj.with_coords(coords, space_tag=SpaceTag.NORMALIZED256)


def validate_region_map(region_map: RegionMap, traj: LandmarkTrajectory) -> None:
    """
    Check every region index against the trajectory's point count.

    Raises:
        RegionError: If an index is out of range.
    """
    for name, indices in region_map.regions.items():
        bad = [i for i in indices if i >= traj.points]
        if bad:
            raise RegionError(
                f"region '{name}' references point {bad[0]} but the trajectory has {traj.points} points"
            )


def select_region(traj: LandmarkTrajectory, region_map: RegionMap, name: str) -> LandmarkTrajectory:
    """
    Extract the sub-trajectory of one named region.

    Args:
        traj: Source trajectory.
        region_map: Region definitions.
        name: Region to extract.

    Returns:
        Trajectory with the region's points in index order; same T, fps, space.

    Raises:
        RegionError: If the name is unknown or an index is out of range.
    """
    if name not in region_map.regions:
        raise RegionError(
            f"unknown region '{name}' (available: {', '.join(region_map.names()) or 'none'})"
        )
    indices = region_map.regions[name]
    bad = [i for i in indices if i >= traj.points]
    if bad:
        raise RegionError(
            f"region '{name}' references point {bad[0]} but the trajectory has {traj.points} points"
        )
    if not indices:
        raise RegionError(f"region '{name}' is empty")
    return traj.with_coords(traj.coords[:, indices, :])
