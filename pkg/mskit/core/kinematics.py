"""Velocity/acceleration chain and the Motion Stability Index (MSI).

Velocities are forward differences ``v[t] = Z[t+1] - Z[t]`` and accelerations
``a[t] = v[t] - v[t-1]``. Two boundary conventions are supported:

* ``paper``: ``v[T-1] = 0`` and ``v[-1] = 0``; every one of the T samples is kept.
* ``interior``: only ``v[0..T-2]`` and ``a[1..T-2]`` are kept.

Variances divide by (included samples - 1). A point's scalar variance is the
mean of its x and y variances. MSI is the mean over a region's points of
``1 / (σ(a) + ε)``.
"""

import math
from collections.abc import Sequence
from typing import Optional

import numpy as np

from mskit.core.errors import KinematicsError, MsiError
from mskit.core.trajectory import select_region
from mskit.models.schemas import (
    CropBox,
    Kinematics,
    LandmarkTrajectory,
    MsiReport,
    PaddingMode,
    RegionMap,
    RegionStats,
    SpaceTag,
)

DEFAULT_EPSILON = 1e-5


def kinematics(traj: LandmarkTrajectory, mode: PaddingMode = PaddingMode.PAPER) -> Kinematics:
    """
    Compute per-point velocities and accelerations.

    Args:
        traj: Trajectory with T >= 3 frames.
        mode: Boundary convention.

    Returns:
        Kinematics with T×N×2 arrays and per-frame inclusion masks.

    Raises:
        KinematicsError: If T < 3.
    """
    frames = traj.frames
    if frames < 3:
        raise KinematicsError(f"trajectory too short for acceleration (T={frames}, need >= 3)")

    z = traj.coords
    velocity = np.zeros_like(z)
    velocity[:-1] = z[1:] - z[:-1]

    acceleration = np.empty_like(z)
    acceleration[0] = velocity[0]
    acceleration[1:] = velocity[1:] - velocity[:-1]

    t = np.arange(frames)
    if mode == PaddingMode.PAPER:
        velocity_mask = np.ones(frames, dtype=bool)
        acceleration_mask = np.ones(frames, dtype=bool)
    else:
        velocity_mask = t < frames - 1
        acceleration_mask = (t >= 1) & (t <= frames - 2)
        velocity[~velocity_mask] = 0.0
        acceleration[~acceleration_mask] = 0.0

    return Kinematics(
        velocity=velocity,
        acceleration=acceleration,
        velocity_mask=velocity_mask,
        acceleration_mask=acceleration_mask,
        padding_mode=mode,
    )


def _axis_variances(samples: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Per-point, per-axis variance (N×2) over the included samples."""
    included = samples[mask]
    count = included.shape[0]
    if count < 2:
        raise KinematicsError(f"need at least 2 included samples for a variance, got {count}")
    centered = included - included.mean(axis=0)
    return (centered**2).sum(axis=0) / (count - 1)


def acceleration_variance(kin: Kinematics, point: int) -> tuple[float, float, float]:
    """
    Acceleration variance of one point.

    Args:
        kin: Kinematics of the trajectory.
        point: Point index.

    Returns:
        (σx, σy, σ) with σ = (σx + σy) / 2.
    """
    if not 0 <= point < kin.points:
        raise KinematicsError(f"point {point} out of range for {kin.points} points")
    sx, sy = _axis_variances(kin.acceleration[:, point : point + 1, :], kin.acceleration_mask)[0]
    return float(sx), float(sy), float((sx + sy) / 2.0)


def point_acceleration_variances(kin: Kinematics) -> np.ndarray:
    """σ(a) of every point (length N)."""
    return _axis_variances(kin.acceleration, kin.acceleration_mask).mean(axis=1)


def point_velocity_variances(kin: Kinematics) -> np.ndarray:
    """σ(v) of every point (length N)."""
    return _axis_variances(kin.velocity, kin.velocity_mask).mean(axis=1)


def _exact_mean(values: np.ndarray) -> float:
    # exact when all points share the same value (e.g. the 1/ε ceiling)
    if np.all(values == values[0]):
        return float(values[0])
    return math.fsum(values.tolist()) / len(values)


def msi_from_variances(variances: Sequence[float] | np.ndarray, epsilon: float = DEFAULT_EPSILON) -> float:
    """
    MSI from per-point acceleration variances.

    Args:
        variances: σ(a) of each selected key point.
        epsilon: Regularizer added to every variance.

    Returns:
        Mean over points of 1 / (σ + ε).

    Raises:
        MsiError: If no variances are given or a term is not finite.
    """
    sigma = np.asarray(variances, dtype=np.float64)
    if sigma.size == 0:
        raise MsiError("empty region: MSI needs at least one key point")
    with np.errstate(divide="ignore"):
        reciprocal = 1.0 / (sigma + epsilon)
    if not np.all(np.isfinite(reciprocal)):
        raise MsiError("zero acceleration variance with epsilon=0 gives an infinite MSI")
    return _exact_mean(reciprocal)


def region_msi(
    traj: LandmarkTrajectory,
    region_map: RegionMap,
    name: str,
    epsilon: float = DEFAULT_EPSILON,
    mode: PaddingMode = PaddingMode.PAPER,
    allow_raw: bool = False,
) -> RegionStats:
    """
    MSI and the baseline statistics of one region.

    Args:
        traj: Normalized trajectory (raw needs ``allow_raw``).
        region_map: Region definitions.
        name: Region to score.
        epsilon: Regularizer ε.
        mode: Boundary convention for the kinematics.
        allow_raw: Accept raw-space input.

    Returns:
        RegionStats with MSI, σ(a), σ(v) and 1/σ(v) region means.

    Raises:
        MsiError: For raw input without override or an empty region.
    """
    if traj.space_tag != SpaceTag.NORMALIZED256 and not allow_raw:
        raise MsiError("normalize first: MSI is only comparable on normalized trajectories")
    if name in region_map.regions and not region_map.regions[name]:
        raise MsiError(f"empty region '{name}'")

    kin = kinematics(select_region(traj, region_map, name), mode)
    sigma_a = point_acceleration_variances(kin)
    sigma_v = point_velocity_variances(kin)

    return RegionStats(
        msi=msi_from_variances(sigma_a, epsilon),
        sigma_a=_exact_mean(sigma_a),
        sigma_v=_exact_mean(sigma_v),
        inv_sigma_v=msi_from_variances(sigma_v, epsilon),
        points=int(sigma_a.size),
    )


def msi_report(
    traj: LandmarkTrajectory,
    region_map: RegionMap,
    video: str,
    regions: Optional[Sequence[str]] = None,
    epsilon: float = DEFAULT_EPSILON,
    mode: PaddingMode = PaddingMode.PAPER,
    crop: Optional[CropBox] = None,
    allow_raw: bool = False,
) -> MsiReport:
    """
    Score several regions of one video.

    Args:
        traj: Trajectory to score.
        region_map: Region definitions.
        video: Video identifier stored in the report.
        regions: Regions to score (default: every region in the map).
        epsilon: Regularizer ε.
        mode: Boundary convention.
        crop: Crop box used to normalize, recorded as metadata.
        allow_raw: Accept raw-space input.

    Returns:
        MsiReport.
    """
    names = list(regions) if regions is not None else region_map.names()
    stats = {
        name: region_msi(traj, region_map, name, epsilon=epsilon, mode=mode, allow_raw=allow_raw)
        for name in names
    }
    return MsiReport(
        video=video,
        epsilon=epsilon,
        padding=mode,
        frames=traj.frames,
        regions=stats,
        crop=crop,
    )


def nlmd(reference: LandmarkTrajectory, candidate: LandmarkTrajectory, out_size: int = 256) -> float:
    """
    Normalized landmark distance between two trajectories.

    Mean Euclidean distance between corresponding points over all frames,
    divided by the normalized frame size.

    Args:
        reference: Ground-truth trajectory.
        candidate: Trajectory to compare.
        out_size: Side of the normalized frame.

    Returns:
        Non-negative distance.

    Raises:
        MsiError: If shapes or coordinate spaces differ.
    """
    if reference.coords.shape != candidate.coords.shape:
        raise MsiError(
            f"trajectory shapes differ: {reference.coords.shape} vs {candidate.coords.shape}"
        )
    if reference.space_tag != candidate.space_tag:
        raise MsiError(
            f"coordinate spaces differ: {reference.space_tag.value} vs {candidate.space_tag.value}"
        )
    distances = np.linalg.norm(reference.coords - candidate.coords, axis=2)
    return float(distances.mean() / out_size)
