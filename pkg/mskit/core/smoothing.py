"""Weighted temporal smoothing of landmark trajectories.

``s̃[t] = Σ_k W[t, k] · s[t + k]`` for offsets ``k`` in ``[-(K-1)/2, (K-1)/2]``,
applied to every point and axis independently. Neighbours beyond either end of
the sequence replicate the edge frame.
"""

from typing import Literal, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import softmax

from mskit.core.errors import SmoothingError
from mskit.models.schemas import GlobalSmootherParams, LandmarkTrajectory, SmoothingWeights

MIN_GAUSSIAN_WIDTH = 1e-3
MAX_GAUSSIAN_WIDTH = 10.0

KernelKind = Literal["uniform", "gaussian"]


def _check_width(k: int) -> None:
    if k < 1 or k % 2 == 0:
        raise SmoothingError(f"K must be odd (got {k})")


def offsets(k: int) -> np.ndarray:
    """Frame offsets covered by a width-K window."""
    _check_width(k)
    half = (k - 1) // 2
    return np.arange(-half, half + 1)


def neighbor_index(frames: int, k: int) -> np.ndarray:
    """T×K source-frame indices with edge replication."""
    return np.clip(np.arange(frames)[:, None] + offsets(k)[None, :], 0, frames - 1)


def neighbor_stack(coords: np.ndarray, k: int) -> np.ndarray:
    """
    Gather the K neighbours of every frame.

    Args:
        coords: B×T×N×2 coordinates.
        k: Smoothing width.

    Returns:
        B×T×K×N×2 array; ``[b, t, j]`` is frame ``t + offsets(k)[j]`` (clipped).
    """
    return coords[:, neighbor_index(coords.shape[1], k)]


def smooth_batch(coords: np.ndarray, weights: np.ndarray, normalized: bool = True) -> np.ndarray:
    """
    Apply per-frame weights to a batch of trajectories.

    Normalized rows are applied as ``s[t] + Σ_k W[t, k] (s[t+k] - s[t])``,
    which is the same operator but leaves constant signals bit-exact.

    Args:
        coords: B×T×N×2 coordinates.
        weights: B×T×K weights.
        normalized: Whether rows sum to one.

    Returns:
        B×T×N×2 smoothed coordinates.
    """
    stack = neighbor_stack(coords, weights.shape[2])
    if normalized:
        return coords + np.einsum("btk,btknd->btnd", weights, stack - coords[:, :, None])
    return np.einsum("btk,btknd->btnd", weights, stack)


def smooth_apply(traj: LandmarkTrajectory, weights: SmoothingWeights) -> LandmarkTrajectory:
    """
    Smooth a trajectory with a T×K weight matrix.

    Args:
        traj: Input trajectory.
        weights: Weights with one row per frame.

    Returns:
        Smoothed trajectory in the same coordinate space.

    Raises:
        SmoothingError: If T differs or K exceeds 2T - 1.
    """
    if weights.frames != traj.frames:
        raise SmoothingError(
            f"weights have {weights.frames} rows but the trajectory has {traj.frames} frames"
        )
    if weights.width > 2 * traj.frames - 1:
        raise SmoothingError(f"K={weights.width} exceeds 2T-1={2 * traj.frames - 1}")

    smoothed = smooth_batch(traj.coords[None], weights.weights[None], weights.normalized)
    return traj.with_coords(smoothed[0])


def normalize_rows(raw: np.ndarray) -> np.ndarray:
    """Scale each row (last axis) to sum to one."""
    totals = raw.sum(axis=-1, keepdims=True)
    if np.any(totals <= 0.0):
        raise SmoothingError("cannot normalize a weight row with zero total")
    return raw / totals


def gaussian_row(k: int, sigma: float) -> np.ndarray:
    """Normalized gaussian kernel of width K; sigma is clamped at 1e-3."""
    sigma = max(float(sigma), MIN_GAUSSIAN_WIDTH)
    row = np.exp(-(offsets(k).astype(np.float64) ** 2) / (2.0 * sigma**2))
    return row / row.sum()


def fixed_weights(kind: KernelKind, k: int, frames: int, sigma: Optional[float] = None) -> SmoothingWeights:
    """
    Hand-crafted kernel repeated on every frame.

    Args:
        kind: "uniform" or "gaussian".
        k: Smoothing width (odd).
        frames: Number of rows T.
        sigma: Gaussian width σ_w (> 0), required for "gaussian".

    Returns:
        Normalized SmoothingWeights with identical rows.

    Raises:
        SmoothingError: For even K, unknown kind or invalid sigma.
    """
    _check_width(k)
    if frames < 1:
        raise SmoothingError(f"frames must be >= 1, got {frames}")

    if kind == "uniform":
        row = np.full(k, 1.0 / k)
    elif kind == "gaussian":
        if sigma is None or not sigma > 0.0:
            raise SmoothingError(f"gaussian kernel needs sigma > 0 (got {sigma})")
        row = gaussian_row(k, sigma)
    else:
        raise SmoothingError(f"unknown kernel '{kind}' (expected uniform or gaussian)")

    return SmoothingWeights(weights=np.tile(row, (frames, 1)))


def init_global_params(k: int, seed: int = 0) -> GlobalSmootherParams:
    """Zero logits, i.e. a uniform kernel."""
    _check_width(k)
    return GlobalSmootherParams(k=k, logits=np.zeros(k), seed=seed)


def global_row(params: GlobalSmootherParams) -> np.ndarray:
    """The shared kernel: softmax of the logits."""
    return softmax(params.logits)


def global_learnable_weights(
    k: int, frames: int, params: Optional[GlobalSmootherParams] = None
) -> SmoothingWeights:
    """
    One learnable K-vector broadcast to all T rows.

    Args:
        k: Smoothing width (odd).
        frames: Number of rows T.
        params: Trained logits (default: zero-initialized).

    Returns:
        Normalized SmoothingWeights whose rows are all equal.
    """
    _check_width(k)
    if params is None:
        params = init_global_params(k)
    elif params.k != k:
        raise SmoothingError(f"model has K={params.k}, requested K={k}")
    return SmoothingWeights(weights=np.tile(global_row(params), (frames, 1)))


def fit_gaussian_width(row: np.ndarray) -> float:
    """
    Gaussian width whose kernel best matches a weight row.

    Least squares between ``row`` (normalized) and ``gaussian_row(K, σ)`` over
    σ in [1e-3, 10].

    Args:
        row: Length-K weight row.

    Returns:
        The fitted σ_w.
    """
    row = np.asarray(row, dtype=np.float64)
    _check_width(row.size)
    target = row / row.sum()

    result = minimize_scalar(
        lambda sigma: float(np.sum((gaussian_row(row.size, sigma) - target) ** 2)),
        bounds=(MIN_GAUSSIAN_WIDTH, MAX_GAUSSIAN_WIDTH),
        method="bounded",
        options={"xatol": 1e-6},
    )
    return float(result.x)
