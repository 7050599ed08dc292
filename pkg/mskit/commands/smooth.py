"""Smooth command: remove jitter from a landmark file."""

from pathlib import Path
from typing import Optional

import click

from mskit.commands.common import handle_errors, output_path, run_config
from mskit.core.adaptive_net import adaptive_forward, trajectory_features
from mskit.core.errors import ModelFormatError
from mskit.core.model_file import SmootherModel, load_model_file
from mskit.core.smoothing import fixed_weights, global_learnable_weights, smooth_apply
from mskit.core.trajectory import infer_format, load_trajectory, save_trajectory
from mskit.models.schemas import (
    AdaptiveSmootherParams,
    GlobalSmootherParams,
    LandmarkTrajectory,
    SmoothingWeights,
)
from mskit.utils import logger


def model_weights(model: SmootherModel, traj: LandmarkTrajectory, k: Optional[int]) -> SmoothingWeights:
    """
    Per-frame weights predicted by a trained model.

    Raises:
        ModelFormatError: If ``k`` is given and differs from the model's K.
    """
    if isinstance(model, AdaptiveSmootherParams):
        arch = model.architecture
        if k is not None and k != arch.k:
            raise ModelFormatError(f"model expects K={arch.k}, C_in={arch.c_in}; got --k {k}")
        return adaptive_forward(model, trajectory_features(traj.coords))
    if k is not None and k != model.k:
        raise ModelFormatError(f"model expects K={model.k}; got --k {k}")
    return global_learnable_weights(model.k, traj.frames, model)


@click.command()
@click.argument("landmarks", type=click.Path())
@click.option(
    "--mode",
    type=click.Choice(["fixed", "global", "adaptive"]),
    default="fixed",
    show_default=True,
    help="Weight regime",
)
@click.option("--model", "model_path", type=click.Path(), help="Trained model file (global/adaptive modes)")
@click.option(
    "--kernel",
    type=click.Choice(["uniform", "gaussian"]),
    default="uniform",
    show_default=True,
    help="Fixed kernel shape",
)
@click.option(
    "--sigma", type=float, default=1.0, show_default=True, help="Gaussian kernel width σ_w (frames)"
)
@click.option(
    "--k",
    type=int,
    default=None,
    help="Smoothing width K, odd (default: MSKIT_SMOOTHING_WIDTH or the model's K)",
)
@click.option(
    "--format",
    "file_format",
    type=click.Choice(["csv", "json"]),
    help="Landmark format (default: from suffix)",
)
@click.option("--out", type=click.Path(), help="Output landmark file (written in the input's format)")
@click.pass_context
@handle_errors
def smooth(
    ctx: click.Context,
    landmarks: str,
    mode: str,
    model_path: Optional[str],
    kernel: str,
    sigma: float,
    k: Optional[int],
    file_format: Optional[str],
    out: Optional[str],
) -> None:
    """
    Apply weighted temporal smoothing to a landmark file.

    Fixed mode uses a uniform or gaussian kernel. Global and adaptive modes
    load a model written by `mskit train`; adaptive models expect
    coordinates in the normalized 256×256 space they were trained in.
    """
    source = Path(landmarks)
    destination = output_path(ctx, out)
    traj = load_trajectory(source, format=file_format)

    if mode == "fixed":
        width = run_config(ctx).smoothing_width if k is None else k
        weights = fixed_weights(kernel, width, traj.frames, sigma=sigma)  # type: ignore[arg-type]
    else:
        if model_path is None:
            raise click.UsageError(f"--mode {mode} requires --model")
        model = load_model_file(Path(model_path))
        expected = AdaptiveSmootherParams if mode == "adaptive" else GlobalSmootherParams
        if not isinstance(model, expected):
            raise ModelFormatError(f"{model_path} is not a {mode} smoother model")
        weights = model_weights(model, traj, k)

    smoothed = smooth_apply(traj, weights)
    save_trajectory(smoothed, destination, format=infer_format(source, file_format))
    logger.success(f"Smoothed {traj.frames} frames (K={weights.width}, {mode}) → {destination}")
