"""Jitter command: add synthetic jitter to a landmark file."""

from pathlib import Path
from typing import Optional

import click

from mskit.commands.common import handle_errors, output_path, seed_or_default
from mskit.core.synthetic import inject_jitter
from mskit.core.trajectory import infer_format, load_trajectory, save_trajectory
from mskit.models.schemas import ImpulseJitter, Jitter, StepJitter, WhiteJitter
from mskit.utils import logger


def build_jitter(
    kind: str,
    sigma: float,
    rate: float,
    amplitude: Optional[float],
    frame: Optional[int],
    offset: tuple[float, float],
) -> Jitter:
    """Jitter model from command-line flags."""
    if kind == "white":
        return WhiteJitter(sigma=sigma)
    if kind == "impulse":
        return ImpulseJitter(rate=rate, amplitude=4.0 * sigma if amplitude is None else amplitude)
    if frame is None:
        raise click.UsageError("--kind step requires --frame")
    return StepJitter(frame=frame, offset=offset)


@click.command()
@click.argument("landmarks", type=click.Path())
@click.option(
    "--kind",
    type=click.Choice(["white", "impulse", "step"]),
    default="white",
    show_default=True,
    help="Jitter model",
)
@click.option("--sigma", type=float, default=1.0, show_default=True, help="White noise std (pixels)")
@click.option("--rate", type=float, default=0.05, show_default=True, help="Impulse probability per frame")
@click.option("--amplitude", type=float, default=None, help="Impulse pop std (default: 4 × sigma)")
@click.option("--frame", type=int, default=None, help="First frame of a step offset")
@click.option(
    "--offset",
    type=(float, float),
    default=(1.0, 0.0),
    show_default=True,
    help="Step offset DX DY (pixels)",
)
@click.option("--seed", type=int, default=None, help="Noise seed (default: global --seed)")
@click.option(
    "--format",
    "file_format",
    type=click.Choice(["csv", "json"]),
    help="Landmark format (default: from suffix)",
)
@click.option("--out", type=click.Path(), help="Output landmark file (written in the input's format)")
@click.pass_context
@handle_errors
def jitter(
    ctx: click.Context,
    landmarks: str,
    kind: str,
    sigma: float,
    rate: float,
    amplitude: Optional[float],
    frame: Optional[int],
    offset: tuple[float, float],
    seed: Optional[int],
    file_format: Optional[str],
    out: Optional[str],
) -> None:
    """Add white, impulse or step jitter to a landmark file."""
    source = Path(landmarks)
    destination = output_path(ctx, out)
    model = build_jitter(kind, sigma, rate, amplitude, frame, offset)
    traj = load_trajectory(source, format=file_format)

    jittered = inject_jitter(traj, model, seed=seed_or_default(ctx, seed))
    save_trajectory(jittered, destination, format=infer_format(source, file_format))
    logger.success(f"Added {kind} jitter to {traj.frames} frames → {destination}")
