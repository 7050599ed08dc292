"""Erode command: augmented mask-out of an image."""

from pathlib import Path
from typing import Optional

import click

from mskit.commands.common import handle_errors, load_region_map, output_path, seed_or_default
from mskit.core.mask_augment import (
    image_from_pixels,
    mask_from_landmarks,
    mask_from_pixels,
    random_augment,
)
from mskit.core.synthetic import inject_jitter
from mskit.core.trajectory import load_trajectory
from mskit.models.schemas import AugmentSpec, BinaryMask, GrayImage, WhiteJitter
from mskit.utils import logger
from mskit.utils.config import load_model
from mskit.utils.files import read_png, write_png


def resolve_spec(
    spec_path: Optional[str],
    radius_min: Optional[int],
    radius_max: Optional[int],
    shift: Optional[int],
    rotate: Optional[float],
    fill: Optional[float],
    seed: int,
) -> AugmentSpec:
    """Augmentation ranges from an optional spec file overridden by flags."""
    spec = AugmentSpec(seed=seed) if spec_path is None else load_model(Path(spec_path), AugmentSpec)
    data = spec.model_dump()
    low, high = data["erode_dilate_radius_range"]
    data["erode_dilate_radius_range"] = (
        low if radius_min is None else radius_min,
        high if radius_max is None else radius_max,
    )
    for key, value in (("shift_range", shift), ("rotate_range", rotate), ("fill_value", fill)):
        if value is not None:
            data[key] = value
    return AugmentSpec.model_validate(data)


def landmark_mask(
    path: str,
    frame: int,
    region_map: Optional[str],
    region: str,
    noise: float,
    seed: int,
    image: GrayImage,
) -> BinaryMask:
    """Region mask rasterized from (optionally noised) landmarks of one frame."""
    traj = load_trajectory(Path(path))
    if noise > 0.0:
        traj = inject_jitter(traj, WhiteJitter(sigma=noise), seed=seed)
    return mask_from_landmarks(traj, frame, load_region_map(region_map), region, image.width, image.height)


@click.command()
@click.argument("image", type=click.Path())
@click.option("--mask", "mask_path", type=click.Path(), help="Mask PNG (white = masked region)")
@click.option("--landmarks", type=click.Path(), help="Landmark file to rasterize the mask from")
@click.option("--frame", type=int, default=0, show_default=True, help="Landmark frame for --landmarks")
@click.option("--region", default="lip", show_default=True, help="Region rasterized from --landmarks")
@click.option("--region-map", type=click.Path(), help="YAML/JSON region map (default: iBUG 68-point)")
@click.option(
    "--landmark-noise",
    type=click.FloatRange(min=0.0),
    default=0.0,
    show_default=True,
    help="White noise std added to the landmarks before rasterizing",
)
@click.option("--spec", "spec_path", type=click.Path(), help="Augment spec (YAML/JSON)")
@click.option("--radius-min", type=int, default=None, help="Smallest erode(-)/dilate(+) radius")
@click.option("--radius-max", type=int, default=None, help="Largest erode(-)/dilate(+) radius")
@click.option("--shift", type=int, default=None, help="Shift range ± pixels")
@click.option("--rotate", type=float, default=None, help="Rotation range ± degrees")
@click.option("--fill", type=float, default=None, help="Fill value in [0, 1] (default: 0, black)")
@click.option("--seed", type=int, default=None, help="Augmentation seed (default: global --seed)")
@click.option("--index", type=click.IntRange(min=0), default=0, show_default=True, help="Sample index")
@click.option("--out", type=click.Path(), help="Output image PNG")
@click.option("--mask-out", type=click.Path(), help="Also write the applied mask PNG")
@click.pass_context
@handle_errors
def erode(
    ctx: click.Context,
    image: str,
    mask_path: Optional[str],
    landmarks: Optional[str],
    frame: int,
    region: str,
    region_map: Optional[str],
    landmark_noise: float,
    spec_path: Optional[str],
    radius_min: Optional[int],
    radius_max: Optional[int],
    shift: Optional[int],
    rotate: Optional[float],
    fill: Optional[float],
    seed: Optional[int],
    index: int,
    out: Optional[str],
    mask_out: Optional[str],
) -> None:
    """
    Mask out an image with a randomly eroded/dilated, shifted and rotated mask.

    The mask comes from --mask or is rasterized from a landmark region with
    --landmarks. Output is grayscale.
    """
    if (mask_path is None) == (landmarks is None):
        raise click.UsageError("give exactly one of --mask and --landmarks")
    destination = output_path(ctx, out)
    resolved_seed = seed_or_default(ctx, seed)
    spec = resolve_spec(spec_path, radius_min, radius_max, shift, rotate, fill, resolved_seed)

    source = image_from_pixels(read_png(Path(image)), label=image)
    if mask_path is not None:
        mask = mask_from_pixels(read_png(Path(mask_path)))
    else:
        mask = landmark_mask(
            str(landmarks), frame, region_map, region, landmark_noise, resolved_seed, source
        )

    eroded, used = random_augment(source, mask, spec, index=index)
    write_png(destination, eroded.pixels)
    if mask_out:
        write_png(Path(mask_out), used.bits.astype(float))
    logger.success(f"Masked {used.area} pixels (of {mask.area}) → {destination}")
