"""MSI command: score landmark files for motion stability."""

from pathlib import Path
from typing import Optional

import click

from mskit.commands.common import handle_errors, load_region_map, output_path, run_config
from mskit.core.kinematics import msi_report, nlmd
from mskit.core.trajectory import apply_crop, crop_box, load_trajectory, validate_region_map
from mskit.models.schemas import CropBox, CropSpec, MsiReport, PaddingMode, RegionMap, SpaceTag
from mskit.utils import logger
from mskit.utils.files import dumps_json, write_text_atomic
from mskit.utils.parallel import gather_ordered


def score_file(
    path: Path,
    region_map: RegionMap,
    regions: Optional[list[str]],
    epsilon: float,
    padding: PaddingMode,
    crop_spec: CropSpec,
    space: str,
    file_format: Optional[str],
    reference: Optional[Path] = None,
) -> MsiReport:
    """
    Load, normalize and score one landmark file.

    Args:
        path: Landmark file.
        region_map: Region definitions.
        regions: Regions to score (None = all).
        epsilon: MSI regularizer.
        padding: Boundary convention.
        crop_spec: Crop constants.
        space: "raw" (crop first), "normalized" (already cropped) or
            "raw-unnormalized" (score raw coordinates as they are).
        file_format: Explicit landmark format, or None to infer.
        reference: Optional ground-truth landmarks for NLMD.

    Returns:
        MsiReport for the file.
    """
    traj = load_trajectory(path, format=file_format)
    validate_region_map(region_map, traj)

    box: Optional[CropBox] = None
    if space == "raw":
        box = crop_box(traj, crop_spec, region_map.mouth_corners)
        traj = apply_crop(traj, box)
    elif space == "normalized":
        traj = traj.with_coords(traj.coords, space_tag=SpaceTag.NORMALIZED256)

    report = msi_report(
        traj,
        region_map,
        video=path.stem,
        regions=regions,
        epsilon=epsilon,
        mode=padding,
        crop=box,
        allow_raw=space == "raw-unnormalized",
    )

    if reference is not None:
        ref = load_trajectory(reference, format=file_format)
        if box is not None:
            ref = apply_crop(ref, box)
        elif space == "normalized":
            ref = ref.with_coords(ref.coords, space_tag=SpaceTag.NORMALIZED256)
        report = report.model_copy(update={"nlmd": nlmd(ref, traj, out_size=crop_spec.out_size)})

    return report


@click.command()
@click.argument("landmarks", nargs=-1, required=True, type=click.Path())
@click.option(
    "--format",
    "file_format",
    type=click.Choice(["csv", "json"]),
    help="Landmark format (default: from suffix)",
)
@click.option("--region-map", type=click.Path(), help="YAML/JSON region map (default: iBUG 68-point lip/jaw)")
@click.option("--region", "regions", multiple=True, help="Region to score; repeatable (default: all regions)")
@click.option(
    "--epsilon",
    type=click.FloatRange(min=0.0),
    default=None,
    help="MSI regularizer ε (default: MSKIT_EPSILON or 1e-5)",
)
@click.option(
    "--padding",
    type=click.Choice([mode.value for mode in PaddingMode]),
    default=PaddingMode.PAPER.value,
    show_default=True,
    help="Boundary convention for velocities and accelerations",
)
@click.option("--ratio", type=float, default=0.25, show_default=True, help="Mouth width / crop width")
@click.option("--warmup", type=int, default=5, show_default=True, help="Frames used to place the crop box")
@click.option("--out-size", type=int, default=256, show_default=True, help="Normalized frame size (pixels)")
@click.option(
    "--space",
    type=click.Choice(["raw", "normalized", "raw-unnormalized"]),
    default="raw",
    show_default=True,
    help="Input coordinate space: raw (crop first), normalized (already cropped), "
    "raw-unnormalized (score raw pixels, not comparable across videos)",
)
@click.option("--reference", type=click.Path(), help="Ground-truth landmarks; adds NLMD to the report")
@click.option("--json", "json_out", type=click.Path(), help="Output MsiReport JSON path")
@click.pass_context
@handle_errors
def msi(
    ctx: click.Context,
    landmarks: tuple[str, ...],
    file_format: Optional[str],
    region_map: Optional[str],
    regions: tuple[str, ...],
    epsilon: Optional[float],
    padding: str,
    ratio: float,
    warmup: int,
    out_size: int,
    space: str,
    reference: Optional[str],
    json_out: Optional[str],
) -> None:
    """
    Compute the Motion Stability Index of landmark files.

    Each file is normalized with the mouth-ratio crop, then MSI and the
    σ(v), 1/σ(v), σ(a) baselines are computed per region. With several
    files the JSON output is {"reports": [...]} in input order.
    """
    config = run_config(ctx)
    destination = output_path(ctx, json_out, option="--json")
    mapping = load_region_map(region_map)
    crop_spec = CropSpec(ratio=ratio, warmup_frames=warmup, out_size=out_size)
    paths = [Path(p) for p in landmarks]
    if reference is not None and len(paths) > 1:
        raise click.UsageError("--reference needs exactly one landmark file")

    logger.debug(f"scoring {len(paths)} file(s) with {config.threads} thread(s)")
    reports = gather_ordered(
        lambda path: score_file(
            path,
            mapping,
            list(regions) or None,
            config.epsilon if epsilon is None else epsilon,
            PaddingMode(padding),
            crop_spec,
            space,
            file_format,
            Path(reference) if reference else None,
        ),
        paths,
        config.threads,
    )

    if len(reports) == 1:
        payload = reports[0].to_json_dict()
    else:
        payload = {"reports": [report.to_json_dict() for report in reports]}
    write_text_atomic(destination, dumps_json(payload))

    for report in reports:
        logger.print_msi_table(
            report.video, {name: stats.model_dump() for name, stats in report.regions.items()}
        )
    logger.success(f"MSI report written to {destination}")
