"""Slice command: vertical-slice jitter visualization."""

from pathlib import Path
from typing import Optional

import click

from mskit.commands.common import handle_errors, output_path, run_config
from mskit.core.slicevis import (
    MAX_PANELS,
    add_labels,
    load_frame_sequence,
    panel_offsets,
    slice_image,
    slice_triptych,
)
from mskit.utils import logger
from mskit.utils.files import write_png


@click.command(name="slice")
@click.argument("directories", nargs=-1, required=True, type=click.Path())
@click.option("--column", type=int, required=True, help="Pixel column sliced in every frame")
@click.option(
    "--band",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Columns averaged around --column",
)
@click.option("--label", "labels", multiple=True, help="Panel label; repeat once per directory")
@click.option(
    "--marker/--no-marker",
    default=None,
    help="Draw the slice-position marker row (default: only for several directories)",
)
@click.option("--out", type=click.Path(), help="Output PNG")
@click.pass_context
@handle_errors
def slice_command(
    ctx: click.Context,
    directories: tuple[str, ...],
    column: int,
    band: int,
    labels: tuple[str, ...],
    marker: Optional[bool],
    out: Optional[str],
) -> None:
    """
    Concatenate one pixel column of every frame along time.

    Each DIRECTORY holds frame_000000.png, frame_000001.png, ... Up to three
    directories (e.g. baseline, smoothed, real) are laid out side by side.
    """
    if len(directories) > MAX_PANELS:
        raise click.UsageError(f"at most {MAX_PANELS} directories, got {len(directories)}")
    if labels and len(labels) != len(directories):
        raise click.UsageError(f"got {len(labels)} --label values for {len(directories)} directories")
    config = run_config(ctx)
    destination = output_path(ctx, out)

    seqs = [load_frame_sequence(Path(directory), threads=config.threads) for directory in directories]
    with_marker = len(seqs) > 1 if marker is None else marker
    if with_marker or len(seqs) > 1:
        image = slice_triptych(seqs, column, band)
        if not with_marker:
            image = image[1:]
    else:
        image = slice_image(seqs[0], column, band)
    if labels:
        image = add_labels(image, list(labels), panel_offsets(seqs))

    write_png(destination, image)
    logger.success(f"Slice of {len(seqs)} sequence(s) at column {column} → {destination}")
