"""Command-line interface for mskit."""

from typing import Optional

import click
from pydantic import ValidationError

from mskit import __version__
from mskit.core.config import get_settings, resolve_threads
from mskit.models.schemas import RunConfig
from mskit.utils import logger


@click.group()
@click.version_option(version=__version__, prog_name="mskit")
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Worker threads for per-file/per-sequence work (MSKIT_THREADS overrides)",
)
@click.option("--seed", type=int, default=None, help="Default random seed (default: MSKIT_SEED or 0)")
@click.option(
    "--output",
    type=click.Path(dir_okay=True),
    default=None,
    help="Default output path for subcommands without their own --out",
)
@click.option(
    "--log-level",
    type=click.Choice(["debug", "info", "warning", "error"]),
    default=None,
    help="Minimum level of diagnostics printed on stderr (default: info)",
)
@click.pass_context
def cli(
    ctx: click.Context,
    threads: int,
    seed: Optional[int],
    output: Optional[str],
    log_level: Optional[str],
) -> None:
    """
    mskit - Motion Stability toolkit.

    Measures motion jitter in landmark trajectories with the Motion Stability
    Index (MSI), removes it with fixed, global or adaptive temporal smoothing,
    and provides the supporting tools: synthetic jitter, mask erosion
    augmentation, vertical-slice visualization and metric/score correlation.
    """
    try:
        settings = get_settings()
    except ValidationError as e:
        first = e.errors()[0]
        field = "MSKIT_" + ".".join(str(part) for part in first["loc"]).upper()
        raise click.UsageError(f"invalid value for {field}: {first['msg']}")

    config = RunConfig(
        seed=settings.seed if seed is None else seed,
        threads=resolve_threads(threads),
        output=output,
        log_level=log_level or settings.log_level,
        epsilon=settings.epsilon,
        smoothing_width=settings.smoothing_width,
    )
    logger.set_level(config.log_level)
    ctx.obj = config


# Import commands after defining cli group to avoid circular imports
from mskit.commands import correlate, erode, gen, jitter, msi, slices, smooth, train  # noqa: E402

cli.add_command(msi.msi)
cli.add_command(smooth.smooth)
cli.add_command(train.train)
cli.add_command(jitter.jitter)
cli.add_command(gen.gen)
cli.add_command(correlate.correlate)
cli.add_command(erode.erode)
cli.add_command(slices.slice_command)


def main() -> None:
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
