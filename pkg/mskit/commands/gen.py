"""Gen command: write a synthetic dataset to disk."""

from pathlib import Path
from typing import Any, Optional

import click

from mskit.commands.common import handle_errors, output_path, run_config
from mskit.core.synthetic import gen_synthetic
from mskit.core.trajectory import save_trajectory
from mskit.models.schemas import SyntheticDatasetSpec, SyntheticPair
from mskit.utils import logger
from mskit.utils.config import load_model, save_model_yaml
from mskit.utils.files import staged_dir, write_json
from mskit.utils.parallel import gather_ordered

MANIFEST_NAME = "manifest.json"
SPEC_NAME = "spec.yaml"


def write_pair(pair: SyntheticPair, directory: Path, file_format: str) -> dict[str, Any]:
    """Write one pair as ``seq_XXXX_clean`` / ``seq_XXXX_jittered`` files."""
    stem = f"seq_{pair.index:04d}"
    clean_name = f"{stem}_clean.{file_format}"
    jittered_name = f"{stem}_jittered.{file_format}"
    save_trajectory(pair.clean, directory / clean_name, format=file_format)  # type: ignore[arg-type]
    save_trajectory(pair.jittered, directory / jittered_name, format=file_format)  # type: ignore[arg-type]
    return {**pair.summary(), "clean": clean_name, "jittered": jittered_name}


@click.command()
@click.option(
    "--spec", "spec_path", type=click.Path(), help="Dataset spec (YAML/JSON; default recipe if omitted)"
)
@click.option("--num-sequences", type=int, default=None, help="Override the number of sequences")
@click.option("--frames", type=int, default=None, help="Override the frames per sequence")
@click.option("--points", type=int, default=None, help="Override the points per frame")
@click.option(
    "--seed", type=int, default=None, help="Override the dataset seed (default: spec, then global --seed)"
)
@click.option(
    "--format",
    "file_format",
    type=click.Choice(["csv", "json"]),
    default="csv",
    show_default=True,
    help="Landmark file format",
)
@click.option("--out", type=click.Path(file_okay=False), help="Output directory")
@click.pass_context
@handle_errors
def gen(
    ctx: click.Context,
    spec_path: Optional[str],
    num_sequences: Optional[int],
    frames: Optional[int],
    points: Optional[int],
    seed: Optional[int],
    file_format: str,
    out: Optional[str],
) -> None:
    """
    Generate (clean, jittered) landmark pairs.

    The directory receives one file per clean and jittered sequence and a
    manifest.json holding the resolved spec and each sequence's family and
    jitter model. The resolved spec is also written as spec.yaml, which
    --spec accepts to regenerate the same dataset. Nothing is left in the
    directory if generation fails.
    """
    config = run_config(ctx)
    directory = output_path(ctx, out)

    if spec_path is None:
        spec = SyntheticDatasetSpec(seed=config.seed if seed is None else seed)
    else:
        spec = load_model(Path(spec_path), SyntheticDatasetSpec)
        if seed is not None:
            spec = spec.model_copy(update={"seed": seed})
    overrides = {"num_sequences": num_sequences, "frames": frames, "points": points}
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if overrides:
        # revalidate so overrides get the same range checks as the spec file
        spec = SyntheticDatasetSpec.model_validate({**spec.model_dump(), **overrides})

    logger.info(f"Generating {spec.num_sequences} sequences of {spec.frames} frames (seed {spec.seed})")
    pairs = gen_synthetic(spec, threads=config.threads)

    with staged_dir(directory) as staging:
        entries = gather_ordered(lambda pair: write_pair(pair, staging, file_format), pairs, config.threads)
        write_json(staging / MANIFEST_NAME, {"spec": spec.model_dump(mode="json"), "sequences": entries})
        save_model_yaml(spec, staging / SPEC_NAME)
    logger.success(f"Wrote {len(pairs)} pairs to {directory}")
