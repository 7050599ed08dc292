"""Train command: fit a global or adaptive smoother on synthetic data."""

from pathlib import Path
from typing import Optional

import click
import pandas as pd

from mskit.commands.common import handle_errors, output_path, run_config, seed_or_default
from mskit.core.model_file import save_model
from mskit.core.synthetic import gen_synthetic
from mskit.core.training import DEFAULT_EPOCHS, effective_widths, evaluate_smoother, train_smoother
from mskit.models.schemas import AdaptiveSmootherParams, SyntheticDatasetSpec
from mskit.utils import logger
from mskit.utils.config import load_model
from mskit.utils.files import write_text_atomic


def loss_curve_csv(losses: list[float]) -> str:
    """Render a loss curve as ``epoch,loss`` CSV."""
    df = pd.DataFrame({"epoch": range(len(losses)), "loss": losses})
    return df.to_csv(index=False, float_format="%.17g", lineterminator="\n")


@click.command()
@click.option(
    "--spec", "spec_path", type=click.Path(), help="Dataset spec (YAML/JSON; default recipe if omitted)"
)
@click.option(
    "--regime",
    type=click.Choice(["global", "adaptive"]),
    default="adaptive",
    show_default=True,
    help="Smoother to train",
)
@click.option("--lr", type=float, default=None, help="Learning rate (default: 0.5 global, 0.1 adaptive)")
@click.option(
    "--epochs",
    type=click.IntRange(min=0),
    default=None,
    help="Gradient steps (default: 200 global, 500 adaptive)",
)
@click.option("--seed", type=int, default=None, help="Initialization seed (default: global --seed)")
@click.option(
    "--k",
    type=int,
    default=None,
    help="Smoothing width K, odd (default: MSKIT_SMOOTHING_WIDTH or 5)",
)
@click.option("--out", type=click.Path(), help="Output model file")
@click.option("--loss-csv", type=click.Path(), help="Loss-curve CSV (default: <out>.loss.csv)")
@click.pass_context
@handle_errors
def train(
    ctx: click.Context,
    spec_path: Optional[str],
    regime: str,
    lr: Optional[float],
    epochs: Optional[int],
    seed: Optional[int],
    k: Optional[int],
    out: Optional[str],
    loss_csv: Optional[str],
) -> None:
    """
    Train a smoother by full-batch gradient descent on synthetic pairs.

    Writes the model file and a loss curve with one row per epoch plus the
    final loss. The dataset seed comes from the spec; --seed only sets the
    parameter initialization.
    """
    config = run_config(ctx)
    destination = output_path(ctx, out)
    curve_path = Path(loss_csv) if loss_csv else destination.with_name(destination.name + ".loss.csv")
    spec = SyntheticDatasetSpec() if spec_path is None else load_model(Path(spec_path), SyntheticDatasetSpec)
    init_seed = seed_or_default(ctx, seed)
    steps = DEFAULT_EPOCHS[regime] if epochs is None else epochs
    width = config.smoothing_width if k is None else k

    logger.print_header(f"Training {regime} smoother")
    logger.print_config_summary(
        {
            "sequences": spec.num_sequences,
            "frames": spec.frames,
            "points": spec.points,
            "dataset seed": spec.seed,
            "init seed": init_seed,
            "K": width,
            "epochs": steps,
        }
    )

    pairs = gen_synthetic(spec, threads=config.threads)
    with logger.ProgressTracker("Training", total=steps) as progress:
        result = train_smoother(
            regime,  # type: ignore[arg-type]
            pairs,
            lr=lr,
            epochs=steps,
            seed=init_seed,
            k=width,
            on_epoch=lambda epoch, loss: progress.update(description=f"Training (loss {loss:.4g})"),
        )

    save_model(result.model, destination)
    write_text_atomic(curve_path, loss_curve_csv(result.losses))

    logger.info(f"Parameters: {result.model.parameter_count}")
    logger.info(f"Loss: {result.losses[0]:.6g} → {result.losses[-1]:.6g}")
    logger.info(f"Training MSE (eval mode): {evaluate_smoother(result.model, pairs):.6g}")
    if isinstance(result.model, AdaptiveSmootherParams):
        for family, sigma_w in effective_widths(result.model, pairs).items():
            logger.muted(f"  effective σ_w on {family}: {sigma_w:.3f}")
    logger.success(f"Model written to {destination}")
    logger.success(f"Loss curve written to {curve_path}")
