"""Correlate command: compare metrics with subjective scores."""

import json
from pathlib import Path
from typing import Optional

import click
import pandas as pd
from pydantic import ValidationError

from mskit.commands.common import handle_errors, output_path
from mskit.core.correlation import correlation_table, format_correlation_table, metrics_from_reports
from mskit.core.errors import ConfigError, CorrelationError
from mskit.models.schemas import STATISTIC_LABELS, MsiReport
from mskit.utils import logger
from mskit.utils.files import read_json, require_file, write_json, write_text_atomic


def load_reports(path: Path) -> list[MsiReport]:
    """
    MSI reports from a file written by ``mskit msi``.

    Accepts a single report or ``{"reports": [...]}``.
    """
    try:
        data = read_json(path)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e.msg}")
    items = data["reports"] if isinstance(data, dict) and "reports" in data else [data]
    try:
        return [MsiReport.model_validate(item) for item in items]
    except ValidationError as e:
        raise ConfigError(f"invalid MSI report in {path}: {e.errors()[0]['msg']}")


def load_scores(path: Path) -> dict[str, float]:
    """Subjective scores from a ``video,score`` CSV."""
    require_file(path)
    try:
        df = pd.read_csv(path, dtype={"video": str}, skipinitialspace=True)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigError(f"invalid score file {path}: {e}")
    missing = {"video", "score"} - set(df.columns)
    if missing:
        raise ConfigError(f"score file {path} lacks column(s): {', '.join(sorted(missing))}")

    duplicated = df["video"][df["video"].duplicated()].tolist()
    if duplicated:
        raise CorrelationError(f"duplicate scores for: {', '.join(duplicated)}")
    try:
        return {video: float(score) for video, score in zip(df["video"], df["score"])}
    except ValueError as e:
        raise ConfigError(f"invalid score in {path}: {e}")


@click.command()
@click.argument("reports", nargs=-1, required=True, type=click.Path())
@click.option("--scores", required=True, type=click.Path(), help="CSV with video,score columns")
@click.option("--region", "regions", multiple=True, help="Region to correlate; repeatable (default: all)")
@click.option("--out", type=click.Path(), help="Output CorrelationTable JSON")
@click.option("--text", "text_out", type=click.Path(), help="Also write the Pearson table as plain text")
@click.pass_context
@handle_errors
def correlate(
    ctx: click.Context,
    reports: tuple[str, ...],
    scores: str,
    regions: tuple[str, ...],
    out: Optional[str],
    text_out: Optional[str],
) -> None:
    """
    Correlate MSI and baseline statistics with subjective scores.

    REPORTS are JSON files from `mskit msi`. Video ids (the landmark file
    stems) must match the score file exactly; at least three are required.
    """
    destination = output_path(ctx, out)
    loaded = [report for path in reports for report in load_reports(Path(path))]
    table = correlation_table(metrics_from_reports(loaded), load_scores(Path(scores)), list(regions) or None)

    write_json(destination, table.to_json_dict())
    if text_out:
        write_text_atomic(Path(text_out), format_correlation_table(table, "pearson"))

    logger.print_correlation_table("Pearson", table.pearson, STATISTIC_LABELS)
    logger.print_correlation_table("Spearman", table.spearman, STATISTIC_LABELS)
    logger.success(f"Correlation of {len(table.videos)} videos written to {destination}")
