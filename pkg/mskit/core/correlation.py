"""Metric-vs-score correlation harness.

Compares the four per-video statistics (σ(v), 1/σ(v), σ(a), MSI) of every
region against subjective scores with Pearson's r, plus Spearman's rho as a
rank-based companion.
"""

from collections.abc import Iterable, Mapping, Sequence
from typing import Optional

import numpy as np
from scipy import stats

from mskit.core.errors import CorrelationError
from mskit.models.schemas import STATISTIC_LABELS, STATISTICS, CorrelationTable, MsiReport

MIN_VIDEOS = 3

# video -> region -> statistic -> value
Metrics = Mapping[str, Mapping[str, Mapping[str, float]]]


def _validate_pair(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(y, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise CorrelationError("correlation inputs must be 1-D vectors")
    if a.size != b.size:
        raise CorrelationError(f"vectors have different lengths ({a.size} vs {b.size})")
    if a.size < MIN_VIDEOS:
        raise CorrelationError(f"at least {MIN_VIDEOS} samples are required, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise CorrelationError("correlation inputs contain non-finite values")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise CorrelationError("zero variance: correlation is undefined for a constant vector")
    return a, b


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Sample Pearson correlation coefficient.

    Args:
        x: First vector (length >= 3, not constant).
        y: Second vector, same length.

    Returns:
        r in [-1, 1].

    Raises:
        CorrelationError: On length mismatch, too few samples or zero variance.
    """
    a, b = _validate_pair(x, y)
    r, _ = stats.pearsonr(a, b)
    return float(np.clip(r, -1.0, 1.0))


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation, with the same input rules as ``pearson``."""
    a, b = _validate_pair(x, y)
    rho, _ = stats.spearmanr(a, b)
    return float(np.clip(rho, -1.0, 1.0))


def metrics_from_reports(reports: Iterable[MsiReport]) -> dict[str, dict[str, dict[str, float]]]:
    """
    Collect per-video statistics from MSI reports.

    Raises:
        CorrelationError: If two reports share a video id.
    """
    metrics: dict[str, dict[str, dict[str, float]]] = {}
    for report in reports:
        if report.video in metrics:
            raise CorrelationError(f"duplicate video id '{report.video}'")
        metrics[report.video] = {
            region: {name: float(getattr(values, name)) for name in STATISTICS}
            for region, values in report.regions.items()
        }
    return metrics


def correlation_table(
    metrics: Metrics,
    scores: Mapping[str, float],
    regions: Optional[Sequence[str]] = None,
) -> CorrelationTable:
    """
    Correlate every statistic of every region with the subjective scores.

    Args:
        metrics: video -> region -> statistic -> value.
        scores: video -> subjective score.
        regions: Regions to include (default: those of the first video, in order).

    Returns:
        CorrelationTable with Pearson and Spearman coefficients.

    Raises:
        CorrelationError: On id mismatch, fewer than 3 videos or missing statistics.
    """
    missing_scores = sorted(set(metrics) - set(scores))
    missing_metrics = sorted(set(scores) - set(metrics))
    if missing_scores or missing_metrics:
        parts = []
        if missing_scores:
            parts.append(f"no score for: {', '.join(missing_scores)}")
        if missing_metrics:
            parts.append(f"no metrics for: {', '.join(missing_metrics)}")
        raise CorrelationError(f"video ids do not match ({'; '.join(parts)})")

    videos = sorted(metrics)
    if len(videos) < MIN_VIDEOS:
        raise CorrelationError(f"≥ {MIN_VIDEOS} videos required, got {len(videos)}")

    if regions is None:
        regions = list(metrics[videos[0]])

    score_vector = [float(scores[video]) for video in videos]
    pearson_table: dict[str, dict[str, float]] = {}
    spearman_table: dict[str, dict[str, float]] = {}

    for region in regions:
        pearson_table[region] = {}
        spearman_table[region] = {}
        for statistic in STATISTICS:
            try:
                column = [float(metrics[video][region][statistic]) for video in videos]
            except KeyError as e:
                raise CorrelationError(f"missing statistic {e} for region '{region}'")
            pearson_table[region][statistic] = pearson(column, score_vector)
            spearman_table[region][statistic] = spearman(column, score_vector)

    return CorrelationTable(videos=videos, pearson=pearson_table, spearman=spearman_table)


def format_correlation_table(table: CorrelationTable, method: str = "pearson") -> str:
    """
    Render one coefficient set as an aligned plain-text table.

    Rows are regions, columns the four statistics, three decimals.

    Args:
        table: Correlation results.
        method: "pearson" or "spearman".

    Returns:
        Table text ending in a newline.
    """
    if method not in ("pearson", "spearman"):
        raise CorrelationError(f"unknown correlation method '{method}'")
    values: dict[str, dict[str, float]] = getattr(table, method)

    header = ["Region", *(STATISTIC_LABELS[s] for s in STATISTICS)]
    rows = [[region, *(f"{coeffs[s]:.3f}" for s in STATISTICS)] for region, coeffs in values.items()]
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]

    lines = []
    for row in [header, *rows]:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"
