"""CLI command implementations."""

from mskit.commands import correlate, erode, gen, jitter, msi, slices, smooth, train

__all__ = ["correlate", "erode", "gen", "jitter", "msi", "slices", "smooth", "train"]
