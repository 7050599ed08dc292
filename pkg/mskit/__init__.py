"""mskit - Motion Stability Toolkit for landmark-trajectory jitter analysis."""

__version__ = "0.1.0"
