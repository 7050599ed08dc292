"""Utility modules for configuration, logging, file I/O and parallel execution."""
