"""
Application settings using pydantic-settings.

Every field can be overridden with an ``MSKIT_``-prefixed environment variable
or a ``.env`` file, e.g. ``MSKIT_THREADS=4``.
"""

from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    # Execution
    threads: int = Field(default=1, ge=1)
    seed: int = 0

    # Output
    log_level: Literal["debug", "info", "warning", "error"] = "info"

    # Metric & smoothing defaults
    epsilon: float = Field(default=1e-5, gt=0.0)
    smoothing_width: int = Field(default=5, ge=1)

    model_config = SettingsConfigDict(
        env_prefix="MSKIT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @field_validator("smoothing_width")
    @classmethod
    def validate_odd_width(cls, v: int) -> int:
        """Smoothing width must be odd."""
        if v % 2 == 0:
            raise ValueError("K must be odd")
        return v


def get_settings() -> Settings:
    """Load settings fresh from the environment."""
    return Settings()


def resolve_threads(flag_value: int) -> int:
    """
    Resolve the worker thread count.

    ``MSKIT_THREADS`` wins over the ``--threads`` flag when it is set.

    Args:
        flag_value: Value passed on the command line.

    Returns:
        Thread count to use (>= 1).
    """
    settings = get_settings()
    if "threads" in settings.model_fields_set:
        return settings.threads
    return max(1, flag_value)
