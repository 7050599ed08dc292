"""Helpers shared by the subcommands."""

import functools
from collections.abc import Callable
from pathlib import Path
from typing import Any, Optional, TypeVar

import click
from pydantic import ValidationError

from mskit.core.errors import MskitError
from mskit.models.schemas import RegionMap, RunConfig
from mskit.utils import logger
from mskit.utils.config import load_model

F = TypeVar("F", bound=Callable[..., Any])

EXIT_COMPUTATION = 1
EXIT_USAGE = 2


def run_config(ctx: click.Context) -> RunConfig:
    """Global options stored on the context by the ``mskit`` group."""
    obj = ctx.find_root().obj
    return obj if isinstance(obj, RunConfig) else RunConfig()


def handle_errors(func: F) -> F:
    """
    Map failures to exit codes.

    ``MskitError`` exits with 1. Missing files and invalid option values exit
    with 2. The message goes to stderr.
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except MskitError as e:
            logger.error(e.message)
            raise click.exceptions.Exit(EXIT_COMPUTATION)
        except (FileNotFoundError, NotADirectoryError, IsADirectoryError) as e:
            logger.error(str(e) if "no such file" in str(e) else f"no such file: {e}")
            raise click.exceptions.Exit(EXIT_USAGE)
        except ValidationError as e:
            first = e.errors()[0]
            field = ".".join(str(part) for part in first["loc"])
            logger.error(f"invalid value for {field or e.title}: {first['msg']}")
            raise click.exceptions.Exit(EXIT_USAGE)

    return wrapper  # type: ignore[return-value]


def output_path(ctx: click.Context, out: Optional[str], option: str = "--out") -> Path:
    """Resolve a command's output path, falling back to the global ``--output``."""
    if out:
        return Path(out)
    default = run_config(ctx).output
    if default is None:
        raise click.UsageError(f"missing {option} (or the global --output)")
    return default


def seed_or_default(ctx: click.Context, seed: Optional[int]) -> int:
    """Command seed, falling back to the global ``--seed``."""
    return run_config(ctx).seed if seed is None else seed


def load_region_map(path: Optional[str]) -> RegionMap:
    """Region map from a YAML/JSON file, or the 68-point default."""
    return RegionMap.ibug68() if path is None else load_model(Path(path), RegionMap)
