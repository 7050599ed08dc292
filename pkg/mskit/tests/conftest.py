"""
Pytest configuration and shared fixtures for mskit tests.

Provides:
- Static and noisy 68-point landmark trajectories
- Small synthetic datasets
- A module-scoped trained adaptive smoother for the slow tests
"""

from pathlib import Path

import numpy as np
import pytest

from mskit.core.synthetic import gen_synthetic
from mskit.core.trajectory import save_trajectory
from mskit.models.schemas import LandmarkTrajectory, SpaceTag, SyntheticDatasetSpec
from mskit.utils import logger


def face_layout(points: int = 68) -> np.ndarray:
    """N×2 base positions; mouth corners 48 and 54 sit 55 px apart."""
    index = np.arange(points)
    layout = np.stack([100.0 + (index % 17) * 5.0, 100.0 + (index // 17) * 10.0], axis=1)
    if points > 54:
        layout[48] = [115.0, 130.0]
        layout[54] = [170.0, 130.0]
    return layout


@pytest.fixture(autouse=True)
def reset_log_level():
    """Every test starts at the default log level."""
    logger.set_level("info")
    yield
    logger.set_level("info")


@pytest.fixture
def static_trajectory() -> LandmarkTrajectory:
    """68 points that never move over 12 frames."""
    coords = np.repeat(face_layout()[None], 12, axis=0)
    return LandmarkTrajectory(coords=coords)


@pytest.fixture
def noisy_trajectory() -> LandmarkTrajectory:
    """68 points with unit white noise around the static layout, 40 frames."""
    rng = np.random.default_rng(7)
    coords = face_layout()[None] + rng.standard_normal((40, 68, 2))
    return LandmarkTrajectory(coords=coords)


@pytest.fixture
def static_csv(tmp_path, static_trajectory) -> Path:
    """Static trajectory written as CSV."""
    path = tmp_path / "static.csv"
    save_trajectory(static_trajectory, path)
    return path


@pytest.fixture
def noisy_csv(tmp_path, noisy_trajectory) -> Path:
    """Noisy trajectory written as CSV."""
    path = tmp_path / "noisy.csv"
    save_trajectory(noisy_trajectory, path)
    return path


def normalized(coords: np.ndarray) -> LandmarkTrajectory:
    """Trajectory tagged as already normalized."""
    return LandmarkTrajectory(coords=coords, space_tag=SpaceTag.NORMALIZED256)


@pytest.fixture
def small_spec() -> SyntheticDatasetSpec:
    """Tiny dataset recipe for fast tests."""
    return SyntheticDatasetSpec(num_sequences=6, frames=16, points=2, seed=3)


@pytest.fixture
def small_pairs(small_spec):
    """Pairs generated from ``small_spec``."""
    return gen_synthetic(small_spec)


@pytest.fixture(scope="module")
def trained_adaptive():
    """Adaptive smoother trained with the default recipe (slow)."""
    from mskit.core.training import train_smoother

    return train_smoother("adaptive", SyntheticDatasetSpec(seed=0), seed=0)
