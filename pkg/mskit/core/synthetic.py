"""Synthetic jitter and (clean, jittered) dataset generation.

Clean signals live in normalized space: every point rests at a base position in
[64, 192] and follows a motion shared by the whole sequence, scaled per point.
Three motion families are drawn:

* ``slow``: piecewise-constant levels (a few held poses).
* ``fast``: a high-frequency sinusoid along a random direction.
* ``chirp``: a sinusoid whose frequency sweeps linearly over the sequence.
"""

from typing import Optional

import numpy as np

from mskit.core.errors import SmoothingError
from mskit.models.schemas import (
    ImpulseJitter,
    Jitter,
    LandmarkTrajectory,
    SpaceTag,
    StepJitter,
    SyntheticDatasetSpec,
    SyntheticPair,
    WhiteJitter,
)
from mskit.utils.parallel import gather_ordered

BASE_RANGE = (64.0, 192.0)
POINT_GAIN_RANGE = (0.5, 1.0)


def inject_jitter(traj: LandmarkTrajectory, jitter: Jitter, seed: int = 0) -> LandmarkTrajectory:
    """
    Add synthetic jitter to a trajectory.

    Args:
        traj: Clean trajectory.
        jitter: White noise, impulse pops or a step offset.
        seed: Seed for the random draws.

    Returns:
        Jittered trajectory in the same space.

    Raises:
        SmoothingError: If a step frame lies outside the trajectory.
    """
    rng = np.random.default_rng(seed)
    coords = np.array(traj.coords)

    if isinstance(jitter, WhiteJitter):
        coords = coords + jitter.sigma * rng.standard_normal(coords.shape)

    elif isinstance(jitter, ImpulseJitter):
        hits = rng.random(traj.frames) < jitter.rate
        # keep pops isolated: drop a hit whose previous frame also popped
        hits[1:] &= ~hits[:-1]
        pops = rng.standard_normal(coords.shape)
        coords = coords + np.where(hits[:, None, None], jitter.amplitude * pops, 0.0)

    elif isinstance(jitter, StepJitter):
        if jitter.frame >= traj.frames:
            raise SmoothingError(f"step frame {jitter.frame} out of range for {traj.frames} frames")
        coords[jitter.frame :] += np.asarray(jitter.offset, dtype=np.float64)

    else:
        raise SmoothingError(f"unknown jitter kind {jitter!r}")

    return traj.with_coords(coords)


def _slow_motion(rng: np.random.Generator, spec: SyntheticDatasetSpec) -> np.ndarray:
    frames = spec.frames
    low, high = spec.slow_segments
    segments = max(1, min(int(rng.integers(low, high + 1)), frames))
    cuts = np.sort(rng.choice(np.arange(1, frames), size=segments - 1, replace=False))
    levels = rng.uniform(-spec.slow_amplitude, spec.slow_amplitude, size=(segments, 2))
    return levels[np.searchsorted(cuts, np.arange(frames), side="right")]


def _direction(rng: np.random.Generator) -> np.ndarray:
    angle = rng.uniform(0.0, 2.0 * np.pi)
    return np.array([np.cos(angle), np.sin(angle)])


def _fast_motion(rng: np.random.Generator, spec: SyntheticDatasetSpec) -> np.ndarray:
    t = np.arange(spec.frames, dtype=np.float64)
    amplitude = rng.uniform(*spec.fast_amplitude_range)
    frequency = rng.uniform(*spec.fast_frequency_range)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return amplitude * np.sin(2.0 * np.pi * frequency * t + phase)[:, None] * _direction(rng)


def _chirp_motion(rng: np.random.Generator, spec: SyntheticDatasetSpec) -> np.ndarray:
    t = np.arange(spec.frames, dtype=np.float64)
    amplitude = rng.uniform(*spec.fast_amplitude_range)
    f0, f1 = rng.uniform(*spec.chirp_frequency_range, size=2)
    span = max(spec.frames - 1, 1)
    phase = 2.0 * np.pi * (f0 * t + (f1 - f0) * t**2 / (2.0 * span)) + rng.uniform(0.0, 2.0 * np.pi)
    return amplitude * np.sin(phase)[:, None] * _direction(rng)


_MOTIONS = {"slow": _slow_motion, "fast": _fast_motion, "chirp": _chirp_motion}


def _sample_jitter(rng: np.random.Generator, spec: SyntheticDatasetSpec) -> Jitter:
    kinds = list(spec.jitter_mix)
    kind = kinds[int(rng.choice(len(kinds), p=list(spec.jitter_mix.values())))]
    sigma = float(rng.uniform(*spec.jitter_std_range))
    if kind == "white":
        return WhiteJitter(sigma=sigma)
    if kind == "impulse":
        return ImpulseJitter(rate=spec.impulse_rate, amplitude=sigma * spec.impulse_gain)
    frame = int(rng.integers(1, spec.frames)) if spec.frames > 1 else 0
    offset = sigma * spec.step_gain * _direction(rng)
    return StepJitter(frame=frame, offset=(float(offset[0]), float(offset[1])))


def generate_pair(spec: SyntheticDatasetSpec, index: int, seed: np.random.SeedSequence) -> SyntheticPair:
    """Generate the ``index``-th pair from its own seed sequence."""
    rng = np.random.default_rng(seed)
    families = list(spec.family_mix)
    family = families[int(rng.choice(len(families), p=list(spec.family_mix.values())))]

    base = rng.uniform(*BASE_RANGE, size=(spec.points, 2))
    gains = rng.uniform(*POINT_GAIN_RANGE, size=spec.points)
    motion = _MOTIONS[family](rng, spec)
    coords = base[None, :, :] + gains[None, :, None] * motion[:, None, :]

    clean = LandmarkTrajectory(coords=coords, fps=spec.fps, space_tag=SpaceTag.NORMALIZED256)
    jitter = _sample_jitter(rng, spec)
    jittered = inject_jitter(clean, jitter, seed=int(rng.integers(0, 2**63 - 1)))
    return SyntheticPair(index=index, family=family, jitter=jitter, clean=clean, jittered=jittered)


def gen_synthetic(spec: SyntheticDatasetSpec, threads: int = 1) -> list[SyntheticPair]:
    """
    Generate the dataset described by ``spec``.

    Each sequence draws from its own child seed, so the result does not depend
    on the thread count.

    Args:
        spec: Dataset recipe.
        threads: Worker threads.

    Returns:
        Pairs in index order.
    """
    seeds = np.random.SeedSequence(spec.seed).spawn(spec.num_sequences)
    return gather_ordered(lambda item: generate_pair(spec, item[0], item[1]), list(enumerate(seeds)), threads)


def pairs_to_arrays(
    pairs: list[SyntheticPair], families: Optional[set[str]] = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    Stack pairs into (clean, jittered) B×T×N×2 arrays.

    Raises:
        SmoothingError: If the pairs have different shapes or none are selected.
    """
    selected = [pair for pair in pairs if families is None or pair.family in families]
    if not selected:
        raise SmoothingError("no sequences to stack")
    shape = selected[0].clean.coords.shape
    for pair in selected:
        if pair.clean.coords.shape != shape or pair.jittered.coords.shape != shape:
            raise SmoothingError(
                f"sequence {pair.index} has shape {pair.clean.coords.shape}, expected {shape}"
            )
    clean = np.stack([pair.clean.coords for pair in selected])
    jittered = np.stack([pair.jittered.coords for pair in selected])
    return clean, jittered
