"""Data models for mskit using Pydantic v2.

Array-valued fields are numpy ``float64``/``bool`` arrays. Models holding arrays
are frozen and their arrays are marked read-only, so every value object can be
shared between threads.
"""

from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


# ============================================================================
# ENUMS & CONSTANTS
# ============================================================================


class SpaceTag(str, Enum):
    """Coordinate space a trajectory lives in."""

    RAW = "raw"  # source frame pixels
    NORMALIZED256 = "normalized256"  # after mouth-ratio crop and rescale


class PaddingMode(str, Enum):
    """Boundary handling for velocities and accelerations."""

    PAPER = "paper"  # zero velocity padding at both ends, all T samples kept
    INTERIOR = "interior"  # boundary samples flagged absent


# iBUG 68-point layout
IBUG_JAW = list(range(0, 17))
IBUG_LIP = list(range(48, 68))
IBUG_MOUTH_CORNERS = (48, 54)


# ============================================================================
# TRAJECTORIES & REGIONS
# ============================================================================


class LandmarkTrajectory(BaseModel):
    """Per-frame 2D coordinates of N tracked points over T frames."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coords: np.ndarray = Field(description="T×N×2 float64 coordinates")
    fps: float = Field(default=25.0, gt=0.0, description="Frames per second (metadata only)")
    space_tag: SpaceTag = Field(default=SpaceTag.RAW, description="Coordinate space")

    @field_validator("coords", mode="before")
    @classmethod
    def validate_coords(cls, v: Any) -> np.ndarray:
        """Ensure a finite T×N×2 float64 array."""
        array = np.array(v, dtype=np.float64)
        if array.ndim != 3 or array.shape[2] != 2:
            raise ValueError(f"coords must have shape T×N×2, got {array.shape}")
        if array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"coords must have T >= 1 and N >= 1, got {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("coords contain non-finite values")
        return _readonly(array)

    @property
    def frames(self) -> int:
        """Number of frames T."""
        return int(self.coords.shape[0])

    @property
    def points(self) -> int:
        """Number of landmarks N."""
        return int(self.coords.shape[1])

    def with_coords(
        self, coords: np.ndarray, space_tag: Optional[SpaceTag] = None
    ) -> "LandmarkTrajectory":
        """Return a trajectory with new coordinates and the same metadata."""
        return LandmarkTrajectory(
            coords=coords,
            fps=self.fps,
            space_tag=self.space_tag if space_tag is None else space_tag,
        )


class RegionMap(BaseModel):
    """Named index sets over the N landmark points."""

    model_config = ConfigDict(frozen=True)

    regions: dict[str, list[int]] = Field(description="Region name -> sorted unique indices")
    mouth_corners: tuple[int, int] = Field(
        default=IBUG_MOUTH_CORNERS, description="(left, right) mouth-corner indices"
    )

    @field_validator("regions")
    @classmethod
    def normalize_regions(cls, v: dict[str, list[int]]) -> dict[str, list[int]]:
        """Sort and deduplicate indices; reject negatives."""
        normalized = {}
        for name, indices in v.items():
            if any(i < 0 for i in indices):
                raise ValueError(f"region '{name}' has negative indices")
            normalized[name] = sorted(set(int(i) for i in indices))
        return normalized

    @classmethod
    def ibug68(cls) -> "RegionMap":
        """Default map for the 68-point iBUG layout."""
        return cls(regions={"lip": IBUG_LIP, "jaw": IBUG_JAW}, mouth_corners=IBUG_MOUTH_CORNERS)

    def names(self) -> list[str]:
        """Region names in definition order."""
        return list(self.regions)

    def max_index(self) -> int:
        """Largest index referenced by any region or the mouth corners."""
        indices = [i for region in self.regions.values() for i in region]
        return max([*indices, *self.mouth_corners])


class CropSpec(BaseModel):
    """Mouth-ratio crop and rescale constants."""

    model_config = ConfigDict(frozen=True)

    ratio: float = Field(default=0.25, gt=0.0, lt=1.0, description="Mouth width / crop width")
    warmup_frames: int = Field(default=5, ge=1, description="Frames used to place the box")
    out_size: int = Field(default=256, ge=16, description="Output side length (pixels)")


class CropBox(BaseModel):
    """Axis-aligned square crop box computed by normalize_crop."""

    model_config = ConfigDict(frozen=True)

    mouth_width: float = Field(gt=0.0)
    side: float = Field(gt=0.0, description="Box side S in source pixels")
    left: float
    top: float
    scale: float = Field(gt=0.0, description="out_size / S")
    spec: CropSpec


# ============================================================================
# KINEMATICS & MSI
# ============================================================================


class Kinematics(BaseModel):
    """Velocities and accelerations of every point."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    velocity: np.ndarray = Field(description="T×N×2, units/frame")
    acceleration: np.ndarray = Field(description="T×N×2, units/frame²")
    velocity_mask: np.ndarray = Field(description="T booleans: sample included in statistics")
    acceleration_mask: np.ndarray = Field(description="T booleans: sample included in statistics")
    padding_mode: PaddingMode

    @model_validator(mode="after")
    def validate_shapes(self) -> "Kinematics":
        """Velocity and acceleration share T and N."""
        if self.velocity.shape != self.acceleration.shape:
            raise ValueError("velocity and acceleration shapes differ")
        frames = self.velocity.shape[0]
        if self.velocity_mask.shape != (frames,) or self.acceleration_mask.shape != (frames,):
            raise ValueError("masks must have one entry per frame")
        for array in (self.velocity, self.acceleration, self.velocity_mask, self.acceleration_mask):
            array.setflags(write=False)
        return self

    @property
    def frames(self) -> int:
        return int(self.velocity.shape[0])

    @property
    def points(self) -> int:
        return int(self.velocity.shape[1])


class RegionStats(BaseModel):
    """MSI and baseline statistics for one region."""

    msi: float = Field(gt=0.0)
    sigma_a: float = Field(ge=0.0, description="Mean per-point acceleration variance")
    sigma_v: float = Field(ge=0.0, description="Mean per-point velocity variance")
    inv_sigma_v: float = Field(ge=0.0, description="Mean per-point 1/(σ(v)+ε)")
    points: int = Field(ge=1, description="Number of key points K")


class MsiReport(BaseModel):
    """Per-region MSI values with the settings they were computed with."""

    video: str
    epsilon: float = Field(default=1e-5, ge=0.0)
    padding: PaddingMode = PaddingMode.PAPER
    axis_reduction: Literal["mean_xy"] = "mean_xy"
    frames: int = Field(ge=1)
    regions: dict[str, RegionStats]
    crop: Optional[CropBox] = None
    nlmd: Optional[float] = Field(default=None, ge=0.0)

    def to_json_dict(self) -> dict[str, Any]:
        """JSON-ready dict; optional fields are omitted when unset."""
        return self.model_dump(mode="json", exclude_none=True)


STATISTICS = ("sigma_v", "inv_sigma_v", "sigma_a", "msi")
STATISTIC_LABELS = {"sigma_v": "σ(v)", "inv_sigma_v": "1/σ(v)", "sigma_a": "σ(a)", "msi": "MSI"}


class CorrelationTable(BaseModel):
    """Correlation of each statistic with subjective scores, per region."""

    videos: list[str]
    pearson: dict[str, dict[str, float]] = Field(description="region -> statistic -> r")
    spearman: dict[str, dict[str, float]] = Field(description="region -> statistic -> rho")

    def to_json_dict(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


# ============================================================================
# SMOOTHING
# ============================================================================


class SmoothingWeights(BaseModel):
    """T×K matrix of per-frame combination weights."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: np.ndarray = Field(description="T×K non-negative weights")
    normalized: bool = True

    @field_validator("weights", mode="before")
    @classmethod
    def validate_weights(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] < 1:
            raise ValueError(f"weights must have shape T×K, got {array.shape}")
        if array.shape[1] % 2 == 0:
            raise ValueError("K must be odd")
        if not np.all(np.isfinite(array)) or np.any(array < 0.0):
            raise ValueError("weights must be finite and non-negative")
        return _readonly(array)

    @model_validator(mode="after")
    def validate_rows(self) -> "SmoothingWeights":
        if self.normalized and not np.allclose(self.weights.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("normalized weights must have rows summing to 1")
        return self

    @property
    def frames(self) -> int:
        return int(self.weights.shape[0])

    @property
    def width(self) -> int:
        """Smoothing width K."""
        return int(self.weights.shape[1])


class SmootherArchitecture(BaseModel):
    """Shape of the adaptive weight-estimation network."""

    model_config = ConfigDict(frozen=True)

    c_in: int = Field(default=4, ge=1, description="Input features per frame")
    k: int = Field(default=5, ge=1, description="Smoothing width (odd)")
    channels: tuple[int, ...] = Field(default=(32, 32, 16, 16))
    kernel_size: int = Field(default=3, ge=1)
    bn_eps: float = Field(default=1e-5, gt=0.0)
    bn_momentum: float = Field(default=0.1, gt=0.0, le=1.0)

    @field_validator("k")
    @classmethod
    def validate_k(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError("K must be odd")
        return v

    @field_validator("kernel_size")
    @classmethod
    def validate_kernel(cls, v: int) -> int:
        if v % 2 == 0:
            raise ValueError("kernel_size must be odd")
        return v

    @property
    def layer_channels(self) -> list[tuple[int, int]]:
        """(in, out) channels of each conv layer, the last one producing K."""
        sizes = [self.c_in, *self.channels, self.k]
        return list(zip(sizes[:-1], sizes[1:]))


class AdaptiveSmootherParams(BaseModel):
    """Learnable parameters and BN running statistics of the adaptive smoother."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    architecture: SmootherArchitecture
    params: dict[str, np.ndarray] = Field(description="Learnable tensors by name")
    buffers: dict[str, np.ndarray] = Field(description="BN running statistics by name")
    seed: int = 0

    @property
    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))


class GlobalSmootherParams(BaseModel):
    """One shared logit vector, broadcast to every frame through a softmax."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    k: int = Field(ge=1)
    logits: np.ndarray
    seed: int = 0

    @model_validator(mode="after")
    def validate_logits(self) -> "GlobalSmootherParams":
        if self.k % 2 == 0:
            raise ValueError("K must be odd")
        if self.logits.shape != (self.k,):
            raise ValueError(f"logits must have shape ({self.k},), got {self.logits.shape}")
        return self

    @property
    def parameter_count(self) -> int:
        return int(self.logits.size)


class SyntheticDatasetSpec(BaseModel):
    """Recipe for (clean, jittered) trajectory pairs."""

    model_config = ConfigDict(frozen=True)

    num_sequences: int = Field(default=200, ge=1)
    frames: int = Field(default=64, ge=1)
    points: int = Field(default=4, ge=1)
    seed: int = 0
    fps: float = Field(default=25.0, gt=0.0)

    # Clean-signal families
    family_mix: dict[str, float] = Field(
        default_factory=lambda: {"slow": 0.4, "fast": 0.4, "chirp": 0.2}
    )
    slow_amplitude: float = Field(default=2.0, ge=0.0, description="Max level of slow segments")
    slow_segments: tuple[int, int] = Field(default=(1, 3))
    fast_amplitude_range: tuple[float, float] = Field(default=(2.0, 5.0))
    fast_frequency_range: tuple[float, float] = Field(
        default=(0.15, 0.25), description="Cycles per frame"
    )
    chirp_frequency_range: tuple[float, float] = Field(default=(0.01, 0.25))

    # Jitter
    jitter_std_range: tuple[float, float] = Field(default=(0.5, 1.5))
    jitter_mix: dict[str, float] = Field(
        default_factory=lambda: {"white": 0.7, "impulse": 0.3, "step": 0.0}
    )
    impulse_rate: float = Field(default=0.05, ge=0.0, le=1.0)
    impulse_gain: float = Field(default=4.0, ge=0.0, description="Pop amplitude / jitter std")
    step_gain: float = Field(default=2.0, ge=0.0, description="Step offset / jitter std")

    @field_validator("family_mix")
    @classmethod
    def validate_family_mix(cls, v: dict[str, float]) -> dict[str, float]:
        return _validate_mix(v, {"slow", "fast", "chirp"}, "family_mix")

    @field_validator("jitter_mix")
    @classmethod
    def validate_jitter_mix(cls, v: dict[str, float]) -> dict[str, float]:
        return _validate_mix(v, {"white", "impulse", "step"}, "jitter_mix")

    @field_validator(
        "slow_segments",
        "fast_amplitude_range",
        "fast_frequency_range",
        "chirp_frequency_range",
        "jitter_std_range",
    )
    @classmethod
    def validate_range(cls, v: tuple) -> tuple:
        if v[0] > v[1]:
            raise ValueError(f"range must be ordered, got {v}")
        if v[0] < 0:
            raise ValueError(f"range must be non-negative, got {v}")
        return v


def _validate_mix(mix: dict[str, float], allowed: set[str], name: str) -> dict[str, float]:
    unknown = set(mix) - allowed
    if unknown:
        raise ValueError(f"{name} has unknown entries {sorted(unknown)} (allowed: {sorted(allowed)})")
    if any(fraction < 0 for fraction in mix.values()):
        raise ValueError(f"{name} fractions must be non-negative")
    total = sum(mix.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"{name} fractions must sum to 1, got {total}")
    return {key: float(mix.get(key, 0.0)) for key in sorted(allowed)}


# ============================================================================
# JITTER
# ============================================================================


class WhiteJitter(BaseModel):
    """I.i.d. gaussian noise on every coordinate."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["white"] = "white"
    sigma: float = Field(ge=0.0)


class ImpulseJitter(BaseModel):
    """Gaussian pops on random isolated frames."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["impulse"] = "impulse"
    rate: float = Field(ge=0.0, le=1.0, description="Probability that a frame pops")
    amplitude: float = Field(ge=0.0, description="Std of the pop displacement")


class StepJitter(BaseModel):
    """Constant offset applied to every frame from ``frame`` on."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["step"] = "step"
    frame: int = Field(ge=0)
    offset: tuple[float, float]


Jitter = Annotated[Union[WhiteJitter, ImpulseJitter, StepJitter], Field(discriminator="kind")]


class SyntheticPair(BaseModel):
    """One generated sequence: the clean signal and its jittered copy."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(ge=0)
    family: Literal["slow", "fast", "chirp"]
    jitter: Jitter
    clean: LandmarkTrajectory
    jittered: LandmarkTrajectory

    def summary(self) -> dict[str, Any]:
        """Manifest entry without the coordinates."""
        return {"index": self.index, "family": self.family, "jitter": self.jitter.model_dump(mode="json")}


# ============================================================================
# RASTERS
# ============================================================================


class BinaryMask(BaseModel):
    """H×W boolean mask; ``outside`` is the value of pixels beyond the frame."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    bits: np.ndarray
    outside: bool = False

    @field_validator("bits", mode="before")
    @classmethod
    def validate_bits(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=bool)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"mask must be a non-empty H×W array, got shape {array.shape}")
        return _readonly(array)

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def area(self) -> int:
        return int(self.bits.sum())

    def complement(self) -> "BinaryMask":
        """Set complement, including the beyond-frame value."""
        return BinaryMask(bits=~self.bits, outside=not self.outside)

    def is_subset_of(self, other: "BinaryMask") -> bool:
        return bool(np.all(~self.bits | other.bits))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.outside == other.outside and np.array_equal(self.bits, other.bits)

    __hash__ = None  # type: ignore[assignment]


class GrayImage(BaseModel):
    """H×W image with pixel values in [0, 1]."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    pixels: np.ndarray

    @field_validator("pixels", mode="before")
    @classmethod
    def validate_pixels(cls, v: Any) -> np.ndarray:
        array = np.array(v, dtype=np.float64)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise ValueError(f"image must be a non-empty H×W array, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise ValueError("image contains non-finite pixels")
        return _readonly(np.clip(array, 0.0, 1.0))

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)

    __hash__ = None  # type: ignore[assignment]


class AugmentSpec(BaseModel):
    """Ranges for random mask erosion/dilation, shift and rotation."""

    model_config = ConfigDict(frozen=True)

    erode_dilate_radius_range: tuple[int, int] = Field(
        default=(-2, 2), description="Negative = erode, positive = dilate"
    )
    shift_range: int = Field(default=0, ge=0, description="± pixels on each axis")
    rotate_range: float = Field(default=0.0, ge=0.0, description="± degrees")
    fill_value: float = Field(default=0.0, ge=0.0, le=1.0)
    seed: int = 0

    @field_validator("erode_dilate_radius_range")
    @classmethod
    def validate_radius_range(cls, v: tuple[int, int]) -> tuple[int, int]:
        if v[0] > v[1]:
            raise ValueError(f"radius range must be ordered, got {v}")
        return v


class FrameSequence(BaseModel):
    """Ordered frames of identical shape (H×W or H×W×C)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    frames: list[np.ndarray]

    @field_validator("frames", mode="before")
    @classmethod
    def validate_frames(cls, v: Any) -> list[np.ndarray]:
        frames = [np.array(frame, dtype=np.float64) for frame in v]
        if len(frames) < 2:
            raise ValueError(f"a frame sequence needs at least 2 frames, got {len(frames)}")
        shape = frames[0].shape
        if len(shape) not in (2, 3):
            raise ValueError(f"frames must be H×W or H×W×C, got shape {shape}")
        for index, frame in enumerate(frames):
            if frame.shape != shape:
                raise ValueError(f"frame {index} has shape {frame.shape}, expected {shape}")
        return [_readonly(frame) for frame in frames]

    @property
    def length(self) -> int:
        return len(self.frames)

    @property
    def height(self) -> int:
        return int(self.frames[0].shape[0])

    @property
    def width(self) -> int:
        return int(self.frames[0].shape[1])


# ============================================================================
# CONFIGURATION
# ============================================================================


class RunConfig(BaseModel):
    """Global command-line options shared by every subcommand."""

    seed: int = Field(default=0, description="Default random seed")
    threads: int = Field(default=1, ge=1, description="Worker threads")
    output: Optional[Path] = Field(default=None, description="Default output path")
    log_level: Literal["debug", "info", "warning", "error"] = "info"
    epsilon: float = Field(default=1e-5, ge=0.0, description="Default MSI regularizer")
    smoothing_width: int = Field(default=5, ge=1, description="Default smoothing width K")
