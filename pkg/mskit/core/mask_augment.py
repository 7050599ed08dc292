"""Mouth-mask augmentation: disk morphology, rigid transforms and mask-out.

Morphology pads the frame with the mask's ``outside`` value, which is false
for ordinary masks, so masks never grow in from beyond the frame. Complementing
a mask flips ``outside`` too, which keeps erosion and dilation exact duals.
"""

from typing import Optional

import numpy as np
from PIL import Image, ImageDraw
from scipy.spatial import ConvexHull, QhullError

from mskit.core.errors import MaskError
from mskit.core.trajectory import select_region
from mskit.models.schemas import AugmentSpec, BinaryMask, GrayImage, LandmarkTrajectory, RegionMap


def disk_offsets(radius: int) -> np.ndarray:
    """(dy, dx) offsets with Euclidean norm <= radius."""
    span = np.arange(-radius, radius + 1)
    dy, dx = np.meshgrid(span, span, indexing="ij")
    inside = dy**2 + dx**2 <= radius**2
    return np.stack([dy[inside], dx[inside]], axis=1)


def _morph(mask: BinaryMask, radius: int, combine: str) -> BinaryMask:
    if radius < 0:
        raise MaskError(f"radius must be >= 0, got {radius}")
    if radius == 0:
        return mask

    height, width = mask.height, mask.width
    padded = np.pad(mask.bits, radius, constant_values=mask.outside)
    windows = [
        padded[radius + dy : radius + dy + height, radius + dx : radius + dx + width]
        for dy, dx in disk_offsets(radius)
    ]
    bits = np.logical_and.reduce(windows) if combine == "and" else np.logical_or.reduce(windows)
    return BinaryMask(bits=bits, outside=mask.outside)


def erode(mask: BinaryMask, radius: int) -> BinaryMask:
    """
    Disk erosion: a pixel stays set iff every pixel within ``radius`` is set.

    Args:
        mask: Input mask.
        radius: Disk radius (>= 0); 0 returns the mask unchanged.

    Returns:
        Eroded mask.
    """
    return _morph(mask, radius, "and")


def dilate(mask: BinaryMask, radius: int) -> BinaryMask:
    """Disk dilation: a pixel is set iff any pixel within ``radius`` is set."""
    return _morph(mask, radius, "or")


def morph(mask: BinaryMask, radius: int) -> BinaryMask:
    """Signed morphology: negative radius erodes, positive dilates."""
    return erode(mask, -radius) if radius < 0 else dilate(mask, radius)


def centroid(mask: BinaryMask) -> tuple[float, float]:
    """(row, column) centroid of the set pixels."""
    rows, cols = np.nonzero(mask.bits)
    if rows.size == 0:
        raise MaskError("empty mask has no centroid")
    return float(rows.mean()), float(cols.mean())


def transform_mask(mask: BinaryMask, dx: float = 0.0, dy: float = 0.0, theta: float = 0.0) -> BinaryMask:
    """
    Rotate a mask about its centroid, then translate it.

    Nearest-neighbour inverse mapping: every output pixel looks up the source
    pixel it came from. Content moved out of the frame is dropped and pixels
    with no source are false.

    Args:
        mask: Input mask (must not be empty).
        dx: Horizontal shift in pixels (positive = right).
        dy: Vertical shift in pixels (positive = down).
        theta: Rotation in degrees (positive = counter-clockwise on screen).

    Returns:
        Transformed mask.

    Raises:
        MaskError: If the mask is empty.
    """
    cy, cx = centroid(mask)
    height, width = mask.height, mask.width
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)

    # undo the shift, then the rotation
    y = rows - dy - cy
    x = cols - dx - cx
    angle = np.deg2rad(theta)
    cos, sin = np.cos(angle), np.sin(angle)
    src_x = np.rint(cos * x - sin * y + cx).astype(np.int64)
    src_y = np.rint(sin * x + cos * y + cy).astype(np.int64)

    valid = (src_x >= 0) & (src_x < width) & (src_y >= 0) & (src_y < height)
    bits = np.zeros((height, width), dtype=bool)
    bits[valid] = mask.bits[src_y[valid], src_x[valid]]
    return BinaryMask(bits=bits)


def apply_mask_out(image: GrayImage, mask: BinaryMask, fill: float = 0.0) -> GrayImage:
    """
    Replace masked pixels with ``fill``.

    Raises:
        MaskError: On a size mismatch or a fill outside [0, 1].
    """
    if (image.height, image.width) != (mask.height, mask.width):
        raise MaskError(
            f"image is {image.width}x{image.height} but mask is {mask.width}x{mask.height}"
        )
    if not 0.0 <= fill <= 1.0:
        raise MaskError(f"fill must be in [0, 1], got {fill}")
    return GrayImage(pixels=np.where(mask.bits, fill, image.pixels))


def sample_augmentation(spec: AugmentSpec, index: int = 0) -> tuple[int, int, int, float]:
    """Draw (radius, dx, dy, theta) for the ``index``-th augmented sample."""
    rng = np.random.default_rng([spec.seed, index])
    low, high = spec.erode_dilate_radius_range
    radius = int(rng.integers(low, high + 1))
    dx, dy = (int(v) for v in rng.integers(-spec.shift_range, spec.shift_range + 1, size=2))
    theta = float(rng.uniform(-spec.rotate_range, spec.rotate_range))
    return radius, dx, dy, theta


def random_augment(
    image: GrayImage, mask: BinaryMask, spec: AugmentSpec, index: int = 0
) -> tuple[GrayImage, BinaryMask]:
    """
    Randomly perturb a mask and mask out the image with it.

    Morphology first, then the rigid transform, then mask-out with
    ``spec.fill_value``. Draws depend only on ``spec.seed`` and ``index``.

    Args:
        image: Source image.
        mask: Mouth mask.
        spec: Augmentation ranges.
        index: Sample index within a batch.

    Returns:
        (eroded image, mask that was applied).
    """
    radius, dx, dy, theta = sample_augmentation(spec, index)
    used = morph(mask, radius)
    if used.area > 0 and (dx, dy, theta) != (0, 0, 0.0):
        used = transform_mask(used, dx=dx, dy=dy, theta=theta)
    return apply_mask_out(image, used, spec.fill_value), used


def mask_from_landmarks(
    traj: LandmarkTrajectory,
    frame: int,
    region_map: RegionMap,
    region: str,
    width: int,
    height: int,
) -> BinaryMask:
    """
    Rasterize the convex hull of a region's points in one frame.

    Args:
        traj: Trajectory in the image's pixel space.
        frame: Frame index.
        region_map: Region definitions.
        region: Region to rasterize (e.g. "lip").
        width: Mask width.
        height: Mask height.

    Raises:
        MaskError: For an invalid frame or a degenerate point set.
    """
    if not 0 <= frame < traj.frames:
        raise MaskError(f"frame {frame} out of range for {traj.frames} frames")
    points = select_region(traj, region_map, region).coords[frame]
    try:
        hull = ConvexHull(points)
    except (QhullError, ValueError) as e:
        raise MaskError(f"region '{region}' does not span an area in frame {frame}: {e}")

    canvas = Image.new("L", (width, height), 0)
    ImageDraw.Draw(canvas).polygon([tuple(points[i]) for i in hull.vertices], fill=255)
    return BinaryMask(bits=np.asarray(canvas) > 0)


def mask_from_pixels(pixels: np.ndarray, threshold: float = 0.5) -> BinaryMask:
    """Binary mask from [0, 1] pixels (grayscale, or RGB averaged)."""
    if pixels.ndim == 3:
        pixels = pixels.mean(axis=2)
    return BinaryMask(bits=pixels >= threshold)


def image_from_pixels(pixels: np.ndarray, label: Optional[str] = None) -> GrayImage:
    """Grayscale image from [0, 1] pixels (RGB is averaged)."""
    if pixels.ndim == 3:
        pixels = pixels.mean(axis=2)
    try:
        return GrayImage(pixels=pixels)
    except ValueError as e:
        raise MaskError(f"invalid image{f' {label}' if label else ''}: {e}")
