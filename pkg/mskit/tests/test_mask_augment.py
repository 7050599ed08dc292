"""
Tests for mask morphology, rigid mask transforms and augmented mask-out.

How to run:
    pytest mskit/tests/test_mask_augment.py -v
"""

import numpy as np
import pytest

from mskit.core.errors import MaskError
from mskit.core.mask_augment import (
    apply_mask_out,
    centroid,
    dilate,
    disk_offsets,
    erode,
    mask_from_landmarks,
    morph,
    random_augment,
    sample_augmentation,
    transform_mask,
)
from mskit.models.schemas import AugmentSpec, BinaryMask, GrayImage, LandmarkTrajectory, RegionMap


def random_masks(count: int = 100, size: int = 16):
    rng = np.random.default_rng(0)
    return [BinaryMask(bits=rng.random((size, size)) < 0.5) for _ in range(count)]


def square(size: int = 12, low: int = 3, high: int = 8) -> BinaryMask:
    bits = np.zeros((size, size), dtype=bool)
    bits[low:high, low:high] = True
    return BinaryMask(bits=bits)


@pytest.fixture
def image() -> GrayImage:
    """12×12 horizontal ramp."""
    return GrayImage(pixels=np.tile(np.linspace(0.0, 1.0, 12), (12, 1)))


# ============================================================================
# MORPHOLOGY
# ============================================================================


@pytest.mark.parametrize("radius", [0, 1, 2, 3])
def test_erosion_and_dilation_are_dual(radius):
    """Test erode(m) == complement(dilate(complement(m)))."""
    for mask in random_masks():
        assert erode(mask, radius) == dilate(mask.complement(), radius).complement()


@pytest.mark.parametrize("radius", [1, 2])
def test_morphology_is_monotone(radius):
    """Test that subsets stay subsets under erosion and dilation."""
    for big in random_masks():
        keep = np.random.default_rng(radius).random(big.bits.shape) < 0.7
        small = BinaryMask(bits=big.bits & keep)
        assert small.is_subset_of(big)
        assert erode(small, radius).is_subset_of(erode(big, radius))
        assert dilate(small, radius).is_subset_of(dilate(big, radius))


@pytest.mark.parametrize("radius", [0, 1, 2, 3])
def test_erosion_shrinks_and_dilation_grows(radius):
    """Test erode(m) ⊆ m ⊆ dilate(m)."""
    for mask in random_masks():
        assert erode(mask, radius).is_subset_of(mask)
        assert mask.is_subset_of(dilate(mask, radius))


def test_single_pixel():
    """Test that a point erodes away and dilates into a disk."""
    bits = np.zeros((7, 7), dtype=bool)
    bits[3, 3] = True
    point = BinaryMask(bits=bits)

    assert erode(point, 1).area == 0
    assert dilate(point, 1).area == 5
    assert dilate(point, 2).area == len(disk_offsets(2)) == 13


def test_radius_zero_is_identity():
    """Test that radius 0 changes nothing."""
    mask = random_masks(1)[0]

    assert erode(mask, 0) == mask
    assert dilate(mask, 0) == mask
    assert morph(mask, 0) == mask


def test_pixels_beyond_the_frame_are_unset():
    """Test that a full mask loses its border under erosion."""
    full = BinaryMask(bits=np.ones((8, 8), dtype=bool))

    eroded = erode(full, 1)

    assert eroded.area == 36
    assert not eroded.bits[0].any()


def test_signed_morphology():
    """Test that negative radii erode and positive radii dilate."""
    mask = square()

    assert morph(mask, -1) == erode(mask, 1)
    assert morph(mask, 2) == dilate(mask, 2)


def test_negative_radius_rejected():
    """Test that erode itself needs a non-negative radius."""
    with pytest.raises(MaskError, match="radius must be >= 0"):
        erode(square(), -1)


# ============================================================================
# TRANSFORMS
# ============================================================================


def test_shift_moves_pixels_exactly():
    """Test an integer translation."""
    moved = transform_mask(square(), dx=2, dy=1)

    expected = np.zeros((12, 12), dtype=bool)
    expected[4:9, 5:10] = True
    assert np.array_equal(moved.bits, expected)


def test_shift_out_of_frame_drops_content():
    """Test that content pushed past the edge disappears."""
    moved = transform_mask(square(), dx=6)

    assert moved.area == 5 * 3


def test_rotation_about_centroid():
    """Test that a centred square is unchanged by 0° and 90° rotations."""
    mask = square(size=11, low=3, high=8)

    assert transform_mask(mask, theta=0.0) == mask
    assert transform_mask(mask, theta=90.0) == mask
    assert centroid(mask) == (5.0, 5.0)


def test_empty_mask_has_no_centroid():
    """Test the empty-mask error."""
    with pytest.raises(MaskError, match="empty mask"):
        transform_mask(BinaryMask(bits=np.zeros((4, 4), dtype=bool)), dx=1)


# ============================================================================
# MASK-OUT & AUGMENTATION
# ============================================================================


def test_mask_out(image):
    """Test that only masked pixels take the fill value."""
    mask = square()

    out = apply_mask_out(image, mask, fill=0.25)

    assert np.all(out.pixels[mask.bits] == 0.25)
    assert np.array_equal(out.pixels[~mask.bits], image.pixels[~mask.bits])


def test_mask_out_size_mismatch(image):
    """Test that image and mask sizes must agree."""
    with pytest.raises(MaskError, match="image is 12x12"):
        apply_mask_out(image, square(size=10))


def test_zero_ranges_equal_plain_mask_out(image):
    """Test that an augmentation with zero ranges is a plain mask-out."""
    spec = AugmentSpec(erode_dilate_radius_range=(0, 0), shift_range=0, rotate_range=0.0)

    eroded, used = random_augment(image, square(), spec)

    assert used == square()
    assert eroded == apply_mask_out(image, square())


def test_augmentation_is_seeded(image):
    """Test that draws depend only on the seed and the sample index."""
    spec = AugmentSpec(erode_dilate_radius_range=(-2, 2), shift_range=2, rotate_range=15.0, seed=4)

    a = random_augment(image, square(), spec, index=3)
    b = random_augment(image, square(), spec, index=3)

    assert a[0] == b[0] and a[1] == b[1]
    draws = {sample_augmentation(spec, index) for index in range(20)}
    assert len(draws) > 1
    assert all(-2 <= radius <= 2 and abs(dx) <= 2 and abs(dy) <= 2 for radius, dx, dy, _ in draws)


def test_augmented_area_brackets_the_original(image):
    """Test that eroded samples are smaller and dilated samples larger than the mask."""
    mask = square()
    spec = AugmentSpec(erode_dilate_radius_range=(-2, 2), shift_range=0, rotate_range=0.0, seed=1)

    ratios: dict[str, list[float]] = {"eroded": [], "dilated": []}
    for index in range(1000):
        radius = sample_augmentation(spec, index)[0]
        _, used = random_augment(image, mask, spec, index=index)
        if radius < 0:
            ratios["eroded"].append(used.area / mask.area)
        elif radius > 0:
            ratios["dilated"].append(used.area / mask.area)
        else:
            assert used == mask

    assert ratios["eroded"] and ratios["dilated"]
    assert max(ratios["eroded"]) < 1.0 < min(ratios["dilated"])
    assert np.mean(ratios["eroded"]) < 1.0 < np.mean(ratios["dilated"])


def test_mask_from_landmarks():
    """Test rasterizing the hull of a region's points."""
    coords = np.array([[[2.0, 2.0], [7.0, 2.0], [7.0, 7.0], [2.0, 7.0], [4.0, 4.0]]])
    traj = LandmarkTrajectory(coords=coords)
    region_map = RegionMap(regions={"lip": [0, 1, 2, 3, 4]}, mouth_corners=(0, 1))

    mask = mask_from_landmarks(traj, 0, region_map, "lip", width=10, height=10)

    assert mask.bits[4, 4] and mask.bits[2, 7]
    assert not mask.bits[0, 0] and not mask.bits[9, 9]
    assert 25 <= mask.area <= 49


def test_mask_from_collinear_landmarks():
    """Test that a degenerate point set is rejected."""
    coords = np.array([[[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]]])
    traj = LandmarkTrajectory(coords=coords)
    region_map = RegionMap(regions={"lip": [0, 1, 2]}, mouth_corners=(0, 2))

    with pytest.raises(MaskError, match="does not span an area"):
        mask_from_landmarks(traj, 0, region_map, "lip", width=5, height=5)
