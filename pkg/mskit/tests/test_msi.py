"""
Tests for the velocity/acceleration chain and the Motion Stability Index.

How to run:
    pytest mskit/tests/test_msi.py -v
"""

import numpy as np
import pytest

from mskit.core.errors import KinematicsError, MsiError
from mskit.core.kinematics import (
    DEFAULT_EPSILON,
    acceleration_variance,
    kinematics,
    msi_from_variances,
    msi_report,
    nlmd,
    point_acceleration_variances,
    region_msi,
)
from mskit.core.synthetic import gen_synthetic
from mskit.models.schemas import LandmarkTrajectory, PaddingMode, RegionMap, SyntheticDatasetSpec
from mskit.tests.conftest import face_layout, normalized

SINGLE = RegionMap(regions={"all": [0]}, mouth_corners=(0, 0))


def parabola() -> LandmarkTrajectory:
    """One point moving along x = t², y = 0 for five frames."""
    t = np.arange(5, dtype=float)
    coords = np.stack([t**2, np.zeros(5)], axis=1)[:, None, :]
    return normalized(coords)


# ============================================================================
# KINEMATICS
# ============================================================================


def test_paper_padding():
    """Test zero final velocity and a[0] = v[0]."""
    kin = kinematics(parabola(), PaddingMode.PAPER)

    assert kin.velocity[:, 0, 0].tolist() == [1.0, 3.0, 5.0, 7.0, 0.0]
    assert kin.acceleration[:, 0, 0].tolist() == [1.0, 2.0, 2.0, 2.0, -7.0]
    assert kin.velocity_mask.all() and kin.acceleration_mask.all()


def test_interior_padding():
    """Test that boundary samples are excluded in interior mode."""
    kin = kinematics(parabola(), PaddingMode.INTERIOR)

    assert kin.velocity_mask.tolist() == [True, True, True, True, False]
    assert kin.acceleration_mask.tolist() == [False, True, True, True, False]
    assert kin.acceleration[kin.acceleration_mask, 0, 0].tolist() == [2.0, 2.0, 2.0]


def test_too_short_for_acceleration():
    """Test that two frames are not enough."""
    traj = normalized(np.zeros((2, 1, 2)))

    with pytest.raises(KinematicsError, match="T=2, need >= 3"):
        kinematics(traj)


def test_acceleration_variance_by_hand():
    """Test the (n-1) variance of a known acceleration series."""
    kin = kinematics(parabola(), PaddingMode.PAPER)

    sx, sy, sigma = acceleration_variance(kin, 0)

    # a_x = [1, 2, 2, 2, -7] has mean 0 and squared sum 62
    assert sx == pytest.approx(62.0 / 4.0)
    assert sy == 0.0
    assert sigma == pytest.approx(62.0 / 8.0)


def test_constant_velocity_four_frames():
    """Test a[t] = [1, 0, 0, -1] for x = 0, 1, 2, 3 with paper padding."""
    coords = np.stack([np.arange(4, dtype=float), np.zeros(4)], axis=1)[:, None, :]
    kin = kinematics(normalized(coords), PaddingMode.PAPER)

    sx, sy, sigma = acceleration_variance(kin, 0)

    assert kin.acceleration[:, 0, 0].tolist() == [1.0, 0.0, 0.0, -1.0]
    assert sx == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert sy == 0.0
    assert sigma == pytest.approx(1.0 / 3.0, rel=1e-12)
    stats = region_msi(normalized(coords), SINGLE, "all")
    assert stats.msi == pytest.approx(1.0 / (1.0 / 3.0 + DEFAULT_EPSILON), rel=1e-12)


def test_constant_acceleration_has_zero_interior_variance():
    """Test that a parabola has no acceleration variance away from the ends."""
    kin = kinematics(parabola(), PaddingMode.INTERIOR)

    assert point_acceleration_variances(kin).tolist() == [0.0]


@pytest.mark.parametrize("std", [0.5, 1.0, 2.0])
def test_white_noise_acceleration_variance(std):
    """Test per-axis σ(a) ≈ 6s² for white noise of per-axis std s."""
    rng = np.random.default_rng(0)
    traj = normalized(std * rng.standard_normal((10000, 1, 2)))

    sx, sy, sigma = acceleration_variance(kinematics(traj, PaddingMode.INTERIOR), 0)

    assert sx == pytest.approx(6.0 * std**2, rel=0.1)
    assert sy == pytest.approx(6.0 * std**2, rel=0.1)
    assert sigma == pytest.approx(6.0 * std**2, rel=0.05)


# ============================================================================
# MSI
# ============================================================================


def test_static_region_hits_the_ceiling(static_trajectory):
    """Test that a motionless region scores exactly 1/ε."""
    traj = normalized(static_trajectory.coords)

    stats = region_msi(traj, RegionMap.ibug68(), "lip")

    assert stats.msi == 1.0 / DEFAULT_EPSILON
    assert stats.sigma_a == 0.0
    assert stats.sigma_v == 0.0
    assert stats.inv_sigma_v == 1.0 / DEFAULT_EPSILON
    assert stats.points == 20


def test_zero_epsilon_on_static_region(static_trajectory):
    """Test that ε = 0 with zero variance is an error, not infinity."""
    traj = normalized(static_trajectory.coords)

    with pytest.raises(MsiError, match="epsilon=0"):
        region_msi(traj, RegionMap.ibug68(), "lip", epsilon=0.0)


def test_msi_is_mean_of_reciprocals():
    """Test MSI = mean of 1/(σ+ε)."""
    assert msi_from_variances([1.0, 3.0], epsilon=0.0) == pytest.approx((1.0 + 1.0 / 3.0) / 2.0)
    assert msi_from_variances([0.5], epsilon=0.5) == pytest.approx(1.0)

    expected = 0.5 * (1.0 / (1.0 / 3.0 + 1e-5) + 1.0 / (2.0 / 3.0 + 1e-5))
    assert msi_from_variances([1.0 / 3.0, 2.0 / 3.0]) == pytest.approx(expected, rel=1e-12)
    assert expected == pytest.approx(2.24994, abs=1e-5)


def test_empty_variances():
    """Test that MSI needs at least one point."""
    with pytest.raises(MsiError, match="empty region"):
        msi_from_variances([])


def test_more_jitter_lowers_msi():
    """Test that scaling the same noise up lowers MSI."""
    rng = np.random.default_rng(1)
    base = face_layout()[None]
    noise = rng.standard_normal((30, 68, 2))
    region_map = RegionMap.ibug68()

    calm = region_msi(normalized(base + 0.5 * noise), region_map, "lip")
    shaky = region_msi(normalized(base + 1.0 * noise), region_map, "lip")

    assert shaky.msi < calm.msi
    assert shaky.sigma_a == pytest.approx(4.0 * calm.sigma_a)


def test_msi_decreases_with_jitter_on_synthetic_motion():
    """Test MSI(s=0.5) > MSI(s=1) > MSI(s=2) on 20 seeded moving sequences."""
    spec = SyntheticDatasetSpec(num_sequences=20, frames=500, points=4, seed=0)
    region_map = RegionMap(regions={"all": [0, 1, 2, 3]}, mouth_corners=(0, 1))

    for pair in gen_synthetic(spec):
        noise = np.random.default_rng(pair.index).standard_normal(pair.clean.coords.shape)
        scores = [
            region_msi(normalized(pair.clean.coords + std * noise), region_map, "all").msi
            for std in (0.5, 1.0, 2.0)
        ]
        assert scores[0] > scores[1] > scores[2], f"sequence {pair.index}: {scores}"


def test_msi_scale_covariance(noisy_trajectory):
    """Test that scaling coordinates by c scales σ(a) by c² and MSI (ε = 0) by 1/c²."""
    a = normalized(noisy_trajectory.coords)
    b = normalized(3.0 * noisy_trajectory.coords)

    plain = region_msi(a, RegionMap.ibug68(), "lip", epsilon=0.0)
    scaled = region_msi(b, RegionMap.ibug68(), "lip", epsilon=0.0)

    assert scaled.sigma_a == pytest.approx(9.0 * plain.sigma_a, rel=1e-9)
    assert scaled.msi == pytest.approx(plain.msi / 9.0, rel=1e-9)


def test_msi_ignores_translation(noisy_trajectory):
    """Test that moving the whole trajectory leaves MSI unchanged."""
    a = normalized(noisy_trajectory.coords)
    b = normalized(noisy_trajectory.coords + np.array([3.0, -2.0]))

    assert region_msi(b, RegionMap.ibug68(), "jaw").msi == pytest.approx(
        region_msi(a, RegionMap.ibug68(), "jaw").msi, rel=1e-9
    )


def test_constant_velocity_is_perfectly_stable():
    """Test that uniform motion has no acceleration variance in interior mode."""
    t = np.arange(10, dtype=float)[:, None, None]
    traj = normalized(np.concatenate([2.0 * t, -t], axis=2))

    stats = region_msi(traj, SINGLE, "all", mode=PaddingMode.INTERIOR)

    assert stats.msi == 1.0 / DEFAULT_EPSILON


def test_raw_input_needs_override(static_trajectory):
    """Test that raw coordinates are refused unless explicitly allowed."""
    with pytest.raises(MsiError, match="normalize first"):
        region_msi(static_trajectory, RegionMap.ibug68(), "lip")

    stats = region_msi(static_trajectory, RegionMap.ibug68(), "lip", allow_raw=True)
    assert stats.msi == 1.0 / DEFAULT_EPSILON


def test_empty_region(static_trajectory):
    """Test that an empty region is rejected."""
    region_map = RegionMap(regions={"none": []})

    with pytest.raises(MsiError, match="empty region 'none'"):
        region_msi(normalized(static_trajectory.coords), region_map, "none")


def test_report_covers_requested_regions(noisy_trajectory):
    """Test region selection and report metadata."""
    traj = normalized(noisy_trajectory.coords)

    report = msi_report(traj, RegionMap.ibug68(), video="clip", regions=["jaw"])

    assert list(report.regions) == ["jaw"]
    assert report.frames == 40
    assert report.padding == PaddingMode.PAPER
    assert "nlmd" not in report.to_json_dict()
    assert "crop" not in report.to_json_dict()


# ============================================================================
# NLMD
# ============================================================================


def test_nlmd_of_constant_offset(noisy_trajectory):
    """Test NLMD of a (3, 4) px offset on a 256 px frame."""
    a = normalized(noisy_trajectory.coords)
    b = normalized(noisy_trajectory.coords + np.array([3.0, 4.0]))

    assert nlmd(a, b) == pytest.approx(5.0 / 256.0)
    assert nlmd(a, a) == 0.0


def test_nlmd_shape_mismatch(noisy_trajectory):
    """Test that NLMD needs matching shapes."""
    a = normalized(noisy_trajectory.coords)
    b = normalized(noisy_trajectory.coords[:-1])

    with pytest.raises(MsiError, match="shapes differ"):
        nlmd(a, b)
