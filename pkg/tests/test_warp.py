"""Forward splatting and pyramid tests."""

from __future__ import annotations

import numpy as np
import pytest

from motionfield import (
    COVERAGE_EPS,
    FeaturePyramid,
    FlowField,
    ImageFrame,
    InputError,
    ParameterError,
    ShapeError,
    build_pyramid,
    forward_warp,
    pad_to_multiple,
    scale_flow,
    scale_flow_frame,
    warp_pyramid,
)


def test_zero_flow_is_bit_exact_identity():
    rng = np.random.default_rng(20)
    grid = rng.uniform(0, 1, (6, 7, 3))
    warped, coverage = forward_warp(grid, np.zeros((6, 7, 2)))
    assert np.array_equal(warped, grid)
    assert np.array_equal(coverage, np.ones((6, 7)))


def test_integer_translation_shifts_and_fills_holes():
    rng = np.random.default_rng(21)
    grid = rng.uniform(0, 1, (6, 8))
    flow = np.zeros((6, 8, 2))
    flow[:, :, 0] = 2.0
    flow[:, :, 1] = 1.0
    warped, coverage = forward_warp(grid, flow)
    assert np.array_equal(warped[1:, 2:], grid[:-1, :-2])
    # Row 0 and the two left columns receive no mass and keep source values.
    assert np.array_equal(warped[0, :], grid[0, :])
    assert np.array_equal(warped[:, :2], grid[:, :2])
    assert np.array_equal(coverage[1:, 2:], np.ones((5, 6)))
    assert not coverage[0, :].any()
    assert not coverage[:, :2].any()


def test_permutation_flow_conserves_values():
    rng = np.random.default_rng(22)
    grid = rng.uniform(0, 1, (4, 4))
    flow = np.zeros((4, 4, 2))
    flow[:2, :, 1] = 2.0   # top half down
    flow[2:, :, 1] = -2.0  # bottom half up
    warped, coverage = forward_warp(grid, flow)
    assert np.array_equal(coverage, np.ones((4, 4)))
    assert np.array_equal(np.sort(warped.ravel()), np.sort(grid.ravel()))
    assert np.array_equal(warped[2:], grid[:2])
    assert np.array_equal(warped[:2], grid[2:])


def test_colliding_sources_average():
    grid = np.array([[0.0, 1.0]])
    flow = np.zeros((1, 2, 2))
    flow[0, 0, 0] = 1.0  # lands on its right neighbour
    warped, coverage = forward_warp(grid, flow)
    assert warped[0, 1] == pytest.approx(0.5)
    assert warped[0, 0] == 0.0  # hole falls back to source
    assert coverage[0, 0] == 0.0
    assert coverage[0, 1] == pytest.approx(2.0)


def test_softmax_mode_favors_small_motion():
    grid = np.array([[0.0, 1.0]])
    flow = np.zeros((1, 2, 2))
    flow[0, 0, 0] = 1.0
    warped, _ = forward_warp(grid, flow, mode="softmax")
    w_moving = np.exp(-1.0 / 10.0)
    expected = (0.0 * w_moving + 1.0 * 1.0) / (w_moving + 1.0)
    assert warped[0, 1] == pytest.approx(expected)
    assert warped[0, 1] > 0.5  # the stationary source dominates


def test_softmax_equals_average_for_uniform_magnitude():
    rng = np.random.default_rng(23)
    grid = rng.uniform(0, 1, (6, 6))
    flow = np.zeros((6, 6, 2))
    flow[:, :, 0] = 3.0
    flow[:, :, 1] = 4.0
    avg, _ = forward_warp(grid, flow, mode="average")
    soft, _ = forward_warp(grid, flow, mode="softmax")
    assert np.allclose(avg, soft, atol=1e-12)


def test_fractional_splat_literal():
    grid = np.array([[1.0, 4.0, 0.0]])
    flow = np.zeros((1, 3, 2))
    flow[0, 0, 0] = 0.5
    warped, coverage = forward_warp(grid, flow)
    assert np.allclose(coverage, [[0.5, 1.5, 1.0]])
    assert warped[0, 0] == pytest.approx(1.0)  # 0.5 weight of value 1 only
    assert warped[0, 1] == pytest.approx(3.0)  # (4*1 + 1*0.5) / 1.5
    assert warped[0, 2] == pytest.approx(0.0)


def test_warped_values_stay_within_source_range():
    rng = np.random.default_rng(24)
    for _ in range(20):
        grid = rng.uniform(-5, 5, (8, 8))
        flow = rng.uniform(-3, 3, (8, 8, 2))
        warped, _ = forward_warp(grid, flow)
        assert warped.min() >= grid.min() - 1e-12
        assert warped.max() <= grid.max() + 1e-12


def test_flow_leaving_the_grid_is_dropped():
    rng = np.random.default_rng(25)
    grid = rng.uniform(0, 1, (5, 5))
    flow = np.full((5, 5, 2), 100.0)
    warped, coverage = forward_warp(grid, flow)
    assert not coverage.any()
    assert np.array_equal(warped, grid)


def test_coverage_threshold_marks_holes():
    grid = np.array([[2.0, 7.0]])
    warped, _ = forward_warp(grid, np.zeros((1, 2, 2)), coverage_eps=2.0)
    assert np.array_equal(warped, grid)


def test_channels_warp_independently():
    rng = np.random.default_rng(26)
    grid = rng.uniform(0, 1, (5, 6, 3))
    flow = rng.uniform(-2, 2, (5, 6, 2))
    together, coverage = forward_warp(grid, flow)
    for c in range(3):
        single, cov_c = forward_warp(grid[:, :, c], flow)
        assert np.array_equal(together[:, :, c], single)
        assert np.array_equal(coverage, cov_c)


def test_forward_warp_validation():
    grid = np.zeros((4, 4))
    with pytest.raises(ParameterError):
        forward_warp(grid, np.zeros((4, 4, 2)), mode="nearest")
    with pytest.raises(ShapeError):
        forward_warp(grid, np.zeros((4, 4, 3)))
    with pytest.raises(ShapeError):
        forward_warp(grid, np.zeros((5, 4, 2)))
    bad = np.zeros((4, 4, 2))
    bad[0, 0, 0] = np.nan
    with pytest.raises(InputError):
        forward_warp(grid, bad)


def test_pyramid_levels_are_block_means():
    grid = np.array(
        [
            [1.0, 3.0, 0.0, 0.0],
            [5.0, 7.0, 0.0, 4.0],
            [2.0, 2.0, 6.0, 6.0],
            [2.0, 2.0, 6.0, 6.0],
        ]
    )
    pyr = build_pyramid(grid, 3)
    assert pyr.num_levels == 3
    assert pyr.levels[0].shape == (4, 4, 1)
    assert np.array_equal(pyr.levels[1][:, :, 0], [[4.0, 1.0], [2.0, 6.0]])
    assert pyr.levels[2][0, 0, 0] == pytest.approx(grid.mean())


def test_pyramid_matches_looped_block_average():
    rng = np.random.default_rng(27)
    grid = rng.uniform(0, 1, (8, 8, 2))
    pyr = build_pyramid(grid, 2)
    expected = np.zeros((4, 4, 2))
    for r in range(4):
        for c in range(4):
            expected[r, c] = grid[2 * r : 2 * r + 2, 2 * c : 2 * c + 2].mean(axis=(0, 1))
    assert np.allclose(pyr.levels[1], expected)


def test_pyramid_accepts_image_frames():
    image = ImageFrame(data=np.full((4, 4, 3), 0.5))
    pyr = build_pyramid(image, 2)
    assert np.allclose(pyr.levels[1], 0.5)


def test_pyramid_validation():
    with pytest.raises(ParameterError):
        build_pyramid(np.zeros((4, 4)), 0)
    with pytest.raises(ParameterError):
        build_pyramid(np.zeros((6, 6)), 3)  # 6 not divisible by 4
    with pytest.raises(ParameterError):
        build_pyramid(np.zeros((2, 2)), 3)  # too small


def test_pad_to_multiple_reflects():
    rng = np.random.default_rng(28)
    grid = rng.uniform(0, 1, (5, 7))
    padded = pad_to_multiple(grid, 4)
    assert padded.shape == (8, 8)
    assert np.array_equal(padded[:5, :7], grid)
    assert np.array_equal(padded[5, :7], grid[3, :])
    assert np.array_equal(padded[6, :7], grid[2, :])
    assert np.array_equal(padded[:5, 7], grid[:, 5])


def test_pad_to_multiple_noop_when_aligned():
    grid = np.zeros((8, 8))
    assert pad_to_multiple(grid, 4) is grid


def test_scale_flow_frame_halves_vectors():
    flow = np.zeros((4, 4, 2))
    flow[:, :, 0] = 4.0
    flow[:, :, 1] = -2.0
    scaled = scale_flow_frame(flow, 1)
    assert scaled.shape == (2, 2, 2)
    assert np.allclose(scaled[:, :, 0], 2.0)
    assert np.allclose(scaled[:, :, 1], -1.0)


def test_scale_flow_frame_matches_block_average():
    rng = np.random.default_rng(29)
    flow = rng.uniform(-4, 4, (8, 8, 2))
    scaled = scale_flow_frame(flow, 2)
    expected = np.zeros((2, 2, 2))
    for r in range(2):
        for c in range(2):
            expected[r, c] = flow[4 * r : 4 * r + 4, 4 * c : 4 * c + 4].mean(axis=(0, 1)) / 4.0
    assert np.allclose(scaled, expected)


def test_scale_flow_frame_level_zero_copies():
    flow = np.ones((4, 4, 2))
    out = scale_flow_frame(flow, 0)
    assert np.array_equal(out, flow)
    out[0, 0, 0] = 9.0
    assert flow[0, 0, 0] == 1.0


def test_scale_flow_frame_validation():
    with pytest.raises(ParameterError):
        scale_flow_frame(np.zeros((4, 4, 2)), -1)
    with pytest.raises(ShapeError):
        scale_flow_frame(np.zeros((6, 6, 2)), 2)


def test_scale_flow_applies_per_frame():
    rng = np.random.default_rng(30)
    flow = FlowField(rng.uniform(-2, 2, (3, 4, 4, 2)))
    scaled = scale_flow(flow, 1)
    assert scaled.data.shape == (3, 2, 2, 2)
    for i in range(3):
        assert np.array_equal(scaled.data[i], scale_flow_frame(flow.data[i], 1))
    assert scale_flow(flow, 0) is flow


def test_warp_pyramid_warps_each_level_with_rescaled_flow():
    rng = np.random.default_rng(31)
    pyr = build_pyramid(rng.uniform(0, 1, (8, 8, 2)), 3)
    flow = rng.uniform(-2, 2, (8, 8, 2))
    warped = warp_pyramid(pyr, flow)
    assert warped.num_levels == 3
    for s in range(3):
        expected, _ = forward_warp(pyr.levels[s], scale_flow_frame(flow, s))
        assert np.array_equal(warped.levels[s], expected)


def test_warp_and_downsample_commute_for_integer_shift():
    rng = np.random.default_rng(32)
    grid = rng.uniform(0, 1, (8, 8))
    pyr = build_pyramid(grid, 2)
    flow = np.zeros((8, 8, 2))
    flow[:, :, 0] = 2.0
    warped = warp_pyramid(pyr, flow)
    full = warped.levels[0][:, :, 0]
    halved_after = full.reshape(4, 2, 4, 2).mean(axis=(1, 3))
    # Columns fed entirely by real mass agree with the directly warped level.
    assert np.allclose(warped.levels[1][:, 1:, 0], halved_after[:, 1:])


def test_warp_pyramid_rejects_mismatched_flow():
    pyr = build_pyramid(np.zeros((8, 8)), 2)
    with pytest.raises(ShapeError):
        warp_pyramid(pyr, np.zeros((4, 4, 2)))


def test_pyramid_type_validates_halving():
    with pytest.raises(ShapeError):
        FeaturePyramid(levels=(np.zeros((8, 8, 1)), np.zeros((3, 4, 1))))
