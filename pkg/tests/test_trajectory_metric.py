import numpy as np
import pytest

from echo_motion.metrics import RTCConfig, arclength_resample, path_consistency, root_trajectory_consistency
from echo_motion.motion import FRAME_DIM, MotionClip


def _straight(length, n=80):
    return np.stack([np.linspace(0.0, length, n), np.zeros(n)], axis=1)


def test_identical_paths_score_one(rng):
    path = np.cumsum(rng.normal(0.0, 0.1, (60, 2)), axis=0)
    res = path_consistency(path, path)
    assert abs(res.rtc - 1.0) < 1e-9
    assert abs(res.s_shape - 1.0) < 1e-9
    assert abs(res.s_extent - 1.0) < 1e-9


def test_translation_invariance(rng):
    path = np.cumsum(rng.normal(0.0, 0.1, (60, 2)), axis=0)
    shifted = path + np.array([5.0, -7.0])
    res = path_consistency(shifted, path)
    assert abs(res.rtc - 1.0) < 1e-9


def test_half_length_extent_subscore():
    res = path_consistency(_straight(1.0), _straight(2.0))
    expect = np.exp(-np.log(0.5) ** 2 / 1.28)
    assert abs(res.s_extent - expect) < 1e-9
    assert abs(res.s_shape - 1.0) > 0.0  # shrunken path also shifts waypoints
    assert res.gen_length == pytest.approx(1.0, abs=1e-12)
    assert res.gt_length == pytest.approx(2.0, abs=1e-12)


def test_double_length_extent_matches_half():
    # the log-ratio kernel is symmetric in ratio vs 1/ratio
    a = path_consistency(_straight(1.0), _straight(2.0))
    b = path_consistency(_straight(2.0), _straight(1.0))
    assert abs(a.s_extent - b.s_extent) < 1e-12


def test_rotation_is_not_factored_out():
    n = 50
    gt = _straight(1.0, n)
    rot = np.stack([np.zeros(n), np.linspace(0.0, 1.0, n)], axis=1)
    res = path_consistency(rot, gt)
    assert res.s_extent == pytest.approx(1.0, abs=1e-12)
    assert res.s_shape < 0.2


def test_weights_combine_geometrically(rng):
    gen = np.cumsum(rng.normal(0.0, 0.1, (40, 2)), axis=0)
    gt = np.cumsum(rng.normal(0.0, 0.1, (40, 2)), axis=0)
    res = path_consistency(gen, gt)
    assert res.rtc == pytest.approx(res.s_shape ** 0.7 * res.s_extent ** 0.3, abs=1e-12)


def test_zero_length_paths():
    still = np.zeros((10, 2))
    res = path_consistency(still, still)
    assert res.rtc == pytest.approx(1.0, abs=1e-9)


def test_zero_vs_moving_path():
    res = path_consistency(np.zeros((10, 2)), _straight(1.0))
    assert res.rtc < 0.05


def test_arclength_resample_line():
    pts, total = arclength_resample(_straight(3.0, 13), 7)
    assert total == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(pts[:, 0], np.linspace(0.0, 3.0, 7), atol=1e-9)
    assert np.allclose(pts[:, 1], 0.0, atol=1e-12)


def test_arclength_resample_is_speed_independent():
    # same geometric path, wildly different parameterizations
    u = np.linspace(0.0, 1.0, 200)
    fast_then_slow = np.stack([u ** 3, np.zeros_like(u)], axis=1)
    uniform = np.stack([u, np.zeros_like(u)], axis=1)
    a, _ = arclength_resample(fast_then_slow, 20)
    b, _ = arclength_resample(uniform, 20)
    assert np.max(np.abs(a - b)) < 1e-6


def test_arclength_resample_stationary():
    pts, total = arclength_resample(np.ones((5, 2)) * 4.0, 6)
    assert total == 0.0
    assert np.array_equal(pts, np.ones((6, 2)) * 4.0)


def test_waypoint_count_config(rng):
    path = np.cumsum(rng.normal(0.0, 0.1, (30, 2)), axis=0)
    cfg = RTCConfig(num_waypoints=5)
    res = path_consistency(path, path, cfg)
    assert abs(res.rtc - 1.0) < 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        RTCConfig(num_waypoints=1)
    with pytest.raises(ValueError):
        RTCConfig(shape_weight=0.5, extent_weight=0.3)
    with pytest.raises(ValueError):
        RTCConfig(shape_sigma=0.0)


def test_clip_level_wrapper():
    n, fps = 101, 50.0
    frames = np.zeros((n, FRAME_DIM))
    frames[1:, 29] = 0.02  # 1 m/s forward
    frames[:, 31] = 0.78
    frames[:, 32] = 1.0
    frames[:, 36] = 1.0
    clip = MotionClip(frames=frames, fps=fps)
    half = np.array(frames)
    half[1:, 29] = 0.01
    res = root_trajectory_consistency(MotionClip(frames=half, fps=fps), clip)
    expect = np.exp(-np.log(0.5) ** 2 / 1.28)
    assert abs(res.s_extent - expect) < 1e-9
