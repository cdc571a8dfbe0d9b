"""Root path similarity between a generated and a reference clip.

Both root XY paths are integrated from the origin, resampled to K
waypoints equally spaced in arc length, and translated so waypoint 0
sits at the origin.  Two Gaussian sub-scores are combined:

  shape:  S = exp(-D^2 / (2 sigma_shape^2)), D = mean waypoint distance
          normalized by the reference arc length
  extent: S = exp(-(ln(L_gen / L_gt))^2 / (2 sigma_extent^2))

  score = S_shape^0.7 * S_extent^0.3

Arc lengths are epsilon-guarded (max(L, eps)) so degenerate zero-length
paths compare as identical rather than dividing by zero.  The kernel
forms and the translation-only alignment are a reconstruction; the
sigmas, K, and the 0.7/0.3 weights are the published constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..motion import MotionClip, root_xy_path


@dataclass(frozen=True)
class RTCConfig:
    num_waypoints: int = 50
    shape_sigma: float = 0.35
    extent_sigma: float = 0.8
    shape_weight: float = 0.7
    extent_weight: float = 0.3
    epsilon: float = 1e-6   # arc-length guard, meters

    def __post_init__(self):
        if self.num_waypoints < 2:
            raise ValueError("need at least 2 waypoints")
        if self.shape_sigma <= 0 or self.extent_sigma <= 0:
            raise ValueError("sigmas must be positive")
        if abs(self.shape_weight + self.extent_weight - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")


@dataclass(frozen=True)
class RtcResult:
    rtc: float
    s_shape: float
    s_extent: float
    gen_length: float
    gt_length: float


def arclength_resample(points: np.ndarray, k: int):
    """Resample a polyline to k points equally spaced in arc length.

    Returns (waypoints (k, d), total_length).  A zero-length path yields
    k copies of its first point.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError("points must be a non-empty (N, d) array")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite path")
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(cum[-1])
    if total == 0.0:
        return np.repeat(pts[:1], k, axis=0), 0.0
    targets = np.linspace(0.0, total, k)
    out = np.empty((k, pts.shape[1]), dtype=np.float64)
    for d in range(pts.shape[1]):
        out[:, d] = np.interp(targets, cum, pts[:, d])
    return out, total


def path_consistency(gen_path: np.ndarray, gt_path: np.ndarray,
                     cfg: RTCConfig | None = None) -> RtcResult:
    if cfg is None:
        cfg = RTCConfig()
    wp_gen, len_gen = arclength_resample(gen_path, cfg.num_waypoints)
    wp_gt, len_gt = arclength_resample(gt_path, cfg.num_waypoints)
    wp_gen = wp_gen - wp_gen[0]
    wp_gt = wp_gt - wp_gt[0]

    eps = cfg.epsilon
    dist = float(np.linalg.norm(wp_gen - wp_gt, axis=1).mean()) / max(len_gt, eps)
    s_shape = float(np.exp(-dist * dist / (2.0 * cfg.shape_sigma ** 2)))

    log_ratio = np.log(max(len_gen, eps) / max(len_gt, eps))
    s_extent = float(np.exp(-log_ratio * log_ratio / (2.0 * cfg.extent_sigma ** 2)))

    rtc = s_shape ** cfg.shape_weight * s_extent ** cfg.extent_weight
    return RtcResult(float(rtc), s_shape, s_extent, len_gen, len_gt)


def root_trajectory_consistency(gen: MotionClip, gt: MotionClip,
                                cfg: RTCConfig | None = None) -> RtcResult:
    return path_consistency(root_xy_path(gen), root_xy_path(gt), cfg)
