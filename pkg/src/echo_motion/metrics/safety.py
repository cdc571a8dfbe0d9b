"""Motion safety scoring against hardware constraint limits.

Three constraint families are checked per frame and per joint: position
against soft limits (a fraction of each joint's range, measured from the
range center), velocity and acceleration against flat caps.  Violations
are normalized by their limit, pooled to a scalar v per family, squashed
with exp(-sharpness * v), and combined as a weighted geometric mean:

    MSS = S_pos^0.5 * S_vel^0.3 * S_acc^0.2
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..joints import NUM_JOINTS, joint_limits
from ..motion import MotionClip, finite_diff


@dataclass(frozen=True)
class SafetyLimits:
    joint_range: np.ndarray          # (29, 2) lower/upper, rad
    soft_fraction: float = 0.90      # soft limit = this fraction of half-range
    vel_limit: float = 10.0          # rad/s
    acc_limit: float = 100.0         # rad/s^2
    sharpness: float = 100.0
    exponents: tuple = (0.5, 0.3, 0.2)   # position, velocity, acceleration

    def __post_init__(self):
        rng = np.asarray(self.joint_range, dtype=np.float64)
        if rng.shape != (NUM_JOINTS, 2):
            raise ValueError(f"joint_range must be ({NUM_JOINTS}, 2), got {rng.shape}")
        if np.any(rng[:, 0] >= rng[:, 1]):
            raise ValueError("every joint needs lower < upper")
        if not 0.0 < self.soft_fraction <= 1.0:
            raise ValueError("soft_fraction must be in (0, 1]")
        if self.vel_limit <= 0 or self.acc_limit <= 0 or self.sharpness <= 0:
            raise ValueError("limits and sharpness must be positive")
        if len(self.exponents) != 3 or any(w <= 0 for w in self.exponents):
            raise ValueError("need three positive exponents")
        if abs(sum(self.exponents) - 1.0) > 1e-12:
            raise ValueError("exponents must sum to 1")
        object.__setattr__(self, "joint_range", rng)

    @property
    def soft_center(self) -> np.ndarray:
        return 0.5 * (self.joint_range[:, 0] + self.joint_range[:, 1])

    @property
    def soft_half_width(self) -> np.ndarray:
        return self.soft_fraction * 0.5 * (self.joint_range[:, 1] - self.joint_range[:, 0])


def default_safety_limits() -> SafetyLimits:
    return SafetyLimits(joint_range=joint_limits())


@dataclass(frozen=True)
class MssResult:
    mss: float
    s_pos: float
    s_vel: float
    s_acc: float
    vbar_pos: float
    vbar_vel: float
    vbar_acc: float


def _pool(violations: np.ndarray, aggregate: str) -> float:
    if aggregate == "mean":
        return float(violations.mean())
    if aggregate == "max":
        return float(violations.max())
    raise ValueError(f"aggregate must be 'mean' or 'max', got {aggregate!r}")


def motion_safety_score(clip: MotionClip, limits: SafetyLimits | None = None,
                        aggregate: str = "mean") -> MssResult:
    """Score a clip in [0, 1]; 1.0 exactly iff nothing exceeds a limit.

    Position violations are normalized by the soft half-width, velocity
    and acceleration by their caps, so all three v values are
    dimensionless.  `aggregate` pools violations over frames x joints
    ('mean' is the reference behavior).
    """
    if limits is None:
        limits = default_safety_limits()
    if len(clip) < 3:
        raise ValueError("need at least 3 frames to score velocity and acceleration")

    q = clip.joint_pos
    pos_excess = np.maximum(0.0, np.abs(q - limits.soft_center) - limits.soft_half_width)
    v_pos = _pool(pos_excess / limits.soft_half_width, aggregate)

    vel = finite_diff(clip, 1)[:, :NUM_JOINTS]
    v_vel = _pool(np.maximum(0.0, np.abs(vel) - limits.vel_limit) / limits.vel_limit, aggregate)

    acc = finite_diff(clip, 2)[:, :NUM_JOINTS]
    v_acc = _pool(np.maximum(0.0, np.abs(acc) - limits.acc_limit) / limits.acc_limit, aggregate)

    k = limits.sharpness
    s_pos, s_vel, s_acc = np.exp(-k * v_pos), np.exp(-k * v_vel), np.exp(-k * v_acc)
    w_pos, w_vel, w_acc = limits.exponents
    mss = s_pos ** w_pos * s_vel ** w_vel * s_acc ** w_acc
    return MssResult(float(mss), float(s_pos), float(s_vel), float(s_acc),
                     v_pos, v_vel, v_acc)
