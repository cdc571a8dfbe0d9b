"""Tracking reward kernels and contact-quality shaping terms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Stock weights for the tracked features and the locomotion
# regularization penalties.  Callers cherry-pick what their feature set
# actually provides.
DEFAULT_TRACKING_WEIGHTS = {
    "root_pos": 0.5,
    "root_rot": 0.5,
    "root_lin_vel": 1.0,
    "root_ang_vel": 1.0,
    "keypoint": 1.0,
    "upper_keypoint": 0.5,
    "lower_keypoint": 0.5,
    "joint_pos": 1.0,
    "joint_vel": 0.5,
}

DEFAULT_REGULARIZATION_WEIGHTS = {
    "survival": 3.0,
    "feet_air_time_ref": 5.0,
    "feet_air_time_dense": 1.0,
    "joint_vel_penalty": 5.0e-4,
    "joint_acc_penalty": 2.0e-8,
    "action_rate_penalty": 0.01,
    "joint_pos_limits": 1.0,
    "joint_torque_limits": 0.01,
}


@dataclass(frozen=True)
class RewardConfig:
    """Per-feature weights w_k and kernel scales sigma_k."""

    weights: dict
    sigmas: dict

    def __post_init__(self):
        for name, w in self.weights.items():
            if w < 0:
                raise ValueError(f"weight for {name!r} must be >= 0")
        for name in self.weights:
            sigma = self.sigmas.get(name)
            if sigma is None or sigma <= 0:
                raise ValueError(f"feature {name!r} needs a positive sigma")


def default_tracking_config(sigma: float = 1.0) -> RewardConfig:
    """Stock weights with a shared kernel scale (scales are a tuning
    knob the reward table does not pin down)."""
    return RewardConfig(
        weights=dict(DEFAULT_TRACKING_WEIGHTS),
        sigmas={k: sigma for k in DEFAULT_TRACKING_WEIGHTS},
    )


def tracking_reward(actual: dict, reference: dict, cfg: RewardConfig):
    """sum_k w_k exp(-||x_k - x*_k||^2 / sigma_k).

    actual/reference map feature names to arrays; every weighted feature
    must be present in both.  Returns (total, per-feature breakdown).
    """
    total = 0.0
    breakdown = {}
    for name, w in cfg.weights.items():
        if name not in actual or name not in reference:
            raise ValueError(f"feature {name!r} missing from inputs")
        x = np.asarray(actual[name], dtype=np.float64)
        x_ref = np.asarray(reference[name], dtype=np.float64)
        if x.shape != x_ref.shape:
            raise ValueError(f"feature {name!r}: shape mismatch {x.shape} vs {x_ref.shape}")
        err = x - x_ref
        term = w * np.exp(-float(np.sum(err * err)) / cfg.sigmas[name])
        breakdown[name] = term
        total += term
    return total, breakdown


def impact_penalty(contacts) -> float:
    """-sum over contact points of (min(v_z, 0))^2 when in contact.

    contacts: iterable of (vertical_velocity, in_contact).  Upward
    (separating) velocity at contact is not penalized.
    """
    total = 0.0
    for v_z, in_contact in contacts:
        if not np.isfinite(v_z):
            raise ValueError("non-finite contact velocity")
        if in_contact:
            down = min(float(v_z), 0.0)
            total -= down * down
    return total


def feet_air_time_reward(contact: np.ndarray, fps: float, target_air_time: float = 0.5,
                         mode: str = "transition", overshoot_penalty: float = 1.0):
    """Reward swing phases that last about target_air_time seconds.

    contact: (frames, feet) booleans, True while the foot touches the
    ground.  Two variants (this shaping term is a reconstruction; the
    exact published form is not stated):

      transition: on each swing->stance touchdown, credit
          min(air, target) - overshoot_penalty * max(0, air - 2*target),
          where air is the swing duration in seconds.  Unfinished swings
          earn nothing.
      dense: every airborne frame accrues 1/fps of credit until the
          current swing has banked target seconds.

    Returns (total, per_foot) with per_foot summed over that foot's
    swings.
    """
    contact = np.asarray(contact, dtype=bool)
    if contact.ndim == 1:
        contact = contact[:, None]
    if contact.ndim != 2 or contact.shape[0] < 1:
        raise ValueError("contact must be (frames, feet)")
    if fps <= 0:
        raise ValueError("fps must be positive")
    if mode not in ("transition", "dense"):
        raise ValueError(f"mode must be 'transition' or 'dense', got {mode!r}")
    dt = 1.0 / fps
    n_frames, n_feet = contact.shape
    per_foot = np.zeros(n_feet, dtype=np.float64)
    for f in range(n_feet):
        air = 0.0
        for t in range(n_frames):
            if contact[t, f]:
                if air > 0.0 and mode == "transition":
                    per_foot[f] += min(air, target_air_time) \
                        - overshoot_penalty * max(0.0, air - 2.0 * target_air_time)
                air = 0.0
            else:
                if mode == "dense" and air < target_air_time:
                    per_foot[f] += min(dt, target_air_time - air)
                air += dt
    return float(per_foot.sum()), per_foot
