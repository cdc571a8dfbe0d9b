"""Canonical Unitree G1 29-DoF joint table.

Index order is fixed across the whole package and across all file formats:
legs (left then right, hip pitch/roll/yaw, knee, ankle pitch/roll), waist
(yaw, roll, pitch), then arms (left then right, shoulder pitch/roll/yaw,
elbow, wrist roll/pitch/yaw).  Position limits are the stock G1 29-DoF EDU
ranges in radians.
"""

from __future__ import annotations

import numpy as np

NUM_JOINTS = 29

# name, lower (rad), upper (rad)
G1_JOINT_TABLE = [
    ("left_hip_pitch", -2.5307, 2.8798),
    ("left_hip_roll", -0.5236, 2.9671),
    ("left_hip_yaw", -2.7576, 2.7576),
    ("left_knee", -0.087267, 2.8798),
    ("left_ankle_pitch", -0.87267, 0.5236),
    ("left_ankle_roll", -0.2618, 0.2618),
    ("right_hip_pitch", -2.5307, 2.8798),
    ("right_hip_roll", -2.9671, 0.5236),
    ("right_hip_yaw", -2.7576, 2.7576),
    ("right_knee", -0.087267, 2.8798),
    ("right_ankle_pitch", -0.87267, 0.5236),
    ("right_ankle_roll", -0.2618, 0.2618),
    ("waist_yaw", -2.618, 2.618),
    ("waist_roll", -0.52, 0.52),
    ("waist_pitch", -0.52, 0.52),
    ("left_shoulder_pitch", -3.0892, 2.6704),
    ("left_shoulder_roll", -1.5882, 2.2515),
    ("left_shoulder_yaw", -2.618, 2.618),
    ("left_elbow", -1.0472, 2.0944),
    ("left_wrist_roll", -1.972222, 1.972222),
    ("left_wrist_pitch", -1.614429, 1.614429),
    ("left_wrist_yaw", -1.614429, 1.614429),
    ("right_shoulder_pitch", -3.0892, 2.6704),
    ("right_shoulder_roll", -2.2515, 1.5882),
    ("right_shoulder_yaw", -2.618, 2.618),
    ("right_elbow", -1.0472, 2.0944),
    ("right_wrist_roll", -1.972222, 1.972222),
    ("right_wrist_pitch", -1.614429, 1.614429),
    ("right_wrist_yaw", -1.614429, 1.614429),
]

JOINT_NAMES = [row[0] for row in G1_JOINT_TABLE]


def joint_limits() -> np.ndarray:
    """(29, 2) array of [lower, upper] position limits in radians."""
    return np.array([[lo, hi] for _, lo, hi in G1_JOINT_TABLE], dtype=np.float64)


def load_limits_file(path) -> np.ndarray:
    """Parse a joint-limit table: one joint per line, `name, lower, upper`.

    Comma or whitespace separated; '#' starts a comment.  Must contain
    exactly NUM_JOINTS rows in canonical order.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p for p in line.replace(",", " ").split() if p]
            if len(parts) != 3:
                raise ValueError(f"bad limits line: {raw!r}")
            rows.append((parts[0], float(parts[1]), float(parts[2])))
    if len(rows) != NUM_JOINTS:
        raise ValueError(f"limits file has {len(rows)} joints, expected {NUM_JOINTS}")
    for (name, lo, hi) in rows:
        if not lo < hi:
            raise ValueError(f"joint {name}: lower {lo} must be < upper {hi}")
    return np.array([[lo, hi] for _, lo, hi in rows], dtype=np.float64)


def save_limits_file(path, limits: np.ndarray) -> None:
    limits = np.asarray(limits, dtype=np.float64)
    if limits.shape != (NUM_JOINTS, 2):
        raise ValueError(f"expected ({NUM_JOINTS}, 2) limits, got {limits.shape}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# joint_name, lower_rad, upper_rad\n")
        for name, (lo, hi) in zip(JOINT_NAMES, limits):
            fh.write(f"{name}, {float(lo)!r}, {float(hi)!r}\n")
