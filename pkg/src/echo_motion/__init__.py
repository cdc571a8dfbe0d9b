"""echo-motion: humanoid motion representation, diffusion sampling math,
safety and consistency metrics, tracker loss functions, fall-recovery
retrieval, and an edge-cloud motion streaming protocol.

The canonical per-frame vector is 38-dimensional: 29 joint angles, a
planar root velocity (m/frame), root height, and a 6D root orientation.
Motion is 50 FPS by default on the Unitree G1 29-DoF joint ordering.
"""

from .joints import G1_JOINT_TABLE, JOINT_NAMES, NUM_JOINTS, joint_limits
from .rotation import DegenerateRotation, rot6d_to_matrix, rot_matrix_to_6d
from .motion import (
    DEFAULT_FPS,
    FRAME_DIM,
    AbsoluteTrajectory,
    MotionClip,
    MotionFrame,
    NormStats,
    decode_clip,
    denormalize,
    encode_clip,
    finite_diff,
    fit_norm_stats,
    normalize,
    root_xy_path,
)
from .clip_io import load_clip, save_clip, clip_from_csv, clip_to_csv

__version__ = "0.1.0"

__all__ = [
    "G1_JOINT_TABLE", "JOINT_NAMES", "NUM_JOINTS", "joint_limits",
    "DegenerateRotation", "rot6d_to_matrix", "rot_matrix_to_6d",
    "DEFAULT_FPS", "FRAME_DIM", "AbsoluteTrajectory", "MotionClip", "MotionFrame",
    "NormStats", "decode_clip", "denormalize", "encode_clip", "finite_diff",
    "fit_norm_stats", "normalize", "root_xy_path",
    "load_clip", "save_clip", "clip_from_csv", "clip_to_csv",
    "__version__",
]
