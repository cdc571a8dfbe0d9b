"""Per-joint keypoint position error, global and root-relative.

Inputs are caller-supplied world-frame keypoint arrays of shape
(frames, keypoints, 3); forward kinematics is out of scope here.  Units
are preserved (feed millimeters to read millimeters out).
"""

from __future__ import annotations

import numpy as np


def mpjpe(actual, reference, root_index: int = 0):
    """Returns (global_error, root_relative_error).

    global: mean over frames x keypoints of ||p - p*|| in the world frame.
    root-relative: same after subtracting keypoint `root_index` of each
    frame from every keypoint of that frame, in both inputs.
    """
    a = np.asarray(actual, dtype=np.float64)
    r = np.asarray(reference, dtype=np.float64)
    if a.shape != r.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {r.shape}")
    if a.ndim != 3 or a.shape[2] != 3:
        raise ValueError(f"expected (frames, keypoints, 3), got {a.shape}")
    if not 0 <= root_index < a.shape[1]:
        raise ValueError(f"root_index {root_index} out of range")
    g = float(np.linalg.norm(a - r, axis=2).mean())
    a_rel = a - a[:, root_index:root_index + 1, :]
    r_rel = r - r[:, root_index:root_index + 1, :]
    local = float(np.linalg.norm(a_rel - r_rel, axis=2).mean())
    return g, local
