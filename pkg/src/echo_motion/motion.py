"""The 38D robot-native motion representation.

Per-frame layout (fixed order, 38 scalars):
  [0:29]   joint angles, rad, canonical G1 order (see joints.py)
  [29:31]  planar root velocity, meters per frame: v_t = p_xy_t - p_xy_{t-1}
  [31]     root height, m
  [32:38]  root orientation as a 6D rotation vector (see rotation.py)

Velocities are raw consecutive-position differences in the world frame;
multiply by fps to get m/s.  Frame 0 of an encoded clip carries (0, 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .joints import NUM_JOINTS
from .rotation import rot6d_to_matrix, rot6d_to_matrix_batch, rot_matrix_to_6d_batch

FRAME_DIM = 38
JOINT_SLICE = slice(0, 29)
VEL_SLICE = slice(29, 31)
HEIGHT_INDEX = 31
ROT6D_SLICE = slice(32, 38)

DEFAULT_FPS = 50.0


@dataclass(frozen=True)
class MotionFrame:
    """One 38D frame, validated: finite and with a decodable orientation."""

    joint_pos: np.ndarray
    root_vel_xy: np.ndarray
    root_height: float
    root_rot6d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "joint_pos", np.asarray(self.joint_pos, dtype=np.float64).reshape(NUM_JOINTS))
        object.__setattr__(self, "root_vel_xy", np.asarray(self.root_vel_xy, dtype=np.float64).reshape(2))
        object.__setattr__(self, "root_rot6d", np.asarray(self.root_rot6d, dtype=np.float64).reshape(6))
        vec = self.as_vector()
        if not np.all(np.isfinite(vec)):
            raise ValueError("non-finite frame values")
        rot6d_to_matrix(self.root_rot6d)  # raises DegenerateRotation if invalid

    @classmethod
    def from_vector(cls, vec) -> "MotionFrame":
        vec = np.asarray(vec, dtype=np.float64).reshape(FRAME_DIM)
        return cls(vec[JOINT_SLICE], vec[VEL_SLICE], float(vec[HEIGHT_INDEX]), vec[ROT6D_SLICE])

    def as_vector(self) -> np.ndarray:
        out = np.empty(FRAME_DIM, dtype=np.float64)
        out[JOINT_SLICE] = self.joint_pos
        out[VEL_SLICE] = self.root_vel_xy
        out[HEIGHT_INDEX] = self.root_height
        out[ROT6D_SLICE] = self.root_rot6d
        return out

    def root_rotation(self) -> np.ndarray:
        return rot6d_to_matrix(self.root_rot6d)


@dataclass(frozen=True)
class MotionClip:
    """A timed sequence of 38D frames.

    frames: (N, 38) float64, N >= 1, all values finite.  Orientation
    validity is not enforced here (raw sampler output is a legal clip);
    decode_clip raises DegenerateRotation on undecodable frames.
    """

    frames: np.ndarray
    fps: float = DEFAULT_FPS
    prompt: str | None = None

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim == 1:
            frames = frames[None, :]
        if frames.ndim != 2 or frames.shape[1] != FRAME_DIM:
            raise ValueError(f"frames must be (N, {FRAME_DIM}), got {frames.shape}")
        if frames.shape[0] < 1:
            raise ValueError("clip must have at least one frame")
        if not np.all(np.isfinite(frames)):
            raise ValueError("non-finite frame values")
        if not (np.isfinite(self.fps) and self.fps > 0):
            raise ValueError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return self.frames.shape[0]

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            return replace(self, frames=self.frames[idx])
        return MotionFrame.from_vector(self.frames[idx])

    @property
    def duration(self) -> float:
        return len(self) / self.fps

    @property
    def joint_pos(self) -> np.ndarray:
        return self.frames[:, JOINT_SLICE]

    @property
    def root_vel_xy(self) -> np.ndarray:
        return self.frames[:, VEL_SLICE]

    @property
    def root_height(self) -> np.ndarray:
        return self.frames[:, HEIGHT_INDEX]

    @property
    def root_rot6d(self) -> np.ndarray:
        return self.frames[:, ROT6D_SLICE]


@dataclass(frozen=True)
class AbsoluteTrajectory:
    """World-frame form of a clip: root positions, rotations, joints."""

    root_pos: np.ndarray   # (N, 3) m, world
    root_rot: np.ndarray   # (N, 3, 3)
    joint_pos: np.ndarray  # (N, 29) rad
    fps: float = DEFAULT_FPS

    def __post_init__(self):
        root_pos = np.asarray(self.root_pos, dtype=np.float64)
        root_rot = np.asarray(self.root_rot, dtype=np.float64)
        joint_pos = np.asarray(self.joint_pos, dtype=np.float64)
        n = root_pos.shape[0]
        if root_pos.shape != (n, 3) or root_rot.shape != (n, 3, 3) or joint_pos.shape != (n, NUM_JOINTS):
            raise ValueError("inconsistent trajectory shapes")
        if not (np.all(np.isfinite(root_pos)) and np.all(np.isfinite(root_rot)) and np.all(np.isfinite(joint_pos))):
            raise ValueError("non-finite trajectory values")
        eye = np.eye(3)
        err = np.abs(np.einsum("nij,nik->njk", root_rot, root_rot) - eye).max()
        if err > 1e-6:
            raise ValueError(f"rotation matrices not orthonormal (max deviation {err:.3e})")
        object.__setattr__(self, "root_pos", root_pos)
        object.__setattr__(self, "root_rot", root_rot)
        object.__setattr__(self, "joint_pos", joint_pos)

    def __len__(self) -> int:
        return self.root_pos.shape[0]


@dataclass(frozen=True)
class NormStats:
    """Per-dimension z-score statistics over the 38D vector."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(FRAME_DIM)
        std = np.asarray(self.std, dtype=np.float64).reshape(FRAME_DIM)
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(std))):
            raise ValueError("non-finite normalization stats")
        if np.any(std < 1e-6):
            raise ValueError("std must be floored at 1e-6")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)


def encode_clip(traj: AbsoluteTrajectory, prompt: str | None = None) -> MotionClip:
    """Absolute trajectory -> 38D clip.

    root_vel_xy[t] = p_xy[t] - p_xy[t-1] for t >= 1, (0, 0) at t = 0.
    The global XY position of frame 0 is intentionally dropped.
    """
    if len(traj) < 2:
        raise ValueError("need at least 2 frames to encode velocities")
    n = len(traj)
    frames = np.empty((n, FRAME_DIM), dtype=np.float64)
    frames[:, JOINT_SLICE] = traj.joint_pos
    frames[1:, VEL_SLICE] = np.diff(traj.root_pos[:, :2], axis=0)
    frames[0, VEL_SLICE] = 0.0
    frames[:, HEIGHT_INDEX] = traj.root_pos[:, 2]
    frames[:, ROT6D_SLICE] = rot_matrix_to_6d_batch(traj.root_rot)
    return MotionClip(frames=frames, fps=traj.fps, prompt=prompt)


def decode_clip(clip: MotionClip, origin_xy=(0.0, 0.0)) -> AbsoluteTrajectory:
    """38D clip -> absolute trajectory with frame 0 placed at origin_xy.

    p_xy[t] = p_xy[t-1] + root_vel_xy[t]; frame 0's own velocity entry is
    ignored for placement (it is (0,0) for encoded clips by convention).
    """
    origin = np.asarray(origin_xy, dtype=np.float64).reshape(2)
    n = len(clip)
    pos = np.empty((n, 3), dtype=np.float64)
    pos[:, :2] = origin + np.cumsum(np.vstack([np.zeros((1, 2)), clip.root_vel_xy[1:]]), axis=0)
    pos[:, 2] = clip.root_height
    rot = rot6d_to_matrix_batch(clip.root_rot6d)
    return AbsoluteTrajectory(root_pos=pos, root_rot=rot, joint_pos=clip.joint_pos.copy(), fps=clip.fps)


def root_xy_path(clip: MotionClip, origin_xy=(0.0, 0.0)) -> np.ndarray:
    """(N, 2) world XY path of the root, integrated from origin_xy."""
    origin = np.asarray(origin_xy, dtype=np.float64).reshape(2)
    return origin + np.cumsum(np.vstack([np.zeros((1, 2)), clip.root_vel_xy[1:]]), axis=0)


def fit_norm_stats(clips) -> NormStats:
    """Per-dimension mean and population std over all frames of all clips.

    std is floored at 1e-6 so normalization never divides by ~0.
    """
    if isinstance(clips, MotionClip):
        clips = [clips]
    clips = list(clips)
    if not clips:
        raise ValueError("need at least one clip")
    stacked = np.concatenate([c.frames for c in clips], axis=0)
    mean = stacked.mean(axis=0)
    std = np.maximum(stacked.std(axis=0), 1e-6)
    return NormStats(mean=mean, std=std)


def normalize(clip: MotionClip, stats: NormStats) -> MotionClip:
    return replace(clip, frames=(clip.frames - stats.mean) / stats.std)


def denormalize(clip: MotionClip, stats: NormStats) -> MotionClip:
    return replace(clip, frames=clip.frames * stats.std + stats.mean)


def normalize_array(frames: np.ndarray, stats: NormStats) -> np.ndarray:
    return (np.asarray(frames, dtype=np.float64) - stats.mean) / stats.std


def denormalize_array(frames: np.ndarray, stats: NormStats) -> np.ndarray:
    return np.asarray(frames, dtype=np.float64) * stats.std + stats.mean


def finite_diff(clip: MotionClip, order: int) -> np.ndarray:
    """Joint-angle time derivatives, (N, 29).

    order 1: rad/s, central differences (q[t+1] - q[t-1]) * fps / 2 with
    one-sided endpoints.  order 2: rad/s^2, (q[t+1] - 2 q[t] + q[t-1]) * fps^2
    with one-sided second differences at the ends (exact for quadratics).
    """
    q = clip.joint_pos
    n = len(clip)
    fps = clip.fps
    if order == 1:
        if n < 2:
            raise ValueError("need at least 2 frames for velocity")
        out = np.empty_like(q)
        out[1:-1] = (q[2:] - q[:-2]) * (fps / 2.0)
        out[0] = (q[1] - q[0]) * fps
        out[-1] = (q[-1] - q[-2]) * fps
        return out
    if order == 2:
        if n < 3:
            raise ValueError("need at least 3 frames for acceleration")
        out = np.empty_like(q)
        out[1:-1] = (q[2:] - 2.0 * q[1:-1] + q[:-2]) * (fps * fps)
        out[0] = (q[2] - 2.0 * q[1] + q[0]) * (fps * fps)
        out[-1] = (q[-1] - 2.0 * q[-2] + q[-3]) * (fps * fps)
        return out
    raise ValueError(f"order must be 1 or 2, got {order}")
