"""IMU-based fall detection and recovery-trajectory retrieval.

Fall detection watches the gravity direction expressed in the pelvis
frame: the robot counts as fallen once that direction stays more than
fall_threshold_deg away from upright for fall_persist_frames consecutive
frames, and recovers the flag symmetrically (debounced both ways).

Retrieval is two-stage over a pre-built library: a hard filter on
gravity alignment (with a nearest-gravity fallback so a plan always
exists), then ranking by Euclidean distance in joint space, ties broken
by entry index.  The thresholds are tunable; the stock values (30 deg
filter, 60 deg fall, 10 frames at 50 Hz) are package choices.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .joints import NUM_JOINTS
from .motion import MotionClip
from . import clip_io

UPRIGHT_GRAVITY = np.array([0.0, 0.0, -1.0])


def _unit(v, tol: float, what: str) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64).reshape(3)
    n = np.linalg.norm(v)
    if abs(n - 1.0) > tol:
        raise ValueError(f"{what} must be a unit vector (norm {n:.6f})")
    return v / n


def angle_between_deg(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(3)
    b = np.asarray(b, dtype=np.float64).reshape(3)
    c = np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return float(np.degrees(np.arccos(np.clip(c, -1.0, 1.0))))


@dataclass(frozen=True)
class RecoveryEntry:
    clip: MotionClip
    initial_gravity: np.ndarray  # unit, pelvis frame at clip start
    initial_joints: np.ndarray   # 29 angles, rad
    source: str = ""

    def __post_init__(self):
        g = _unit(self.initial_gravity, 1e-6, "initial_gravity")
        joints = np.asarray(self.initial_joints, dtype=np.float64).reshape(NUM_JOINTS)
        object.__setattr__(self, "initial_gravity", g)
        object.__setattr__(self, "initial_joints", joints)


@dataclass(frozen=True)
class RecoveryLibrary:
    entries: tuple
    gravity_threshold_deg: float = 30.0
    fall_threshold_deg: float = 60.0
    fall_persist_frames: int = 10

    def __post_init__(self):
        if not 0 < self.gravity_threshold_deg < 180 or not 0 < self.fall_threshold_deg < 180:
            raise ValueError("angle thresholds must lie in (0, 180) degrees")
        if self.fall_persist_frames < 1:
            raise ValueError("fall_persist_frames must be >= 1")
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)


class FallDetector:
    """Debounced per-stream fall flag; one instance per IMU stream."""

    def __init__(self, fall_threshold_deg: float = 60.0, persist_frames: int = 10):
        self.fall_threshold_deg = fall_threshold_deg
        self.persist_frames = persist_frames
        self._above = 0
        self._below = 0
        self.fallen = False

    def update(self, gravity_in_body) -> bool:
        g = _unit(gravity_in_body, 1e-3, "gravity reading")
        if angle_between_deg(g, UPRIGHT_GRAVITY) > self.fall_threshold_deg:
            self._above += 1
            self._below = 0
        else:
            self._below += 1
            self._above = 0
        if not self.fallen and self._above >= self.persist_frames:
            self.fallen = True
        elif self.fallen and self._below >= self.persist_frames:
            self.fallen = False
        return self.fallen

    def reset(self):
        self._above = self._below = 0
        self.fallen = False


def detect_fall(gravity_stream, fall_threshold_deg: float = 60.0,
                persist_frames: int = 10) -> np.ndarray:
    """Run the debounced detector over (N, 3) readings; returns the
    per-frame fall flag."""
    det = FallDetector(fall_threshold_deg, persist_frames)
    stream = np.asarray(gravity_stream, dtype=np.float64)
    if stream.ndim != 2 or stream.shape[1] != 3:
        raise ValueError("gravity stream must be (N, 3)")
    return np.array([det.update(g) for g in stream], dtype=bool)


@dataclass(frozen=True)
class RetrievalResult:
    best_index: int
    best_entry: RecoveryEntry
    candidates: tuple  # (entry_index, joint_distance) pairs, ranked
    gravity_filtered: bool  # False when the nearest-gravity fallback fired


def retrieve_recovery(query_gravity, query_joints, lib: RecoveryLibrary) -> RetrievalResult:
    """Stage 1 keeps entries within gravity_threshold_deg of the query
    gravity (falling back to the single nearest-gravity entry when none
    qualify); stage 2 ranks survivors by joint-space distance."""
    if len(lib) == 0:
        raise ValueError("recovery library is empty")
    g = _unit(query_gravity, 1e-3, "query gravity")
    joints = np.asarray(query_joints, dtype=np.float64).reshape(NUM_JOINTS)

    angles = [angle_between_deg(g, e.initial_gravity) for e in lib.entries]
    survivors = [i for i, a in enumerate(angles) if a <= lib.gravity_threshold_deg]
    filtered = bool(survivors)
    if not survivors:
        survivors = [min(range(len(lib)), key=lambda i: (angles[i], i))]

    ranked = sorted(
        ((i, float(np.linalg.norm(joints - lib.entries[i].initial_joints))) for i in survivors),
        key=lambda pair: (pair[1], pair[0]),
    )
    best = ranked[0][0]
    return RetrievalResult(best_index=best, best_entry=lib.entries[best],
                           candidates=tuple(ranked), gravity_filtered=filtered)


def entry_from_clip(clip: MotionClip, source: str = "") -> RecoveryEntry:
    """Derive the library row for a clip: gravity direction in the pelvis
    frame and joint angles at frame 0."""
    frame0 = clip[0]
    rot = frame0.root_rotation()
    gravity_body = rot.T @ UPRIGHT_GRAVITY
    return RecoveryEntry(clip=clip, initial_gravity=gravity_body,
                         initial_joints=frame0.joint_pos, source=source)


def build_library(clip_dir, **thresholds) -> RecoveryLibrary:
    paths = sorted(p for p in os.listdir(clip_dir) if p.endswith(".emc"))
    if not paths:
        raise ValueError(f"no .emc clips found in {clip_dir}")
    entries = []
    for name in paths:
        clip, _ = clip_io.load_clip(os.path.join(clip_dir, name))
        entries.append(entry_from_clip(clip, source=name))
    return RecoveryLibrary(entries=tuple(entries), **thresholds)


def save_index(path, lib: RecoveryLibrary) -> None:
    """Index line per entry: clip_path, gx, gy, gz, then 29 joint values."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# clip_path, gx, gy, gz, j00..j28\n")
        for e in lib.entries:
            vals = [e.source] + [repr(float(v)) for v in e.initial_gravity] \
                + [repr(float(v)) for v in e.initial_joints]
            fh.write(", ".join(vals) + "\n")


def load_index(path, clip_dir=None, **thresholds) -> RecoveryLibrary:
    base = clip_dir if clip_dir is not None else os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 4 + NUM_JOINTS:
                raise ValueError(f"bad index line: {raw!r}")
            clip, _ = clip_io.load_clip(os.path.join(base, parts[0]))
            entries.append(RecoveryEntry(
                clip=clip,
                initial_gravity=np.array([float(v) for v in parts[1:4]]),
                initial_joints=np.array([float(v) for v in parts[4:]]),
                source=parts[0],
            ))
    if not entries:
        raise ValueError("empty recovery index")
    return RecoveryLibrary(entries=tuple(entries), **thresholds)
