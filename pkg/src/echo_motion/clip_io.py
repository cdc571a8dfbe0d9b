"""Clip serialization: the .emc binary format and CSV import/export.

.emc layout, little-endian:
  magic "EMC1" (4 bytes)
  frame_dim  u16  (= 38)
  num_frames u32
  fps        u8
  reserved   3 bytes (zero)
  has_stats  u8   (0 or 1)
  [if has_stats: 38 f32 means, then 38 f32 stds]
  frames: num_frames x 38 f32, row-major

CSV carries frames only (no fps, no stats): header row
`j00..j28,vx,vy,h,r0..r5`, one frame per row.  Values are written with
repr() so f32 payloads survive a text round trip bit-exactly.
"""

from __future__ import annotations

import struct

import numpy as np

from .motion import FRAME_DIM, DEFAULT_FPS, MotionClip, NormStats

EMC_MAGIC = b"EMC1"

CSV_HEADER = ",".join(
    [f"j{i:02d}" for i in range(29)] + ["vx", "vy", "h"] + [f"r{i}" for i in range(6)]
)


def _fps_byte(fps: float) -> int:
    rounded = round(fps)
    if abs(fps - rounded) > 1e-9 or not 1 <= rounded <= 255:
        raise ValueError(f"fps must be an integer in [1, 255] for .emc files, got {fps}")
    return int(rounded)


def save_clip(path, clip: MotionClip, stats: NormStats | None = None) -> None:
    frames32 = np.ascontiguousarray(clip.frames, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(EMC_MAGIC)
        fh.write(struct.pack("<HIB3xB", FRAME_DIM, len(clip), _fps_byte(clip.fps),
                             1 if stats is not None else 0))
        if stats is not None:
            fh.write(np.asarray(stats.mean, dtype="<f4").tobytes())
            fh.write(np.asarray(stats.std, dtype="<f4").tobytes())
        fh.write(frames32.tobytes())


def load_clip(path):
    """Read an .emc file. Returns (MotionClip, NormStats or None).

    Stored stds are re-floored at 1e-6 on load (f32 rounding can push the
    stored floor value a hair below it).
    """
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 15:
        raise ValueError("truncated .emc file")
    if data[:4] != EMC_MAGIC:
        raise ValueError(f"bad magic {data[:4]!r}, expected {EMC_MAGIC!r}")
    frame_dim, num_frames, fps, has_stats = struct.unpack_from("<HIB3xB", data, 4)
    if frame_dim != FRAME_DIM:
        raise ValueError(f"unsupported frame_dim {frame_dim}, expected {FRAME_DIM}")
    off = 15
    stats = None
    if has_stats == 1:
        need = off + 2 * FRAME_DIM * 4
        if len(data) < need:
            raise ValueError("truncated .emc stats block")
        mean = np.frombuffer(data, dtype="<f4", count=FRAME_DIM, offset=off).astype(np.float64)
        std = np.frombuffer(data, dtype="<f4", count=FRAME_DIM, offset=off + FRAME_DIM * 4).astype(np.float64)
        stats = NormStats(mean=mean, std=np.maximum(std, 1e-6))
        off = need
    elif has_stats != 0:
        raise ValueError(f"bad stats flag {has_stats}")
    need = off + num_frames * FRAME_DIM * 4
    if len(data) < need:
        raise ValueError("truncated .emc frame block")
    frames = np.frombuffer(data, dtype="<f4", count=num_frames * FRAME_DIM, offset=off)
    frames = frames.reshape(num_frames, FRAME_DIM).astype(np.float64)
    return MotionClip(frames=frames, fps=float(fps)), stats


def clip_to_csv(path, clip: MotionClip) -> None:
    frames32 = clip.frames.astype(np.float32)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in frames32:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def clip_from_csv(path, fps: float = DEFAULT_FPS) -> MotionClip:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError("unexpected CSV header for a 38D clip")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != FRAME_DIM:
                raise ValueError(f"line {lineno}: expected {FRAME_DIM} columns, got {len(parts)}")
            rows.append([float(p) for p in parts])
    if not rows:
        raise ValueError("CSV contains no frames")
    return MotionClip(frames=np.array(rows, dtype=np.float64), fps=fps)
