"""Edge-side client simulator.

Connects over raw TCP ("tcp://host:port" or "host:port") or WebSocket
("ws://host:port"), sends prompts, and reassembles the streamed chunks
into a clip.  Alongside the raw frames it produces what the on-robot
consumer would: EMA-smoothed joint targets, the integrated world XY
path, and a running safety score per received chunk, plus transport
timing (first-chunk latency, inter-chunk jitter).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..motion import MotionClip, root_xy_path
from ..metrics.safety import SafetyLimits, default_safety_limits, motion_safety_score
from ..policy_math.smoothing import EmaActionFilter
from .transport import connect_tcp, connect_ws
from .wire import (
    Ack,
    EndOfMotion,
    ErrorMsg,
    Heartbeat,
    MotionChunk,
    ProtocolError,
    TextCommand,
)


class ServerError(Exception):
    def __init__(self, code: int, text: str):
        super().__init__(f"server error {code}: {text}")
        self.code = int(code)
        self.text = text


@dataclass
class SessionLog:
    prompt: str
    motion_id: int = 0
    frames_received: int = 0
    first_chunk_latency_ms: float | None = None
    interchunk_gaps_ms: list = field(default_factory=list)
    online_mss: list = field(default_factory=list)
    total_time_s: float = 0.0

    @property
    def jitter_ms(self) -> float:
        if len(self.interchunk_gaps_ms) < 2:
            return 0.0
        return float(np.std(self.interchunk_gaps_ms))


@dataclass
class ClientResult:
    clip: MotionClip
    log: SessionLog
    smoothed_joints: np.ndarray
    world_path: np.ndarray


def _parse_address(address: str):
    if address.startswith("ws://") or address.startswith("wss://"):
        return "ws", address
    if address.startswith("tcp://"):
        address = address[len("tcp://"):]
    host, _, port = address.rpartition(":")
    if not host:
        raise ValueError(f"address {address!r} needs host:port")
    return "tcp", (host, int(port))


class MotionClient:
    """One persistent session; request() may be called repeatedly."""

    def __init__(self, address: str, timeout: float = 30.0, ema_beta: float = 0.8,
                 limits: SafetyLimits | None = None):
        self._kind, self._target = _parse_address(address)
        self.timeout = timeout
        self.ema_beta = ema_beta
        self.limits = limits if limits is not None else default_safety_limits()
        self._conn = None

    def connect(self) -> "MotionClient":
        if self._kind == "ws":
            self._conn = connect_ws(self._target, timeout=self.timeout)
        else:
            self._conn = connect_tcp(*self._target, timeout=self.timeout)
        return self

    def close(self) -> None:
        if self._conn is not None:
            self._conn.close()
            self._conn = None

    def __enter__(self) -> "MotionClient":
        return self.connect()

    def __exit__(self, *exc) -> None:
        self.close()

    def heartbeat(self) -> bool:
        """Send a Heartbeat and wait for the Ack."""
        self._conn.send_message(Heartbeat())
        msg = self._conn.recv_message(timeout=self.timeout)
        return isinstance(msg, Ack)

    def request(self, prompt: str, cfg_scale: float = 2.5, num_steps: int = 10,
                requested_frames: int = 0) -> ClientResult:
        if self._conn is None:
            raise RuntimeError("not connected")
        log = SessionLog(prompt=prompt)
        self._conn.send_message(TextCommand(prompt=prompt, cfg_scale=cfg_scale,
                                            num_steps=num_steps,
                                            requested_frames=requested_frames))
        sent_at = time.monotonic()
        last_chunk_at = None
        chunks = []
        fps = None
        while True:
            msg = self._conn.recv_message(timeout=self.timeout)
            now = time.monotonic()
            if msg is None:
                raise TimeoutError(f"no reply within {self.timeout}s")
            if isinstance(msg, MotionChunk):
                if log.motion_id == 0:
                    log.motion_id = msg.motion_id
                    log.first_chunk_latency_ms = (now - sent_at) * 1e3
                elif msg.motion_id != log.motion_id:
                    raise ProtocolError(f"chunk for motion {msg.motion_id} "
                                        f"inside motion {log.motion_id}")
                if msg.start_frame != log.frames_received:
                    raise ProtocolError(f"chunk starts at frame {msg.start_frame}, "
                                        f"expected {log.frames_received} (gap or duplicate)")
                if fps is None:
                    fps = msg.fps
                elif msg.fps != fps:
                    raise ProtocolError("fps changed mid-motion")
                if last_chunk_at is not None:
                    log.interchunk_gaps_ms.append((now - last_chunk_at) * 1e3)
                last_chunk_at = now
                chunks.append(msg.frames.astype(np.float64))
                log.frames_received += msg.frame_count
                received = np.concatenate(chunks, axis=0)
                if received.shape[0] >= 3:
                    score = motion_safety_score(MotionClip(received, fps=float(fps)), self.limits)
                    log.online_mss.append(score.mss)
            elif isinstance(msg, EndOfMotion):
                if msg.motion_id != log.motion_id:
                    raise ProtocolError("end-of-motion for a different motion id")
                if msg.total_frames != log.frames_received:
                    raise ProtocolError(f"server declared {msg.total_frames} frames, "
                                        f"received {log.frames_received}")
                log.total_time_s = now - sent_at
                break
            elif isinstance(msg, ErrorMsg):
                raise ServerError(msg.code, msg.text)
            elif isinstance(msg, Ack):
                continue  # stray heartbeat reply
            else:
                raise ProtocolError(f"unexpected {type(msg).__name__} from server")

        frames = np.concatenate(chunks, axis=0) if chunks else np.zeros((0, 38))
        if frames.shape[0] == 0:
            raise ProtocolError("motion ended with no frames delivered")
        clip = MotionClip(frames=frames, fps=float(fps), prompt=prompt)

        smoother = EmaActionFilter(self.ema_beta)
        smoothed = np.stack([smoother.filter(q) for q in clip.joint_pos])
        return ClientResult(clip=clip, log=log, smoothed_joints=smoothed,
                            world_path=root_xy_path(clip))


def client_run(address: str, prompt: str, *, cfg_scale: float = 2.5, num_steps: int = 10,
               requested_frames: int = 0, timeout: float = 30.0, ema_beta: float = 0.8,
               limits: SafetyLimits | None = None) -> ClientResult:
    """One-shot helper: connect, request a single motion, disconnect."""
    with MotionClient(address, timeout=timeout, ema_beta=ema_beta, limits=limits) as client:
        return client.request(prompt, cfg_scale=cfg_scale, num_steps=num_steps,
                              requested_frames=requested_frames)
