"""Cloud-side motion server.

One persistent connection serves any number of TextCommands in sequence;
each resolves to a clip through a pluggable backend and is streamed as
MotionChunks followed by EndOfMotion.  Motion ids count up from 1 per
connection.  A TextCommand arriving mid-stream cancels the stream in
flight (ErrorMsg code Cancelled, then the new motion); Heartbeats are
answered with Ack at any time, including mid-stream.

Backends:
  LibraryBackend  prompt -> stored clip lookup, exact match first, then
                  a case/whitespace-normalized match
  OracleBackend   samples from the Gaussian-oracle denoiser, for load
                  and protocol testing without any trained model
"""

from __future__ import annotations

import os
import socket
import threading
import time
import zlib
from dataclasses import dataclass

from ..motion import MotionClip
from .. import clip_io
from ..diffusion import NoiseSchedule, SamplerConfig, gaussian_oracle_denoiser, sample
from .transport import TcpConnection, WsConnection
from .wire import (
    HEADER_SIZE,
    MAX_PAYLOAD,
    Ack,
    ConnectionClosed,
    EndOfMotion,
    ErrorCode,
    ErrorMsg,
    Heartbeat,
    MotionChunk,
    ProtocolError,
    TextCommand,
)

_POLL_S = 0.05


@dataclass(frozen=True)
class ChunkPolicy:
    chunk_frames: int = 25
    pacing: str = "burst"  # burst | realtime

    def __post_init__(self):
        if self.chunk_frames < 1:
            raise ValueError("chunk_frames must be >= 1")
        if self.pacing not in ("burst", "realtime"):
            raise ValueError("pacing must be 'burst' or 'realtime'")


class UnknownPromptError(KeyError):
    pass


class BackendError(Exception):
    pass


def _normalize_prompt(prompt: str) -> str:
    return " ".join(prompt.casefold().split())


class LibraryBackend:
    """Serves stored clips keyed by prompt."""

    def __init__(self, clips: dict):
        self._exact = dict(clips)
        self._normalized = {}
        for prompt, clip in self._exact.items():
            self._normalized.setdefault(_normalize_prompt(prompt), clip)

    @classmethod
    def from_dir(cls, path) -> "LibraryBackend":
        """Load every .emc in a directory.  Prompts come from an optional
        prompts.txt (per line: filename, then the prompt text), falling
        back to the file stem with underscores as spaces."""
        names = sorted(p for p in os.listdir(path) if p.endswith(".emc"))
        if not names:
            raise ValueError(f"no .emc clips in {path}")
        prompt_map = {}
        manifest = os.path.join(path, "prompts.txt")
        if os.path.exists(manifest):
            with open(manifest, "r", encoding="utf-8") as fh:
                for raw in fh:
                    line = raw.strip()
                    if not line or line.startswith("#"):
                        continue
                    fname, _, prompt = line.partition(" ")
                    if prompt:
                        prompt_map[fname] = prompt.strip()
        clips = {}
        for name in names:
            clip, _ = clip_io.load_clip(os.path.join(path, name))
            prompt = prompt_map.get(name, os.path.splitext(name)[0].replace("_", " "))
            clips[prompt] = clip
        return cls(clips)

    def prompts(self):
        return sorted(self._exact)

    def resolve(self, cmd: TextCommand) -> MotionClip:
        clip = self._exact.get(cmd.prompt)
        if clip is None:
            clip = self._normalized.get(_normalize_prompt(cmd.prompt))
        if clip is None:
            raise UnknownPromptError(f"no clip for prompt {cmd.prompt!r}")
        if 0 < cmd.requested_frames < len(clip):
            return clip[: cmd.requested_frames]
        return clip


class OracleBackend:
    """Samples clips from the analytic Gaussian denoiser.

    The sampler seed is derived from the prompt, so identical prompts
    reproduce identical clips.
    """

    def __init__(self, data_mean, data_var, sched: NoiseSchedule | None = None,
                 default_frames: int = 100, fps: float = 50.0):
        self._sched = sched if sched is not None else NoiseSchedule.linear()
        self._denoiser = gaussian_oracle_denoiser(data_mean, data_var, self._sched)
        self._default_frames = default_frames
        self._fps = fps

    def resolve(self, cmd: TextCommand) -> MotionClip:
        frames = cmd.requested_frames or self._default_frames
        config = SamplerConfig(
            scheduler="ddim",
            num_steps=cmd.num_steps or 10,
            cfg_scale=cmd.cfg_scale,
            seed=zlib.crc32(cmd.prompt.encode("utf-8")),
        )
        try:
            result = sample(self._denoiser, cmd.prompt, frames, config,
                            self._sched, fps=self._fps)
        except Exception as e:
            raise BackendError(f"sampling failed: {e}") from e
        return result.clip


class _Cancelled(Exception):
    """Internal: carries the TextCommand that interrupted a stream."""

    def __init__(self, command: TextCommand):
        self.command = command


class MotionServer:
    """Threaded server over raw TCP or WebSocket.

    Use as a context manager, or call start()/stop().  Binding to port 0
    picks an ephemeral port; the resolved address is in .address after
    start().  The ECHO_BIND environment variable ("host:port") supplies
    the default bind address.
    """

    def __init__(self, backend, policy: ChunkPolicy | None = None,
                 transport: str = "tcp", host: str | None = None, port: int | None = None):
        if transport not in ("tcp", "ws"):
            raise ValueError("transport must be 'tcp' or 'ws'")
        env = os.environ.get("ECHO_BIND", "127.0.0.1:0")
        env_host, _, env_port = env.rpartition(":")
        self.backend = backend
        self.policy = policy if policy is not None else ChunkPolicy()
        self.transport = transport
        self.host = host if host is not None else (env_host or "127.0.0.1")
        self.port = port if port is not None else int(env_port)
        self.address = None
        self._stopping = threading.Event()
        self._threads = []
        self._listener = None
        self._ws_server = None
        self._conns = set()
        self._conn_lock = threading.Lock()

    # lifecycle

    def start(self) -> "MotionServer":
        if self.transport == "tcp":
            self._listener = socket.create_server((self.host, self.port))
            # closing the listener does not wake a blocked accept() on
            # Linux, so poll instead
            self._listener.settimeout(_POLL_S)
            self.address = self._listener.getsockname()[:2]
            t = threading.Thread(target=self._accept_loop, daemon=True)
            t.start()
            self._threads.append(t)
        else:
            from websockets.sync.server import serve

            def ws_handler(ws):
                self._run_session(WsConnection(ws))

            self._ws_server = serve(ws_handler, self.host, self.port,
                                    max_size=MAX_PAYLOAD + HEADER_SIZE)
            self.address = self._ws_server.socket.getsockname()[:2]
            t = threading.Thread(target=self._ws_server.serve_forever, daemon=True)
            t.start()
            self._threads.append(t)
        return self

    def stop(self) -> None:
        self._stopping.set()
        if self._listener is not None:
            self._listener.close()
        if self._ws_server is not None:
            self._ws_server.shutdown()
        with self._conn_lock:
            conns = list(self._conns)
        for conn in conns:
            conn.close()
        for t in self._threads:
            t.join(timeout=5.0)

    def __enter__(self) -> "MotionServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()

    @property
    def url(self) -> str:
        host, port = self.address
        scheme = "ws" if self.transport == "ws" else "tcp"
        return f"{scheme}://{host}:{port}"

    # connection plumbing

    def _accept_loop(self) -> None:
        while not self._stopping.is_set():
            try:
                sock, _ = self._listener.accept()
            except TimeoutError:
                continue
            except OSError:
                return
            conn = TcpConnection(sock)
            t = threading.Thread(target=self._run_session, args=(conn,), daemon=True)
            t.start()
            self._threads.append(t)

    def _run_session(self, conn) -> None:
        with self._conn_lock:
            self._conns.add(conn)
        next_motion_id = 1
        pending: TextCommand | None = None
        try:
            while not self._stopping.is_set():
                if pending is not None:
                    msg, pending = pending, None
                else:
                    msg = conn.recv_message(timeout=_POLL_S)
                    if msg is None:
                        continue
                if isinstance(msg, Heartbeat):
                    conn.send_message(Ack())
                elif isinstance(msg, TextCommand):
                    try:
                        self._serve_motion(conn, msg, next_motion_id)
                    except _Cancelled as c:
                        conn.send_message(ErrorMsg(ErrorCode.CANCELLED,
                                                   f"motion {next_motion_id} cancelled"))
                        pending = c.command
                    next_motion_id += 1
                else:
                    conn.send_message(ErrorMsg(ErrorCode.PROTOCOL_VIOLATION,
                                               f"unexpected {type(msg).__name__} from client"))
        except ConnectionClosed:
            pass
        except ProtocolError as e:
            try:
                conn.send_message(ErrorMsg(ErrorCode.PROTOCOL_VIOLATION, str(e)))
            except ConnectionClosed:
                pass
        finally:
            conn.close()
            with self._conn_lock:
                self._conns.discard(conn)

    def _poll_inband(self, conn, timeout: float) -> None:
        """Service Heartbeats while streaming; a new TextCommand aborts
        the stream via _Cancelled."""
        msg = conn.recv_message(timeout=timeout)
        if msg is None:
            return
        if isinstance(msg, Heartbeat):
            conn.send_message(Ack())
        elif isinstance(msg, TextCommand):
            raise _Cancelled(msg)
        else:
            conn.send_message(ErrorMsg(ErrorCode.PROTOCOL_VIOLATION,
                                       f"unexpected {type(msg).__name__} from client"))

    def _serve_motion(self, conn, cmd: TextCommand, motion_id: int) -> None:
        try:
            clip = self.backend.resolve(cmd)
        except UnknownPromptError as e:
            conn.send_message(ErrorMsg(ErrorCode.UNKNOWN_PROMPT, str(e)))
            return
        except Exception as e:
            conn.send_message(ErrorMsg(ErrorCode.BACKEND_FAILURE, str(e)))
            return

        frames = clip.frames.astype("<f4")
        fps = round(clip.fps)
        total = frames.shape[0]
        cf = self.policy.chunk_frames
        realtime = self.policy.pacing == "realtime"
        start_time = time.monotonic()
        for i, start in enumerate(range(0, total, cf)):
            if realtime:
                target = start_time + i * (cf / fps)
                while True:
                    remaining = target - time.monotonic()
                    if remaining <= 0:
                        break
                    self._poll_inband(conn, min(remaining, _POLL_S))
                    if self._stopping.is_set():
                        raise ConnectionClosed("server stopping")
            else:
                self._poll_inband(conn, 0)
            conn.send_message(MotionChunk(motion_id=motion_id, start_frame=start,
                                          frames=frames[start:start + cf], fps=fps))
        if realtime:
            end_target = start_time + total / fps
            while True:
                remaining = end_target - time.monotonic()
                if remaining <= 0:
                    break
                self._poll_inband(conn, min(remaining, _POLL_S))
                if self._stopping.is_set():
                    raise ConnectionClosed("server stopping")
        conn.send_message(EndOfMotion(motion_id=motion_id, total_frames=total))
