"""Binary wire protocol for edge-cloud motion streaming.

Every message is self-delimiting and fully little-endian:

  header: magic "ECHO" (4) | version u8 = 1 | msg_type u8 | payload_len u32

payloads by type:
  TextCommand (1): prompt_len u16, prompt UTF-8, cfg_scale f32,
                   num_steps u16, requested_frames u16 (0 = backend default)
  MotionChunk (2): motion_id u32, start_frame u32, frame_count u16,
                   fps u8, frame_count x 38 f32
  EndOfMotion (3): motion_id u32, total_frames u32
  Heartbeat   (4): empty
  ErrorMsg    (5): code u16, msg_len u16, UTF-8 text
  Ack         (6): empty

decode(encode(m)) is the identity for every valid message, and
encode(decode(b)) reproduces b byte-for-byte for every well-formed
buffer.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from ..motion import FRAME_DIM

MAGIC = b"ECHO"
VERSION = 1
_HEADER = struct.Struct("<4sBBI")
HEADER_SIZE = _HEADER.size  # 10
MAX_PAYLOAD = 16 * 1024 * 1024  # sanity cap for stream readers


class ProtocolError(Exception):
    """Base for every malformed-bytes condition."""


class BadMagic(ProtocolError):
    pass


class BadVersion(ProtocolError):
    pass


class Truncated(ProtocolError):
    """Buffer or payload shorter than its declared length."""


class UnknownType(ProtocolError):
    pass


class ConnectionClosed(Exception):
    """Peer went away mid-session (not a protocol fault)."""


class MsgType(IntEnum):
    TEXT_COMMAND = 1
    MOTION_CHUNK = 2
    END_OF_MOTION = 3
    HEARTBEAT = 4
    ERROR = 5
    ACK = 6


class ErrorCode(IntEnum):
    UNKNOWN_PROMPT = 1
    BACKEND_FAILURE = 2
    PROTOCOL_VIOLATION = 3
    CANCELLED = 4


@dataclass(frozen=True)
class TextCommand:
    prompt: str
    cfg_scale: float = 2.5
    num_steps: int = 10
    requested_frames: int = 0

    msg_type = MsgType.TEXT_COMMAND

    def _payload(self) -> bytes:
        raw = self.prompt.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError("prompt longer than 65535 bytes")
        if not 0 <= self.num_steps <= 0xFFFF or not 0 <= self.requested_frames <= 0xFFFF:
            raise ValueError("num_steps and requested_frames must fit in u16")
        return struct.pack("<H", len(raw)) + raw + struct.pack(
            "<fHH", self.cfg_scale, self.num_steps, self.requested_frames)


@dataclass(frozen=True, eq=False)
class MotionChunk:
    motion_id: int
    start_frame: int
    frames: np.ndarray  # (frame_count, 38) float32
    fps: int = 50

    msg_type = MsgType.MOTION_CHUNK

    def __post_init__(self):
        frames = np.ascontiguousarray(self.frames, dtype="<f4")
        if frames.ndim != 2 or frames.shape[1] != FRAME_DIM:
            raise ValueError(f"frames must be (N, {FRAME_DIM})")
        if frames.shape[0] > 0xFFFF:
            raise ValueError("frame_count must fit in u16")
        if not 1 <= int(self.fps) <= 255:
            raise ValueError("fps must fit in u8 and be >= 1")
        object.__setattr__(self, "frames", frames)
        object.__setattr__(self, "fps", int(self.fps))

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0]

    def __eq__(self, other):
        return (isinstance(other, MotionChunk)
                and self.motion_id == other.motion_id
                and self.start_frame == other.start_frame
                and self.fps == other.fps
                and self.frames.tobytes() == other.frames.tobytes())

    def _payload(self) -> bytes:
        return struct.pack("<IIHB", self.motion_id, self.start_frame,
                           self.frame_count, self.fps) + self.frames.tobytes()


@dataclass(frozen=True)
class EndOfMotion:
    motion_id: int
    total_frames: int

    msg_type = MsgType.END_OF_MOTION

    def _payload(self) -> bytes:
        return struct.pack("<II", self.motion_id, self.total_frames)


@dataclass(frozen=True)
class Heartbeat:
    msg_type = MsgType.HEARTBEAT

    def _payload(self) -> bytes:
        return b""


@dataclass(frozen=True)
class ErrorMsg:
    code: int
    text: str = ""

    msg_type = MsgType.ERROR

    def _payload(self) -> bytes:
        raw = self.text.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError("error text longer than 65535 bytes")
        if not 0 <= int(self.code) <= 0xFFFF:
            raise ValueError("error code must fit in u16")
        return struct.pack("<HH", int(self.code), len(raw)) + raw


@dataclass(frozen=True)
class Ack:
    msg_type = MsgType.ACK

    def _payload(self) -> bytes:
        return b""


WireMessage = TextCommand | MotionChunk | EndOfMotion | Heartbeat | ErrorMsg | Ack


def encode_message(m) -> bytes:
    payload = m._payload()
    return _HEADER.pack(MAGIC, VERSION, int(m.msg_type), len(payload)) + payload


def _decode_payload(msg_type: int, payload: bytes):
    if msg_type == MsgType.TEXT_COMMAND:
        if len(payload) < 2:
            raise Truncated("TextCommand payload too short")
        (prompt_len,) = struct.unpack_from("<H", payload, 0)
        if len(payload) != 2 + prompt_len + 8:
            raise Truncated("TextCommand payload length mismatch")
        try:
            prompt = payload[2:2 + prompt_len].decode("utf-8")
        except UnicodeDecodeError as e:
            raise ProtocolError(f"prompt is not valid UTF-8: {e}") from None
        cfg, steps, frames = struct.unpack_from("<fHH", payload, 2 + prompt_len)
        return TextCommand(prompt=prompt, cfg_scale=cfg, num_steps=steps, requested_frames=frames)
    if msg_type == MsgType.MOTION_CHUNK:
        if len(payload) < 11:
            raise Truncated("MotionChunk payload too short")
        motion_id, start, count, fps = struct.unpack_from("<IIHB", payload, 0)
        if len(payload) != 11 + count * FRAME_DIM * 4:
            raise Truncated("MotionChunk payload length mismatch")
        frames = np.frombuffer(payload, dtype="<f4", count=count * FRAME_DIM, offset=11)
        try:
            return MotionChunk(motion_id=motion_id, start_frame=start,
                               frames=frames.reshape(count, FRAME_DIM), fps=fps)
        except ValueError as e:
            raise ProtocolError(f"bad MotionChunk fields: {e}") from None
    if msg_type == MsgType.END_OF_MOTION:
        if len(payload) != 8:
            raise Truncated("EndOfMotion payload must be 8 bytes")
        motion_id, total = struct.unpack("<II", payload)
        return EndOfMotion(motion_id=motion_id, total_frames=total)
    if msg_type == MsgType.HEARTBEAT:
        if payload:
            raise Truncated("Heartbeat payload must be empty")
        return Heartbeat()
    if msg_type == MsgType.ERROR:
        if len(payload) < 4:
            raise Truncated("ErrorMsg payload too short")
        code, msg_len = struct.unpack_from("<HH", payload, 0)
        if len(payload) != 4 + msg_len:
            raise Truncated("ErrorMsg payload length mismatch")
        try:
            text = payload[4:].decode("utf-8")
        except UnicodeDecodeError as e:
            raise ProtocolError(f"error text is not valid UTF-8: {e}") from None
        return ErrorMsg(code=code, text=text)
    if msg_type == MsgType.ACK:
        if payload:
            raise Truncated("Ack payload must be empty")
        return Ack()
    raise UnknownType(f"unknown message type {msg_type}")


def decode_header(header: bytes):
    """Validate a 10-byte header; returns (msg_type, payload_len)."""
    if len(header) < HEADER_SIZE:
        raise Truncated(f"header needs {HEADER_SIZE} bytes, got {len(header)}")
    magic, version, msg_type, payload_len = _HEADER.unpack(header[:HEADER_SIZE])
    if magic != MAGIC:
        raise BadMagic(f"bad magic {magic!r}")
    if version != VERSION:
        raise BadVersion(f"unsupported version {version}")
    return msg_type, payload_len


def decode_message(data: bytes):
    """Decode exactly one message from `data`."""
    msg_type, payload_len = decode_header(data)
    if len(data) < HEADER_SIZE + payload_len:
        raise Truncated(f"payload declares {payload_len} bytes, "
                        f"{len(data) - HEADER_SIZE} available")
    if len(data) > HEADER_SIZE + payload_len:
        raise ProtocolError(f"{len(data) - HEADER_SIZE - payload_len} trailing bytes")
    return _decode_payload(msg_type, data[HEADER_SIZE:])
