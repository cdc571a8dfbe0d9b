from .wire import (
    Ack,
    BadMagic,
    BadVersion,
    ConnectionClosed,
    EndOfMotion,
    ErrorCode,
    ErrorMsg,
    Heartbeat,
    MotionChunk,
    MsgType,
    ProtocolError,
    TextCommand,
    Truncated,
    UnknownType,
    decode_message,
    encode_message,
)
from .server import BackendError, ChunkPolicy, LibraryBackend, MotionServer, OracleBackend, UnknownPromptError
from .client import ClientResult, MotionClient, ServerError, SessionLog, client_run

__all__ = [
    "Ack", "BadMagic", "BadVersion", "ConnectionClosed", "EndOfMotion", "ErrorCode",
    "ErrorMsg", "Heartbeat", "MotionChunk", "MsgType", "ProtocolError", "TextCommand",
    "Truncated", "UnknownType", "decode_message", "encode_message",
    "BackendError", "ChunkPolicy", "LibraryBackend", "MotionServer", "OracleBackend", "UnknownPromptError",
    "ClientResult", "MotionClient", "ServerError", "SessionLog", "client_run",
]
