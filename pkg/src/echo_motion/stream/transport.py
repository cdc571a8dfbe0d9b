"""Transport bindings for the wire codec.

Messages are self-delimiting, so the two carriers differ only in
framing: raw TCP ships them back-to-back over the byte stream, while
WebSocket puts exactly one message in each binary frame.  Both are
wrapped in a tiny connection interface:

    send_message(msg)
    recv_message(timeout) -> message, or None when the timeout lapses
    close()

recv_message raises ConnectionClosed when the peer goes away and
ProtocolError subclasses on malformed bytes.
"""

from __future__ import annotations

import socket
import time

from .wire import (
    HEADER_SIZE,
    MAX_PAYLOAD,
    ConnectionClosed,
    ProtocolError,
    decode_header,
    decode_message,
    encode_message,
)

_RECV_CHUNK = 65536


class TcpConnection:
    def __init__(self, sock: socket.socket):
        sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._sock = sock
        self._buf = bytearray()
        self._closed = False

    def send_message(self, msg) -> None:
        try:
            # recv polls leave a short socket timeout behind; sends block
            self._sock.settimeout(None)
            self._sock.sendall(encode_message(msg))
        except OSError as e:
            raise ConnectionClosed(str(e)) from e

    def _try_parse(self):
        if len(self._buf) < HEADER_SIZE:
            return None
        msg_type, payload_len = decode_header(bytes(self._buf[:HEADER_SIZE]))
        if payload_len > MAX_PAYLOAD:
            raise ProtocolError(f"payload length {payload_len} exceeds cap {MAX_PAYLOAD}")
        total = HEADER_SIZE + payload_len
        if len(self._buf) < total:
            return None
        data = bytes(self._buf[:total])
        del self._buf[:total]
        return decode_message(data)

    def recv_message(self, timeout: float | None = None):
        """Next message from the stream; None if `timeout` seconds pass
        first.  timeout 0 polls without blocking."""
        deadline = None if timeout is None else time.monotonic() + timeout
        while True:
            msg = self._try_parse()
            if msg is not None:
                return msg
            if self._closed:
                raise ConnectionClosed("connection closed")
            remaining = None
            if deadline is not None:
                remaining = deadline - time.monotonic()
                if remaining < 0:
                    return None
            try:
                self._sock.settimeout(remaining)
                chunk = self._sock.recv(_RECV_CHUNK)
            except (TimeoutError, socket.timeout, BlockingIOError):
                return None
            except OSError as e:
                raise ConnectionClosed(str(e)) from e
            if not chunk:
                if self._buf:
                    raise ProtocolError("stream ended mid-message")
                raise ConnectionClosed("peer closed the connection")
            self._buf.extend(chunk)

    def close(self) -> None:
        self._closed = True
        try:
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


class WsConnection:
    """Wraps a websockets.sync connection (server or client side)."""

    def __init__(self, ws):
        self._ws = ws

    def send_message(self, msg) -> None:
        from websockets.exceptions import ConnectionClosed as WsClosed
        try:
            self._ws.send(encode_message(msg))
        except WsClosed as e:
            raise ConnectionClosed(str(e)) from e

    def recv_message(self, timeout: float | None = None):
        from websockets.exceptions import ConnectionClosed as WsClosed
        try:
            data = self._ws.recv(timeout=timeout)
        except TimeoutError:
            return None
        except WsClosed as e:
            raise ConnectionClosed(str(e)) from e
        if isinstance(data, str):
            raise ProtocolError("text frame where a binary message was expected")
        return decode_message(data)

    def close(self) -> None:
        try:
            self._ws.close()
        except Exception:
            pass


def connect_tcp(host: str, port: int, timeout: float = 10.0) -> TcpConnection:
    return TcpConnection(socket.create_connection((host, port), timeout=timeout))


def connect_ws(url: str, timeout: float = 10.0) -> WsConnection:
    from websockets.sync.client import connect
    return WsConnection(connect(url, open_timeout=timeout, max_size=MAX_PAYLOAD + HEADER_SIZE))
