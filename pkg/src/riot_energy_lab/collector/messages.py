"""Wire protocol of the energy collection system.

Frames are a 4-byte big-endian length prefix followed by a UTF-8 JSON body
with a ``type`` discriminator.  Bodies are structured text on purpose:
debuggability beats bandwidth at ammeter sample rates.

Session flow (host side):

    guest -> Hello            host -> Ack(ACK_HELLO) or Error + close
    guest -> ConfigReport
    host  -> SyncRequest(t1)  guest -> SyncResponse(t1, t2, t3)   [xN]
    host  -> Ack(ACK_SYNC_DONE)
    guest -> SampleBatch(seq) host -> Ack(seq)                    [xM]
    guest -> End(total)       host -> Ack(ACK_END)

Negative ack sequence numbers mark handshake phases; batch acks echo the
batch's own (0-based, strictly increasing) sequence number.
"""

from __future__ import annotations

import json
import socket
import struct
import time
from dataclasses import dataclass, field

from ..errors import FrameError, ProtocolError, ValidationError

PROTOCOL_VERSION = 1
MAX_FRAME_BYTES = 16 * 1024 * 1024
DEFAULT_PORT = 7420
PORT_ENV_VAR = "RIOT_LAB_PORT"

ACK_HELLO = -2
ACK_SYNC_DONE = -1
ACK_END = -3


@dataclass(frozen=True)
class Hello:
    device_id: str
    sample_rate_hz: float
    protocol_version: int = PROTOCOL_VERSION
    type = "hello"


@dataclass(frozen=True)
class ConfigReport:
    config_tags: dict[str, str]
    type = "config_report"


@dataclass(frozen=True)
class SyncRequest:
    t1_us: int
    type = "sync_request"


@dataclass(frozen=True)
class SyncResponse:
    t1_us: int
    t2_us: int
    t3_us: int
    type = "sync_response"


@dataclass(frozen=True)
class SampleBatch:
    seq_no: int
    first_sample_index: int
    samples_ua: tuple[float, ...]
    type = "sample_batch"


@dataclass(frozen=True)
class End:
    total_samples: int
    type = "end"


@dataclass(frozen=True)
class Ack:
    seq_no: int
    type = "ack"


@dataclass(frozen=True)
class Error:
    reason: str
    type = "error"


Message = Hello | ConfigReport | SyncRequest | SyncResponse | SampleBatch | End | Ack | Error

_TYPES = {
    "hello": Hello,
    "config_report": ConfigReport,
    "sync_request": SyncRequest,
    "sync_response": SyncResponse,
    "sample_batch": SampleBatch,
    "end": End,
    "ack": Ack,
    "error": Error,
}


def encode(m: Message) -> bytes:
    body: dict = {"type": m.type}
    for name in m.__dataclass_fields__:
        value = getattr(m, name)
        if isinstance(value, tuple):
            value = list(value)
        body[name] = value
    payload = json.dumps(body, separators=(",", ":")).encode("utf-8")
    if len(payload) > MAX_FRAME_BYTES:
        raise FrameError(f"frame of {len(payload)} bytes exceeds the 16 MiB limit")
    return struct.pack(">I", len(payload)) + payload


def decode(frame: bytes) -> Message:
    try:
        body = json.loads(frame.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FrameError(f"undecodable frame body: {exc}") from exc
    if not isinstance(body, dict) or "type" not in body:
        raise ProtocolError("frame body lacks a type discriminator")
    type_name = body.pop("type")
    cls = _TYPES.get(type_name)
    if cls is None:
        raise ProtocolError(f"unknown message type {type_name!r}")
    try:
        if cls is SampleBatch:
            body["samples_ua"] = tuple(float(v) for v in body["samples_ua"])
        elif cls is ConfigReport:
            body["config_tags"] = {str(k): str(v) for k, v in body["config_tags"].items()}
        return cls(**body)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed {type_name} message: {exc}") from exc


def read_frame(sock: socket.socket) -> bytes | None:
    """Read one length-prefixed frame; None on clean EOF at a frame boundary."""
    header = _recv_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length > MAX_FRAME_BYTES:
        raise FrameError(f"frame length {length} exceeds the 16 MiB limit")
    payload = _recv_exact(sock, length)
    if payload is None:
        raise FrameError("connection closed mid-frame")
    return payload


def _recv_exact(sock: socket.socket, n: int) -> bytes | None:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            if buf:
                raise FrameError("connection closed mid-frame")
            return None
        buf.extend(chunk)
    return bytes(buf)


def read_message(sock: socket.socket) -> Message | None:
    frame = read_frame(sock)
    return None if frame is None else decode(frame)


def send_message(sock: socket.socket, m: Message) -> None:
    sock.sendall(encode(m))


def now_us() -> int:
    return time.time_ns() // 1000


@dataclass(frozen=True)
class ClockOffset:
    """Estimated guest-clock minus host-clock offset from one exchange.

    Convert guest timestamps to host time by subtracting ``offset_us``.
    The unknowable delay asymmetry bounds the error by ``round_trip_us/2``.
    """

    offset_us: float
    round_trip_us: float
    estimated_at_us: int = field(default_factory=now_us)


def estimate_offset(t1_us: int, t2_us: int, t3_us: int, t4_us: int) -> ClockOffset:
    """Four-timestamp offset estimate: host sends at t1, guest receives at t2,
    guest replies at t3, host receives at t4 (t1/t4 host clock, t2/t3 guest).
    """
    if t4_us < t1_us:
        raise ValidationError("host clock must be monotone across the exchange (t4 >= t1)")
    round_trip = (t4_us - t1_us) - (t3_us - t2_us)
    if round_trip < 0:
        raise ValidationError(
            f"negative round trip ({round_trip} us): exchange rejected"
        )
    offset = ((t2_us - t1_us) + (t3_us - t4_us)) / 2.0
    return ClockOffset(offset, float(round_trip))
