"""Distributed energy-collection system: wire protocol, host, and guest."""

from .guest import GuestReport, guest_run
from .host import CollectionHost, DeviceRecord, SessionSummary, host_serve
from .messages import (
    DEFAULT_PORT,
    PORT_ENV_VAR,
    PROTOCOL_VERSION,
    Ack,
    ClockOffset,
    ConfigReport,
    End,
    Error,
    Hello,
    Message,
    SampleBatch,
    SyncRequest,
    SyncResponse,
    decode,
    encode,
    estimate_offset,
)

__all__ = [
    "Ack",
    "ClockOffset",
    "CollectionHost",
    "ConfigReport",
    "DEFAULT_PORT",
    "DeviceRecord",
    "End",
    "Error",
    "GuestReport",
    "Hello",
    "Message",
    "PORT_ENV_VAR",
    "PROTOCOL_VERSION",
    "SampleBatch",
    "SessionSummary",
    "SyncRequest",
    "SyncResponse",
    "decode",
    "encode",
    "estimate_offset",
    "guest_run",
    "host_serve",
]
