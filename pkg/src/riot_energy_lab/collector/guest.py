"""Guest application: streams one device's current trace to the host.

Single logical thread: handshake, answer the host's sync exchanges with the
local (possibly skewed) clock, then stream acked sample batches with
exponential-backoff retries.
"""

from __future__ import annotations

import socket
from dataclasses import dataclass
from typing import Callable

from ..errors import ProtocolError, ValidationError
from ..traces import CurrentTrace
from .host import T0_TAG
from .messages import (
    ACK_END,
    ACK_HELLO,
    ACK_SYNC_DONE,
    Ack,
    ConfigReport,
    End,
    Error,
    Hello,
    SampleBatch,
    SyncRequest,
    SyncResponse,
    now_us,
    read_message,
    send_message,
)

ACK_TIMEOUT_S = 5.0
MAX_RETRIES = 3
BACKOFF_BASE_S = 0.2


@dataclass
class GuestReport:
    device_id: str
    n_samples: int
    n_batches: int
    n_retries: int


def guest_run(
    host_addr: tuple[str, int],
    source: CurrentTrace,
    batch_size: int = 1000,
    clock_us: Callable[[], int] = now_us,
    protocol_version_override: int | None = None,
) -> GuestReport:
    """Run one full guest session against a collection host.

    ``clock_us`` is the guest's local clock (injectable for skew tests).
    Raises :class:`ProtocolError` if the host refuses or an ack never
    arrives after the retry budget.
    """
    if batch_size < 1:
        raise ValidationError("batch_size must be >= 1")
    with socket.create_connection(host_addr, timeout=ACK_TIMEOUT_S) as sock:
        send_message(
            sock,
            Hello(
                source.device_id,
                source.sample_rate_hz,
                protocol_version_override
                if protocol_version_override is not None
                else Hello.protocol_version,
            ),
        )
        reply = read_message(sock)
        if isinstance(reply, Error):
            raise ProtocolError(f"host refused session: {reply.reason}")
        if not isinstance(reply, Ack) or reply.seq_no != ACK_HELLO:
            raise ProtocolError(f"unexpected hello reply: {reply!r}")

        tags = dict(source.config_tags)
        tags[T0_TAG] = str(source.t0_us)
        send_message(sock, ConfigReport(tags))

        # answer sync requests until the host signals completion
        while True:
            msg = read_message(sock)
            if isinstance(msg, SyncRequest):
                t2 = clock_us()
                send_message(sock, SyncResponse(msg.t1_us, t2, clock_us()))
            elif isinstance(msg, Ack) and msg.seq_no == ACK_SYNC_DONE:
                break
            else:
                raise ProtocolError(f"unexpected message during sync: {msg!r}")

        n_retries = 0
        samples = source.samples_ua
        n = len(samples)
        seq = 0
        sent = 0
        while sent < n:
            chunk = samples[sent : sent + batch_size]
            batch = SampleBatch(seq, sent, tuple(float(v) for v in chunk))
            n_retries += _send_with_retries(sock, batch)
            sent += len(chunk)
            seq += 1

        send_message(sock, End(n))
        reply = read_message(sock)
        if not isinstance(reply, Ack) or reply.seq_no != ACK_END:
            raise ProtocolError(f"host did not confirm session end: {reply!r}")
    return GuestReport(source.device_id, n, seq, n_retries)


def _send_with_retries(sock: socket.socket, batch: SampleBatch) -> int:
    """Send one batch, waiting for its ack; exponential backoff, 3 retries."""
    delay = BACKOFF_BASE_S
    for attempt in range(MAX_RETRIES + 1):
        send_message(sock, batch)
        try:
            sock.settimeout(ACK_TIMEOUT_S)
            reply = read_message(sock)
        except (TimeoutError, socket.timeout):
            reply = None
        if isinstance(reply, Ack) and reply.seq_no == batch.seq_no:
            return attempt
        if isinstance(reply, Error):
            raise ProtocolError(f"host aborted at batch {batch.seq_no}: {reply.reason}")
        if attempt < MAX_RETRIES:
            import time

            time.sleep(delay)
            delay *= 2
    raise ProtocolError(
        f"no ack for batch seq {batch.seq_no} "
        f"(samples from {batch.first_sample_index}) after {MAX_RETRIES} retries"
    )
