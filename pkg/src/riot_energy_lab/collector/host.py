"""Host application: aggregates guest sample streams onto a common time base.

One handler thread per guest connection.  Each session negotiates a clock
offset (median of several four-timestamp exchanges), then streams acked
sample batches.  Traces are written in host time (guest t0 minus the
estimated offset) together with a session manifest that stays valid no
matter which guests abort.
"""

from __future__ import annotations

import json
import socket
import socketserver
import statistics
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ProtocolError
from ..traces import CurrentTrace, write_trace
from .messages import (
    ACK_END,
    ACK_HELLO,
    ACK_SYNC_DONE,
    PROTOCOL_VERSION,
    Ack,
    ClockOffset,
    ConfigReport,
    End,
    Error,
    Hello,
    SampleBatch,
    SyncRequest,
    SyncResponse,
    estimate_offset,
    now_us,
    read_message,
    send_message,
)

N_SYNC_EXCHANGES = 5
SESSION_TIMEOUT_S = 30.0

T0_TAG = "t0_us"  # reserved config tag carrying the guest-clock trace origin


@dataclass
class DeviceRecord:
    device_id: str
    file: str | None
    n_samples: int
    sample_rate_hz: float
    offset_us: float
    round_trip_us: float
    partial: bool
    config_tags: dict[str, str] = field(default_factory=dict)
    error: str | None = None


@dataclass
class SessionSummary:
    output_dir: Path
    devices: list[DeviceRecord]

    @property
    def n_partial(self) -> int:
        return sum(1 for d in self.devices if d.partial)

    @property
    def manifest_path(self) -> Path:
        return self.output_dir / "manifest.json"


class CollectionHost:
    """TCP collection host; see :func:`host_serve` for the one-shot form."""

    def __init__(self, listen_addr: tuple[str, int], output_dir: str | Path):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._devices: list[DeviceRecord] = []
        self._active_ids: set[str] = set()
        self._completed = threading.Semaphore(0)

        host_obj = self

        class _Handler(socketserver.BaseRequestHandler):
            def handle(self):  # noqa: D102
                host_obj._handle_session(self.request)

        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = _Server(listen_addr, _Handler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def start(self) -> None:
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        if self._thread:
            self._thread.join()

    def wait_for_sessions(self, n: int, timeout_s: float | None = None) -> None:
        for _ in range(n):
            if not self._completed.acquire(timeout=timeout_s):
                raise TimeoutError(f"guest sessions did not complete within {timeout_s}s")

    def summary(self) -> SessionSummary:
        with self._lock:
            return SessionSummary(self.output_dir, list(self._devices))

    # --- session handling -------------------------------------------------

    def _handle_session(self, sock: socket.socket) -> None:
        sock.settimeout(SESSION_TIMEOUT_S)
        record: DeviceRecord | None = None
        samples: list[float] = []
        hello: Hello | None = None
        registered = False
        tags: dict[str, str] = {}
        offset = ClockOffset(0.0, 0.0)
        try:
            msg = read_message(sock)
            if not isinstance(msg, Hello):
                raise ProtocolError(f"expected Hello, got {type(msg).__name__}")
            hello = msg
            if hello.protocol_version != PROTOCOL_VERSION:
                send_message(
                    sock,
                    Error(f"unsupported protocol version {hello.protocol_version}"),
                )
                return
            with self._lock:
                if hello.device_id in self._active_ids:
                    send_message(
                        sock, Error(f"device {hello.device_id!r} already connected")
                    )
                    return
                self._active_ids.add(hello.device_id)
            registered = True
            send_message(sock, Ack(ACK_HELLO))

            msg = read_message(sock)
            if not isinstance(msg, ConfigReport):
                raise ProtocolError(f"expected ConfigReport, got {type(msg).__name__}")
            tags = dict(msg.config_tags)

            offset = self._synchronize(sock)
            send_message(sock, Ack(ACK_SYNC_DONE))

            samples, partial_reason = self._receive_stream(sock, hello)
            record = self._flush(hello, tags, offset, samples, partial_reason)
        except Exception as exc:  # noqa: BLE001 - any failure flushes a partial record
            if registered:
                record = self._flush(hello, tags, offset, samples, str(exc))
        finally:
            if registered:
                with self._lock:
                    self._active_ids.discard(hello.device_id)
                if record is not None:
                    self._completed.release()

    def _synchronize(self, sock: socket.socket) -> ClockOffset:
        estimates = []
        for _ in range(N_SYNC_EXCHANGES):
            t1 = now_us()
            send_message(sock, SyncRequest(t1))
            msg = read_message(sock)
            t4 = now_us()
            if not isinstance(msg, SyncResponse) or msg.t1_us != t1:
                raise ProtocolError("bad sync response")
            estimates.append(estimate_offset(t1, msg.t2_us, msg.t3_us, t4))
        offsets = [e.offset_us for e in estimates]
        median = statistics.median(offsets)
        nearest = min(estimates, key=lambda e: abs(e.offset_us - median))
        return ClockOffset(median, nearest.round_trip_us, nearest.estimated_at_us)

    def _receive_stream(
        self, sock: socket.socket, hello: Hello
    ) -> tuple[list[float], str | None]:
        samples: list[float] = []
        last_seq = -1
        while True:
            msg = read_message(sock)
            if msg is None:
                return samples, "guest disconnected mid-stream"
            if isinstance(msg, SampleBatch):
                if msg.seq_no == last_seq and msg.first_sample_index + len(msg.samples_ua) == len(samples):
                    send_message(sock, Ack(msg.seq_no))  # duplicate after ack loss
                    continue
                if msg.seq_no != last_seq + 1:
                    raise ProtocolError(
                        f"batch seq {msg.seq_no} after {last_seq}; sequence must increase by 1"
                    )
                if msg.first_sample_index != len(samples):
                    raise ProtocolError(
                        f"batch starts at sample {msg.first_sample_index}, expected {len(samples)}"
                    )
                samples.extend(msg.samples_ua)
                last_seq = msg.seq_no
                send_message(sock, Ack(msg.seq_no))
            elif isinstance(msg, End):
                if msg.total_samples != len(samples):
                    return samples, (
                        f"guest announced {msg.total_samples} samples, received {len(samples)}"
                    )
                send_message(sock, Ack(ACK_END))
                return samples, None
            else:
                raise ProtocolError(f"unexpected {type(msg).__name__} during streaming")

    def _flush(
        self,
        hello: Hello,
        tags: dict[str, str],
        offset: ClockOffset,
        samples: list[float],
        partial_reason: str | None,
    ) -> DeviceRecord:
        file_name: str | None = None
        if samples:
            guest_t0 = int(tags.get(T0_TAG, "0"))
            trace = CurrentTrace(
                device_id=hello.device_id,
                t0_us=int(round(guest_t0 - offset.offset_us)),
                sample_rate_hz=hello.sample_rate_hz,
                samples_ua=np.asarray(samples),
                config_tags={k: v for k, v in tags.items() if k != T0_TAG},
            )
            file_name = f"{hello.device_id}.csv"
            write_trace(trace, self.output_dir / file_name)
        record = DeviceRecord(
            device_id=hello.device_id,
            file=file_name,
            n_samples=len(samples),
            sample_rate_hz=hello.sample_rate_hz,
            offset_us=offset.offset_us,
            round_trip_us=offset.round_trip_us,
            partial=partial_reason is not None,
            config_tags={k: v for k, v in tags.items() if k != T0_TAG},
            error=partial_reason,
        )
        with self._lock:
            self._devices.append(record)
            self._write_manifest_locked()
        return record

    def _write_manifest_locked(self) -> None:
        manifest = {
            "format": "riot-energy-lab-session",
            "version": 1,
            "devices": [
                {
                    "device_id": d.device_id,
                    "file": d.file,
                    "n_samples": d.n_samples,
                    "sample_rate_hz": d.sample_rate_hz,
                    "offset_us": d.offset_us,
                    "round_trip_us": d.round_trip_us,
                    "partial": d.partial,
                    "error": d.error,
                    "config_tags": d.config_tags,
                }
                for d in self._devices
            ],
        }
        (self.output_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))


def host_serve(
    listen_addr: tuple[str, int],
    output_dir: str | Path,
    expect_guests: int,
    timeout_s: float | None = 120.0,
) -> SessionSummary:
    """Serve until ``expect_guests`` sessions finish; return the summary."""
    host = CollectionHost(listen_addr, output_dir)
    host.start()
    try:
        host.wait_for_sessions(expect_guests, timeout_s)
    finally:
        host.stop()
    return host.summary()
