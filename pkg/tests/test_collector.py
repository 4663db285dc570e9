"""Collection protocol tests: framing, offset math, host/guest sessions."""

import socket
import struct
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riot_energy_lab.collector import (
    Ack,
    CollectionHost,
    ConfigReport,
    End,
    Hello,
    SampleBatch,
    SyncRequest,
    SyncResponse,
    decode,
    encode,
    estimate_offset,
    guest_run,
)
from riot_energy_lab.collector.messages import MAX_FRAME_BYTES, now_us
from riot_energy_lab.errors import FrameError, ProtocolError, ValidationError
from riot_energy_lab.traces import CurrentTrace, read_trace


class TestFraming:
    @pytest.mark.parametrize(
        "message",
        [
            Hello("node-1", 1000.0),
            ConfigReport({"ble": "scan", "vlc_duty": "50"}),
            SyncRequest(123456),
            SyncResponse(1, 2, 3),
            SampleBatch(7, 7000, (1.5, 2.5, 3.5)),
            End(10000),
            Ack(7),
        ],
    )
    def test_round_trip(self, message):
        assert decode(encode(message)[4:]) == message

    @given(
        seq=st.integers(0, 10**6),
        first=st.integers(0, 10**9),
        samples=st.lists(st.floats(0, 1e6, allow_nan=False, width=32), max_size=300),
    )
    @settings(max_examples=50, deadline=None)
    def test_batch_round_trip_property(self, seq, first, samples):
        batch = SampleBatch(seq, first, tuple(float(s) for s in samples))
        assert decode(encode(batch)[4:]) == batch

    def test_large_batch_round_trip(self):
        batch = SampleBatch(0, 0, tuple(float(i) * 0.125 for i in range(10_000)))
        assert decode(encode(batch)[4:]) == batch

    def test_unknown_type_rejected_by_name(self):
        with pytest.raises(ProtocolError, match="teapot"):
            decode(b'{"type": "teapot"}')

    def test_truncated_frame_detected(self):
        # a frame header announcing more bytes than the peer sends
        server = socket.socket()
        server.bind(("127.0.0.1", 0))
        server.listen(1)
        client = socket.create_connection(server.getsockname())
        conn, _ = server.accept()
        try:
            client.sendall(struct.pack(">I", 100) + b'{"type":"ack"')
            client.close()
            from riot_energy_lab.collector.messages import read_frame

            with pytest.raises(FrameError, match="mid-frame"):
                read_frame(conn)
        finally:
            conn.close()
            server.close()

    def test_oversize_frame_rejected(self):
        header = struct.pack(">I", MAX_FRAME_BYTES + 1)
        server = socket.socket()
        server.bind(("127.0.0.1", 0))
        server.listen(1)
        client = socket.create_connection(server.getsockname())
        conn, _ = server.accept()
        try:
            client.sendall(header)
            from riot_energy_lab.collector.messages import read_frame

            with pytest.raises(FrameError, match="16 MiB"):
                read_frame(conn)
        finally:
            client.close()
            conn.close()
            server.close()


class TestOffsetEstimation:
    def test_worked_example(self):
        off = estimate_offset(100, 150, 152, 110)
        assert off.offset_us == pytest.approx(46.0)
        assert off.round_trip_us == pytest.approx(8.0)

    def test_symmetric_delay_recovers_true_offset(self):
        true_offset = 12_345
        delay = 500
        t1 = 1_000_000
        t2 = t1 + delay + true_offset
        t3 = t2 + 40
        t4 = t1 + delay + (t3 - t2) + delay
        off = estimate_offset(t1, t2, t3, t4)
        assert off.offset_us == pytest.approx(true_offset)

    def test_negative_round_trip_rejected(self):
        with pytest.raises(ValidationError, match="rejected"):
            estimate_offset(100, 200, 500, 110)

    def test_host_clock_monotonicity_required(self):
        with pytest.raises(ValidationError, match="monotone"):
            estimate_offset(100, 150, 152, 90)


def make_trace(device_id, n=5000, value=100.0, t0=0, rate=1000.0):
    return CurrentTrace(device_id, t0, rate, np.full(n, value))


@pytest.fixture()
def running_host(tmp_path):
    host = CollectionHost(("127.0.0.1", 0), tmp_path / "out")
    host.start()
    yield host
    host.stop()


class TestSessions:
    def test_single_guest_lossless(self, running_host, tmp_path):
        rng = np.random.default_rng(3)
        trace = CurrentTrace("dev-a", 42_000_000, 1000.0, rng.uniform(0, 5000, 4321))
        report = guest_run(running_host.address, trace, batch_size=500)
        assert report.n_samples == 4321
        running_host.wait_for_sessions(1, timeout_s=10)
        stored = read_trace(tmp_path / "out" / "dev-a.csv")
        np.testing.assert_allclose(stored.samples_ua, trace.samples_ua, rtol=1e-6)

    def test_batch_size_independence(self, tmp_path):
        rng = np.random.default_rng(4)
        samples = rng.uniform(0, 100, 2500)
        results = []
        for batch_size in (1, 1000):
            host = CollectionHost(("127.0.0.1", 0), tmp_path / f"out{batch_size}")
            host.start()
            trace = CurrentTrace("dev", 0, 1000.0, samples.copy())
            guest_run(host.address, trace, batch_size=batch_size)
            host.wait_for_sessions(1, timeout_s=30)
            host.stop()
            results.append(read_trace(tmp_path / f"out{batch_size}" / "dev.csv").samples_ua)
        np.testing.assert_array_equal(results[0], results[1])

    def test_duplicate_device_refused(self, running_host):
        blocker_started = threading.Event()
        release = threading.Event()

        def slow_guest():
            # hold a session open under the same device id
            sock = socket.create_connection(running_host.address)
            from riot_energy_lab.collector.messages import read_message, send_message

            send_message(sock, Hello("dup-dev", 1000.0))
            read_message(sock)  # hello ack
            blocker_started.set()
            release.wait(10)
            sock.close()

        t = threading.Thread(target=slow_guest)
        t.start()
        blocker_started.wait(5)
        try:
            with pytest.raises(ProtocolError, match="already connected"):
                guest_run(running_host.address, make_trace("dup-dev", n=10))
        finally:
            release.set()
            t.join()

    def test_wrong_protocol_version_refused(self, running_host):
        with pytest.raises(ProtocolError, match="protocol version"):
            guest_run(
                running_host.address,
                make_trace("dev-v", n=10),
                protocol_version_override=99,
            )

    def test_disconnect_mid_stream_flags_partial(self, running_host, tmp_path):
        from riot_energy_lab.collector.messages import read_message, send_message

        sock = socket.create_connection(running_host.address)
        send_message(sock, Hello("flaky", 1000.0))
        read_message(sock)
        send_message(sock, ConfigReport({"t0_us": "0"}))
        while True:
            msg = read_message(sock)
            if isinstance(msg, SyncRequest):
                t = now_us()
                send_message(sock, SyncResponse(msg.t1_us, t, now_us()))
            elif isinstance(msg, Ack):
                break
        send_message(sock, SampleBatch(0, 0, (1.0, 2.0, 3.0)))
        read_message(sock)  # ack
        sock.close()  # vanish without End

        running_host.wait_for_sessions(1, timeout_s=35)
        summary = running_host.summary()
        record = next(d for d in summary.devices if d.device_id == "flaky")
        assert record.partial
        assert record.n_samples == 3
        # the manifest is still valid json listing the aborted session
        import json

        manifest = json.loads(summary.manifest_path.read_text())
        assert manifest["devices"][0]["partial"] is True

    def test_other_guests_unaffected_by_abort(self, running_host):
        bad = threading.Thread(
            target=lambda: _abort_after_hello(running_host.address)
        )
        bad.start()
        report = guest_run(running_host.address, make_trace("steady", n=2000))
        bad.join()
        assert report.n_samples == 2000


def _abort_after_hello(addr):
    sock = socket.create_connection(addr)
    from riot_energy_lab.collector.messages import send_message

    send_message(sock, Hello("aborter", 1000.0))
    sock.close()
