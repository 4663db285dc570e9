"""Current-trace synthesis, preprocessing, and aggregation.

Traces are uniformly sampled current sequences in microamps with a
microsecond epoch origin, mirroring what a bench ammeter streams.  The
preprocessing mirrors the collection pipeline: align all devices onto a
common time base, then remove transient spikes with a Hampel filter.

Trace file format: ``t_us,current_uA`` CSV plus a ``.meta.json`` sidecar
holding device id, sample rate, and configuration tags.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import UnitError, ValidationError
from .scenarios import CURRENT_MILLIAMPS, POWER_MILLIWATTS, Timeline, current_at


@dataclass
class CurrentTrace:
    """Uniformly sampled current trace of one device."""

    device_id: str
    t0_us: int  # epoch of sample 0, microseconds
    sample_rate_hz: float
    samples_ua: np.ndarray
    config_tags: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise ValidationError("sample_rate_hz must be positive")
        self.samples_ua = np.asarray(self.samples_ua, dtype=np.float64)

    @property
    def n_samples(self) -> int:
        return int(self.samples_ua.shape[0])

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz

    @property
    def end_us(self) -> int:
        return self.t0_us + round(self.n_samples * 1e6 / self.sample_rate_hz)

    def times_us(self) -> np.ndarray:
        return self.t0_us + np.arange(self.n_samples) * (1e6 / self.sample_rate_hz)

    def mean_ua(self) -> float:
        return float(np.mean(self.samples_ua))

    def integral_uc(self) -> float:
        """Charge in microcoulombs via the sample-and-hold Riemann sum."""
        return float(np.sum(self.samples_ua)) / self.sample_rate_hz


def synthesize_trace(
    timeline: Timeline,
    sample_rate_hz: float,
    noise_sigma_ua: float = 0.0,
    seed: int = 0,
    t0_us: int = 0,
    device_id: str = "sim",
    supply_voltage_v: float | None = None,
    config_tags: dict[str, str] | None = None,
) -> CurrentTrace:
    """Sample a timeline into a noisy current trace.

    Current timelines sample directly; power timelines (node scenarios) need
    ``supply_voltage_v`` to convert mW to mA.  Gaussian noise is drawn from
    the seeded generator and negative samples are clamped at zero.
    """
    if not sample_rate_hz > 0:
        raise ValidationError("sample_rate_hz must be positive")
    if timeline.value_kind == POWER_MILLIWATTS:
        if supply_voltage_v is None:
            raise UnitError(
                "power-based timeline: pass supply_voltage_v to convert to current"
            )
        scale = 1e3 / supply_voltage_v  # mW -> uA at the given voltage
    elif timeline.value_kind == CURRENT_MILLIAMPS:
        scale = 1e3  # mA -> uA
    else:  # pragma: no cover
        raise UnitError(f"cannot synthesize from value kind {timeline.value_kind}")

    n = int(np.floor(timeline.total_duration_s * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz
    values = current_at(timeline, t) * scale
    if noise_sigma_ua > 0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, noise_sigma_ua, n)
        np.clip(values, 0.0, None, out=values)
    return CurrentTrace(
        device_id=device_id,
        t0_us=t0_us,
        sample_rate_hz=sample_rate_hz,
        samples_ua=values,
        config_tags=dict(config_tags or {}),
    )


def resample_common_base(
    traces: list[CurrentTrace], target_rate_hz: float
) -> list[CurrentTrace]:
    """Linearly interpolate all traces onto one shared sampling grid.

    The grid spans the latest start to the earliest end across the traces at
    ``target_rate_hz``.  The shift applied to each trace is recorded in its
    ``resample_shift_us`` config tag.
    """
    if not traces:
        raise ValidationError("no traces to resample")
    if not target_rate_hz > 0:
        raise ValidationError("target_rate_hz must be positive")
    t_start = max(tr.t0_us for tr in traces)
    t_end = min(tr.end_us for tr in traces)
    if t_end <= t_start:
        raise ValidationError("traces have no overlapping time range")
    step_us = 1e6 / target_rate_hz
    n = int(np.floor((t_end - t_start) / step_us))
    if n < 1:
        raise ValidationError("common time range shorter than one target sample")
    grid = t_start + np.arange(n) * step_us

    out = []
    for tr in traces:
        resampled = np.interp(grid, tr.times_us(), tr.samples_ua)
        tags = dict(tr.config_tags)
        tags["resample_shift_us"] = str(int(t_start - tr.t0_us))
        out.append(
            CurrentTrace(
                device_id=tr.device_id,
                t0_us=int(t_start),
                sample_rate_hz=target_rate_hz,
                samples_ua=resampled,
                config_tags=tags,
            )
        )
    return out


def despike(trace: CurrentTrace, window: int = 5, n_sigmas: float = 3.0) -> CurrentTrace:
    """Hampel-filter transient spikes out of a trace.

    Samples deviating from their centered windowed median by more than
    ``n_sigmas * 1.4826 * MAD`` are replaced by that median; genuine
    sustained level changes pass through untouched.
    """
    if window < 3 or window % 2 == 0:
        raise ValidationError("window must be an odd number of samples >= 3")
    if window > trace.n_samples:
        raise ValidationError(
            f"window ({window}) larger than the trace ({trace.n_samples} samples)"
        )
    filtered, _ = _kernels.hampel(
        np.ascontiguousarray(trace.samples_ua), window, n_sigmas
    )
    return CurrentTrace(
        device_id=trace.device_id,
        t0_us=trace.t0_us,
        sample_rate_hz=trace.sample_rate_hz,
        samples_ua=filtered,
        config_tags=dict(trace.config_tags),
    )


def aggregate_network(traces: list[CurrentTrace]) -> CurrentTrace:
    """Sample-wise sum of already-aligned traces: the network-level trace.

    Config tags are union-merged under ``<device_id>.<key>`` names.
    """
    if not traces:
        raise ValidationError("no traces to aggregate")
    first = traces[0]
    for tr in traces[1:]:
        if (
            tr.t0_us != first.t0_us
            or tr.sample_rate_hz != first.sample_rate_hz
            or tr.n_samples != first.n_samples
        ):
            raise ValidationError(
                "traces are not on a common base; run resample_common_base first"
            )
    total = np.zeros(first.n_samples)
    tags: dict[str, str] = {}
    for tr in traces:
        total += tr.samples_ua
        for k, v in tr.config_tags.items():
            tags[f"{tr.device_id}.{k}"] = v
    return CurrentTrace(
        device_id="network",
        t0_us=first.t0_us,
        sample_rate_hz=first.sample_rate_hz,
        samples_ua=total,
        config_tags=tags,
    )


# --- trace file IO -----------------------------------------------------------


def write_trace(trace: CurrentTrace, path: str | Path) -> None:
    path = Path(path)
    times = trace.times_us()
    with path.open("w") as fh:
        fh.write("t_us,current_uA\n")
        for t, v in zip(times, trace.samples_ua):
            fh.write(f"{int(round(t))},{float(v)!r}\n")
    sidecar = {
        "device_id": trace.device_id,
        "t0_us": trace.t0_us,
        "sample_rate_hz": trace.sample_rate_hz,
        "config_tags": trace.config_tags,
    }
    path.with_suffix(path.suffix + ".meta.json").write_text(json.dumps(sidecar, indent=2))


def read_trace(path: str | Path) -> CurrentTrace:
    path = Path(path)
    meta_path = path.with_suffix(path.suffix + ".meta.json")
    if not meta_path.exists():
        raise ValidationError(f"missing trace sidecar {meta_path}")
    meta = json.loads(meta_path.read_text())
    samples = []
    with path.open() as fh:
        header = fh.readline().strip()
        if header != "t_us,current_uA":
            raise ValidationError(f"unexpected trace header {header!r} in {path}")
        for line in fh:
            line = line.strip()
            if line:
                samples.append(float(line.split(",", 1)[1]))
    return CurrentTrace(
        device_id=meta["device_id"],
        t0_us=int(meta["t0_us"]),
        sample_rate_hz=float(meta["sample_rate_hz"]),
        samples_ua=np.asarray(samples),
        config_tags={str(k): str(v) for k, v in meta.get("config_tags", {}).items()},
    )
