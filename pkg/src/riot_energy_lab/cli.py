"""riot-lab command line interface.

Exit codes: 0 ok, 2 validation/domain error, 3 I/O error, 4 protocol error.
"""

from __future__ import annotations

import csv
import os
import sys
from pathlib import Path

import click

from . import __version__, ml
from .calibrate import fit_calibration
from .collector import DEFAULT_PORT, PORT_ENV_VAR, guest_run, host_serve
from .config import load_constants
from .datasets import gen_dataset, read_dataset, write_dataset
from .errors import FrameError, ProtocolError, RiotLabError
from .node import (
    REFERENCE_TOTALS_24H_J,
    node_state_from_name,
    read_calibration,
    shipped_calibration,
    write_calibration,
)
from .scenarios import (
    builtin_ap_profile,
    expand_scenario,
    integrate,
    parse_builtin_ref,
    read_scenario,
)
from .server import DEFAULT_HTTP_PORT, HTTP_PORT_ENV_VAR, create_app
from .traces import read_trace, synthesize_trace, write_trace

EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_PROTOCOL = 4


def _fail(exc: BaseException) -> "sys.NoReturn":
    click.echo(f"error: {exc}", err=True)
    if isinstance(exc, (ProtocolError, FrameError)):
        sys.exit(EXIT_PROTOCOL)
    if isinstance(exc, OSError):
        sys.exit(EXIT_IO)
    sys.exit(EXIT_VALIDATION)


def _parse_duration(text: str) -> float:
    """'90s', '10m', '24h', or bare seconds."""
    text = text.strip().lower()
    factor = 1.0
    if text.endswith("h"):
        factor, text = 3600.0, text[:-1]
    elif text.endswith("m"):
        factor, text = 60.0, text[:-1]
    elif text.endswith("s"):
        text = text[:-1]
    try:
        return float(text) * factor
    except ValueError:
        raise click.BadParameter(f"cannot parse duration {text!r}") from None


def _parse_addr(text: str, default_port: int) -> tuple[str, int]:
    if ":" in text:
        host, port_s = text.rsplit(":", 1)
        return host or "127.0.0.1", int(port_s)
    return text, default_port


def _load_node_scenario(ref: str, horizon_s: float):
    if ref.startswith("builtin:"):
        return parse_builtin_ref(ref, horizon_s)
    return read_scenario(ref, horizon_override_s=horizon_s)


@click.group()
@click.version_option(__version__)
def main():
    """Energy simulation, collection, and prediction toolkit."""


@main.command("simulate-node")
@click.option("--scenario", required=True, help="Scenario file or builtin:<id><m|h> (e.g. builtin:5h).")
@click.option("--horizon", default="24h", show_default=True, help="Simulation horizon (s/m/h suffix).")
@click.option("--calib", type=click.Path(exists=True), help="Calibration file (default: shipped).")
@click.option("--constants", "constants_file", type=click.Path(exists=True), help="Constants file.")
@click.option("--emit-trace", type=click.Path(), help="Write a synthesized current trace CSV here.")
@click.option("--rate", default=1000.0, show_default=True, help="Trace sample rate (Hz).")
@click.option("--noise", default=0.0, show_default=True, help="Trace noise sigma (uA).")
@click.option("--seed", default=0, show_default=True)
def simulate_node(scenario, horizon, calib, constants_file, emit_trace, rate, noise, seed):
    """Simulate a node scenario and print energy/charge/average power."""
    try:
        horizon_s = _parse_duration(horizon)
        calibration = read_calibration(calib) if calib else shipped_calibration()
        constants = load_constants(constants_file)
        scn = _load_node_scenario(scenario, horizon_s)
        timeline = expand_scenario(scn, calibration=calibration)
        result = integrate(timeline, supply_voltage_v=constants.node_supply_voltage_v)
        click.echo(f"scenario:     {scn.name}")
        click.echo(f"horizon_s:    {scn.horizon_s:g}")
        click.echo(f"energy_j:     {result.energy_j!r}")
        click.echo(f"charge_c:     {result.charge_c!r}")
        click.echo(f"avg_power_mw: {result.avg_power_mw!r}")
        if emit_trace:
            trace = synthesize_trace(
                timeline, rate, noise, seed,
                device_id=scn.name,
                supply_voltage_v=constants.node_supply_voltage_v,
            )
            write_trace(trace, emit_trace)
            click.echo(f"trace:        {emit_trace} ({trace.n_samples} samples @ {rate:g} Hz)")
    except (RiotLabError, OSError) as exc:
        _fail(exc)


@main.command("simulate-ap")
@click.option("--profile", required=True, help="AP profile file or built-in name (ap-validation).")
@click.option("--constants", "constants_file", type=click.Path(exists=True), help="Constants file.")
@click.option("--emit-trace", type=click.Path(), help="Write a synthesized current trace CSV here.")
@click.option("--rate", default=1000.0, show_default=True, help="Trace sample rate (Hz).")
@click.option("--noise", default=0.0, show_default=True, help="Trace noise sigma (uA).")
@click.option("--seed", default=0, show_default=True)
def simulate_ap(profile, constants_file, emit_trace, rate, noise, seed):
    """Simulate an AP operating-point sequence."""
    try:
        constants = load_constants(constants_file)
        if Path(profile).exists():
            prof = read_scenario(profile)
        else:
            prof = builtin_ap_profile(profile)
        timeline = expand_scenario(prof, ap_constants=constants.ap)
        result = integrate(timeline, supply_voltage_v=constants.ap.supply_voltage_v)
        click.echo(f"profile:        {prof.name}")
        click.echo(f"energy_j:       {result.energy_j!r}")
        click.echo(f"charge_c:       {result.charge_c!r}")
        click.echo(f"avg_current_ma: {result.avg_current_ma!r}")
        if emit_trace:
            trace = synthesize_trace(timeline, rate, noise, seed, device_id=prof.name)
            write_trace(trace, emit_trace)
            click.echo(f"trace:          {emit_trace} ({trace.n_samples} samples @ {rate:g} Hz)")
    except (RiotLabError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--totals", required=True,
              help="CSV of scenario_id,period_s,energy_j rows, or 'builtin' for the reference totals.")
@click.option("--catalog", default="builtin", show_default=True,
              help="Duty-cycle catalog (only 'builtin' is available).")
@click.option("--out", type=click.Path(), default="node_powers.txt", show_default=True)
def calibrate(totals, catalog, out):
    """Fit per-state node powers to 24-hour scenario energy totals."""
    try:
        if catalog != "builtin":
            raise click.BadParameter("only the builtin catalog is available")
        if totals == "builtin":
            rows = list(REFERENCE_TOTALS_24H_J)
        else:
            rows = []
            with open(totals) as fh:
                for rec in csv.reader(fh):
                    if not rec or rec[0].startswith("#") or rec[0] == "scenario_id":
                        continue
                    rows.append((int(rec[0]), float(rec[1]), float(rec[2])))
        report = fit_calibration(rows)
        write_calibration(report.calibration, out)
        click.echo(report.summary())
        click.echo(f"max |relative error|: {report.max_abs_relative_error:.2%}")
        click.echo(f"calibration written to {out}")
    except (RiotLabError, OSError, ValueError) as exc:
        _fail(exc)


@main.command("gen-dataset")
@click.option("--scenario", default="builtin:2m", show_default=True,
              help="Scenario whose rest state is the window baseline.")
@click.option("--rows", "n_rows", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--noise", default=20.0, show_default=True, help="Target noise sigma (uA).")
@click.option("--calib", type=click.Path(exists=True), help="Calibration file (default: shipped).")
@click.option("--out", type=click.Path(), required=True)
def gen_dataset_cmd(scenario, n_rows, seed, noise, calib, out):
    """Generate a simulator-driven ML dataset CSV."""
    try:
        calibration = read_calibration(calib) if calib else shipped_calibration()
        scn = _load_node_scenario(scenario, 86400.0)
        baseline = scn.filler_state if scn.filler_state is not None else node_state_from_name("idle")
        rows = gen_dataset(n_rows, seed, calibration, noise, baseline_state=baseline)
        write_dataset(rows, out)
        click.echo(f"wrote {len(rows)} rows to {out} (baseline {baseline.value})")
    except (RiotLabError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--listen", default=None, help=f"host:port (default 0.0.0.0:{DEFAULT_PORT}).")
@click.option("--out", "output_dir", type=click.Path(), required=True)
@click.option("--expect", default=1, show_default=True, help="Guest sessions to wait for.")
@click.option("--timeout", default=300.0, show_default=True, help="Overall timeout (s).")
def host(listen, output_dir, expect, timeout):
    """Run the collection host until the expected guests finish."""
    try:
        default_port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
        addr = _parse_addr(listen, default_port) if listen else ("0.0.0.0", default_port)
        summary = host_serve(addr, output_dir, expect, timeout)
        for d in summary.devices:
            flag = "partial" if d.partial else "complete"
            click.echo(
                f"{d.device_id}: {d.n_samples} samples, offset {d.offset_us:+.0f} us [{flag}]"
            )
        click.echo(f"manifest: {summary.manifest_path}")
        if summary.n_partial:
            click.echo(f"warning: {summary.n_partial} partial session(s)", err=True)
    except (RiotLabError, OSError, TimeoutError) as exc:
        _fail(exc)


@main.command()
@click.option("--connect", required=True, help="host:port of the collection host.")
@click.option("--replay", type=click.Path(exists=True), required=True, help="Trace CSV to stream.")
@click.option("--batch", "batch_size", default=1000, show_default=True)
@click.option("--device", default=None, help="Override the trace's device id.")
def guest(connect, replay, batch_size, device):
    """Stream a recorded trace to a collection host."""
    try:
        default_port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
        trace = read_trace(replay)
        if device:
            trace.device_id = device
        report = guest_run(_parse_addr(connect, default_port), trace, batch_size)
        click.echo(
            f"streamed {report.n_samples} samples in {report.n_batches} batches "
            f"({report.n_retries} retries)"
        )
    except (RiotLabError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--model", "kind_name", required=True,
              type=click.Choice(["linear", "ridge", "rf", "et", "gb", "mlp"]))
@click.option("--data", required=True, type=click.Path(exists=True))
@click.option("--seed", default=0, show_default=True)
@click.option("--test-fraction", default=0.2, show_default=True,
              help="Held-out fraction; 0 trains on everything and reports in-sample metrics.")
@click.option("--out", type=click.Path(), help="Model file (default <data>.<model>.model.json).")
def train(kind_name, data, seed, test_fraction, out):
    """Train one model kind on a dataset CSV and print held-out metrics."""
    try:
        rows = read_dataset(data)
        if test_fraction > 0:
            train_rows, test_rows = ml.train_test_split(rows, test_fraction, seed)
        else:
            train_rows = test_rows = rows
        model = ml.fit(ml.kind_from_name(kind_name), train_rows, seed)
        metrics = ml.evaluate(model, test_rows)
        out = out or f"{data}.{kind_name}.model.json"
        ml.save_model(model, out)
        click.echo(f"model:   {out}")
        click.echo(f"r2:      {metrics.r2:.6f}")
        click.echo(f"mae_ua:  {metrics.mae_ua:.4f}")
        click.echo(f"rmse_ua: {metrics.rmse_ua:.4f}")
    except (RiotLabError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--model", "model_file", required=True, type=click.Path(exists=True))
@click.option("--data", required=True, type=click.Path(exists=True))
def evaluate(model_file, data):
    """Evaluate a saved model on a dataset CSV."""
    try:
        model = ml.load_model(model_file)
        metrics = ml.evaluate(model, read_dataset(data))
        click.echo(f"r2:      {metrics.r2:.6f}")
        click.echo(f"mae_ua:  {metrics.mae_ua:.4f}")
        click.echo(f"rmse_ua: {metrics.rmse_ua:.4f}")
    except (RiotLabError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--port", default=None, type=int, help=f"HTTP port (default {DEFAULT_HTTP_PORT}).")
@click.option("--listen", default="127.0.0.1", show_default=True,
              help="Bind address; pass 0.0.0.0 to expose.")
@click.option("--store", "store_dir", default="riot-lab-store", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(), default=None,
              help="Directory of built web UI assets to serve under /ui/.")
def serve(port, listen, store_dir, ui_dir):
    """Run the HTTP API (and optionally the web UI)."""
    try:
        import uvicorn

        if port is None:
            port = int(os.environ.get(HTTP_PORT_ENV_VAR, DEFAULT_HTTP_PORT))
        if ui_dir is None and Path("frontend/dist").is_dir():
            ui_dir = "frontend/dist"  # auto-detect; explicit --ui must exist
        app = create_app(store_dir, ui_dir)
        if ui_dir:
            click.echo(f"serving web UI from {Path(ui_dir).resolve()} under /ui/", err=True)
        uvicorn.run(app, host=listen, port=port, log_level="info")
    except (RiotLabError, OSError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
