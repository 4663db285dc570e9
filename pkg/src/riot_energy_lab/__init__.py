"""riot-energy-lab: energy simulation, collection, and prediction for a
reconfigurable BLE/VLC IoT network of nodes, mini-lamp gateways, and a
BeagleBone-based access point."""

from .gateway import (
    ApBaseConstants,
    ApOperatingPoint,
    BleDataPhase,
    BleMode,
    MiniLampConstants,
    VlcMode,
    ap_ble_peak_current,
    ap_ble_scan_only_current,
    ap_operating_current,
    ap_vlc_idle_ble_scan_current,
    ap_vlc_idle_current,
    ap_vlc_rx_current,
    ap_vlc_tx_current,
    minilamp_current,
)
from .node import (
    NodePowerCalibration,
    NodeState,
    node_state_power,
    read_calibration,
    shipped_calibration,
    write_calibration,
)
from .calibrate import fit_calibration
from .scenarios import (
    Once,
    Periodic,
    RandomPoisson,
    Scenario,
    StateSegment,
    Timeline,
    builtin_ap_profile,
    builtin_scenarios,
    expand_scenario,
    integrate,
    make_builtin,
    read_scenario,
    write_scenario,
)
from .harvest import HarvestConfig, HarvestResult, simulate_harvest
from .traces import (
    CurrentTrace,
    aggregate_network,
    despike,
    read_trace,
    resample_common_base,
    synthesize_trace,
    write_trace,
)
from .datasets import DatasetRow, build_dataset, gen_dataset, read_dataset, write_dataset

__version__ = "0.1.0"
