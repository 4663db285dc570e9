/** API payload and response shapes (mirrors the server's JSON contracts). */

export type RepeatSpec =
  | { mode: "periodic"; period_s: number }
  | { mode: "poisson"; rate_per_s: number; seed?: number }
  | { mode: "once" };

export interface NodeSegmentSpec {
  state: string;
  duration_s: number;
}

export interface VlcSpec {
  mode: "idle" | "tx" | "rx";
  duty_pct: number;
  chunks?: number;
}

export interface BleSpec {
  mode: "scanning" | "connected";
  window_ms?: number;
  interval_ms?: number;
  phase?: "idle" | "tx_command" | "rx_data";
}

export interface ApPointSpec {
  boot?: boolean;
  vlc?: VlcSpec;
  ble?: BleSpec;
  usb?: boolean;
  eth?: boolean;
  eth_tx?: boolean;
}

export interface ApSegmentSpec {
  ap: ApPointSpec;
  duration_s: number;
}

export interface ScenarioSpec {
  version?: number;
  name: string;
  horizon_s: number;
  repeat: RepeatSpec;
  preamble?: NodeSegmentSpec[];
  cycle: NodeSegmentSpec[];
  filler?: string;
}

export interface ApProfileSpec {
  version?: number;
  name: string;
  horizon_s: number;
  repeat: RepeatSpec;
  preamble?: ApSegmentSpec[];
  cycle: ApSegmentSpec[];
}

export interface TimelineEntryDto {
  t_start_s: number;
  duration_s: number;
  value: number;
  label: string;
}

export interface TimelinePreviewDto {
  value_kind: string;
  total_duration_s: number;
  n_entries: number;
  entries: TimelineEntryDto[];
  truncated: boolean;
}

export interface HarvestConfigSpec {
  source?: "rf" | "light";
  input_power_mw: number | [number, number][];
  capacitance_f: number;
  v_init: number;
  v_max: number;
  v_cutoff: number;
  halt_load_mw?: number;
}

export interface HarvestResultDto {
  times_s: number[];
  voltages: number[];
  depletion_events: number[];
}

export interface NodeSimResponse {
  scenario: string;
  horizon_s: number;
  energy_j: number;
  charge_c: number | null;
  avg_power_mw: number;
  timeline: TimelinePreviewDto;
  harvest?: HarvestResultDto;
}

export interface ApSimResponse {
  profile: string;
  energy_j: number;
  charge_c: number;
  avg_current_ma: number;
  trace_preview: TimelinePreviewDto;
}

export interface MetricsDto {
  r2: number;
  mae_ua: number;
  rmse_ua: number;
}

export interface TrainResponse {
  model_id: string;
  metrics: MetricsDto;
}

export interface DatasetResponse {
  dataset_id: string;
  n_rows: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: string;
}

export const NODE_STATES = [
  "startup",
  "ble_advertising_fast",
  "ble_connected_idle",
  "ble_connected_idle_vlc_listening",
  "bme_init",
  "sensing",
  "eink_update",
  "vlc_tx_frame",
  "ble_tx",
  "ble_rx",
  "idle",
  "idle_vlc_listening",
  "deep_sleep",
  "wake_up",
] as const;

export const MODEL_KINDS = ["linear", "ridge", "rf", "et", "gb", "mlp"] as const;
export type ModelKindName = (typeof MODEL_KINDS)[number];
