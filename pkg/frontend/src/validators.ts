/** Client-side validation mirroring the server's rules.
 *
 * These checks exist so obviously-invalid drafts never generate a request;
 * the contract test verifies they accept exactly the payloads the server
 * accepts on the recorded corpus (no false rejects, no false accepts).
 */

import {
  ApPointSpec,
  ApProfileSpec,
  MODEL_KINDS,
  NODE_STATES,
  ScenarioSpec,
} from "./types.js";

export interface FieldError {
  field: string;
  message: string;
}

export interface ValidationResult {
  ok: boolean;
  errors: FieldError[];
}

const VALID_STATES = new Set<string>(NODE_STATES);

function result(errors: FieldError[]): ValidationResult {
  return { ok: errors.length === 0, errors };
}

export function validateScenario(spec: ScenarioSpec): ValidationResult {
  const errors: FieldError[] = [];
  if (!(spec.horizon_s > 0)) {
    errors.push({ field: "horizon_s", message: "horizon must be positive" });
  }
  const segments = [...(spec.preamble ?? []), ...spec.cycle];
  segments.forEach((seg, i) => {
    if (!(seg.duration_s > 0)) {
      errors.push({ field: `segment[${i}].duration_s`, message: "duration must be positive" });
    }
    if (!VALID_STATES.has(seg.state)) {
      errors.push({ field: `segment[${i}].state`, message: `unknown state '${seg.state}'` });
    }
  });
  if (spec.repeat.mode === "periodic") {
    const period = spec.repeat.period_s;
    if (!(period > 0)) {
      errors.push({ field: "repeat.period_s", message: "period must be positive" });
    }
    const active = spec.cycle.reduce((acc, seg) => acc + seg.duration_s, 0);
    if (period > 0 && active > period) {
      errors.push({
        field: "repeat.period_s",
        message: "cycle active time exceeds the period",
      });
    }
    if (period > 0 && active < period && !spec.filler) {
      errors.push({ field: "filler", message: "gaps between cycles need a filler state" });
    }
  } else if (spec.repeat.mode === "poisson") {
    if (!(spec.repeat.rate_per_s >= 0)) {
      errors.push({ field: "repeat.rate_per_s", message: "rate must be nonnegative" });
    }
    if (!spec.filler) {
      errors.push({ field: "filler", message: "random triggering needs a filler state" });
    }
  }
  if (spec.filler !== undefined && !VALID_STATES.has(spec.filler)) {
    errors.push({ field: "filler", message: `unknown state '${spec.filler}'` });
  }
  return result(errors);
}

export function validateApPoint(point: ApPointSpec, field: string): FieldError[] {
  const errors: FieldError[] = [];
  if (point.vlc) {
    const duty = point.vlc.duty_pct;
    if (!(duty >= 0 && duty <= 98)) {
      errors.push({ field: `${field}.vlc.duty_pct`, message: "duty must be within 0-98 %" });
    }
    if (point.vlc.mode === "tx" && point.vlc.chunks !== undefined && point.vlc.chunks < 1) {
      errors.push({ field: `${field}.vlc.chunks`, message: "at least one chunk" });
    }
  }
  if (point.ble?.mode === "scanning") {
    const w = point.ble.window_ms ?? 0;
    const iv = point.ble.interval_ms ?? 0;
    if (!(w > 0 && w <= iv)) {
      errors.push({
        field: `${field}.ble`,
        message: "scanning needs 0 < window <= interval",
      });
    }
  }
  if (point.eth_tx && point.eth === false) {
    errors.push({ field: `${field}.eth_tx`, message: "Ethernet transfer needs the link up" });
  }
  return errors;
}

export function validateApProfile(spec: ApProfileSpec): ValidationResult {
  const errors: FieldError[] = [];
  if (!(spec.horizon_s > 0)) {
    errors.push({ field: "horizon_s", message: "horizon must be positive" });
  }
  const segments = [...(spec.preamble ?? []), ...spec.cycle];
  segments.forEach((seg, i) => {
    if (!(seg.duration_s > 0)) {
      errors.push({ field: `segment[${i}].duration_s`, message: "duration must be positive" });
    }
    errors.push(...validateApPoint(seg.ap ?? {}, `segment[${i}]`));
  });
  if (spec.repeat.mode === "periodic") {
    const active = spec.cycle.reduce((acc, seg) => acc + seg.duration_s, 0);
    if (!(spec.repeat.period_s > 0) || active > spec.repeat.period_s) {
      errors.push({ field: "repeat.period_s", message: "cycle must fit in the period" });
    }
  }
  return result(errors);
}

export function validateTrainRequest(payload: {
  kind?: string;
  dataset_id?: string;
  test_fraction?: number;
}): ValidationResult {
  const errors: FieldError[] = [];
  if (!payload.kind || !(MODEL_KINDS as readonly string[]).includes(payload.kind)) {
    errors.push({ field: "kind", message: `model kind must be one of ${MODEL_KINDS.join(", ")}` });
  }
  if (!payload.dataset_id) {
    errors.push({ field: "dataset_id", message: "dataset id is required" });
  }
  if (
    payload.test_fraction !== undefined &&
    !(payload.test_fraction > 0 && payload.test_fraction < 1)
  ) {
    errors.push({ field: "test_fraction", message: "test fraction must be in (0, 1)" });
  }
  return result(errors);
}

export function validatePredictFeatures(features: unknown[]): ValidationResult {
  const errors: FieldError[] = [];
  if (features.length !== 3) {
    errors.push({ field: "features", message: "exactly 3 features are required" });
  }
  features.forEach((f, i) => {
    if (typeof f !== "number" || !Number.isFinite(f)) {
      errors.push({ field: `features[${i}]`, message: "must be a finite number" });
    }
  });
  return result(errors);
}
