/** Scenario builder view model: segment editing, validation, live totals.
 *
 * All numbers in the totals panel are verbatim server values; the model only
 * moves segments around and decides when a request may be sent.
 */

import { displayNumber } from "../format.js";
import {
  HarvestConfigSpec,
  NodeSegmentSpec,
  NodeSimResponse,
  RepeatSpec,
  ScenarioSpec,
} from "../types.js";
import { FieldError, validateScenario } from "../validators.js";

export interface TotalsDisplay {
  scenario: string;
  energyJ: string;
  chargeC: string;
  avgPowerMw: string;
}

export interface HarvestDisplay {
  depletionCount: number;
  depletionTimes: string[];
  finalVoltage: string;
}

export class ScenarioBuilder {
  name = "draft";
  horizonS = 86400;
  repeat: RepeatSpec = { mode: "periodic", period_s: 60 };
  segments: NodeSegmentSpec[] = [];
  filler: string | undefined = "deep_sleep";
  harvest: HarvestConfigSpec | undefined;

  lastResponse: NodeSimResponse | undefined;
  lastErrors: FieldError[] = [];

  loadScenario(spec: ScenarioSpec): void {
    this.name = spec.name;
    this.horizonS = spec.horizon_s;
    this.repeat = spec.repeat;
    this.segments = [...(spec.preamble ?? []), ...spec.cycle].map((s) => ({ ...s }));
    // preamble segments merge into the editable list; re-exports are cycle-only
    this.filler = spec.filler;
  }

  addSegment(state: string, durationS: number, index?: number): void {
    const seg = { state, duration_s: durationS };
    if (index === undefined) {
      this.segments.push(seg);
    } else {
      this.segments.splice(index, 0, seg);
    }
  }

  removeSegment(index: number): void {
    this.segments.splice(index, 1);
  }

  /** Drag-to-reorder support. */
  moveSegment(from: number, to: number): void {
    if (from < 0 || from >= this.segments.length || to < 0 || to >= this.segments.length) {
      return;
    }
    const [seg] = this.segments.splice(from, 1);
    this.segments.splice(to, 0, seg!);
  }

  setDuration(index: number, durationS: number): void {
    const seg = this.segments[index];
    if (seg) {
      seg.duration_s = durationS;
    }
  }

  toSpec(): ScenarioSpec {
    return {
      name: this.name,
      horizon_s: this.horizonS,
      repeat: this.repeat,
      cycle: this.segments.map((s) => ({ ...s })),
      ...(this.filler ? { filler: this.filler } : {}),
    };
  }

  /** Validation gate: no request is sent while the draft is invalid. */
  validate(): FieldError[] {
    this.lastErrors = validateScenario(this.toSpec()).errors;
    return this.lastErrors;
  }

  get canSimulate(): boolean {
    return this.validate().length === 0 && this.segments.length > 0;
  }

  requestPayload(): { scenario: ScenarioSpec; harvest?: HarvestConfigSpec } {
    return { scenario: this.toSpec(), ...(this.harvest ? { harvest: this.harvest } : {}) };
  }

  applyResponse(response: NodeSimResponse): TotalsDisplay {
    this.lastResponse = response;
    return this.totals()!;
  }

  totals(): TotalsDisplay | undefined {
    if (!this.lastResponse) {
      return undefined;
    }
    return {
      scenario: this.lastResponse.scenario,
      energyJ: displayNumber(this.lastResponse.energy_j),
      chargeC: displayNumber(this.lastResponse.charge_c),
      avgPowerMw: displayNumber(this.lastResponse.avg_power_mw),
    };
  }

  harvestOverlay(): HarvestDisplay | undefined {
    const h = this.lastResponse?.harvest;
    if (!h) {
      return undefined;
    }
    return {
      depletionCount: h.depletion_events.length,
      depletionTimes: h.depletion_events.map((t) => displayNumber(t)),
      finalVoltage: displayNumber(h.voltages[h.voltages.length - 1]),
    };
  }
}
