/** View-model behavior: editing, request gating, debounce, latest-wins. */

import { describe, expect, it, vi } from "vitest";

import { LatestWins, debounce } from "../src/api.js";
import { NodeSimResponse, ScenarioSpec } from "../src/types.js";
import { stepPoints, toSvgPath } from "../src/viewmodels/charts.js";
import { sliderProbeProfile } from "../src/viewmodels/apProfile.js";
import { ScenarioBuilder } from "../src/viewmodels/scenarioBuilder.js";
import { loadFixture } from "./fixtures.js";

describe("scenario builder editing", () => {
  function builderWith(segments: [string, number][]): ScenarioBuilder {
    const b = new ScenarioBuilder();
    b.repeat = { mode: "once" };
    for (const [state, duration] of segments) {
      b.addSegment(state, duration);
    }
    return b;
  }

  it("loads a built-in and re-exports an equivalent cycle", () => {
    const fixtureScenario: ScenarioSpec = {
      name: "builtin:5h",
      horizon_s: 86400,
      repeat: { mode: "periodic", period_s: 3601.882 },
      preamble: [],
      cycle: [
        { state: "startup", duration_s: 0.909 },
        { state: "idle", duration_s: 0.03 },
        { state: "sensing", duration_s: 0.149 },
        { state: "idle", duration_s: 0.25 },
        { state: "eink_update", duration_s: 0.544 },
        { state: "deep_sleep", duration_s: 3600 },
      ],
      filler: "deep_sleep",
    };
    const b = new ScenarioBuilder();
    b.loadScenario(fixtureScenario);
    expect(b.segments).toHaveLength(6);
    expect(b.toSpec().cycle).toEqual(fixtureScenario.cycle);
    expect(b.canSimulate).toBe(true);
  });

  it("reorders segments like a drag handle", () => {
    const b = builderWith([["sensing", 1], ["idle", 2], ["ble_tx", 3]]);
    b.moveSegment(2, 0);
    expect(b.segments.map((s) => s.state)).toEqual(["ble_tx", "sensing", "idle"]);
    b.moveSegment(0, 5); // out of range: no-op
    expect(b.segments.map((s) => s.state)).toEqual(["ble_tx", "sensing", "idle"]);
  });

  it("zero duration blocks simulation with an inline field error", () => {
    const b = builderWith([["idle", 1]]);
    expect(b.canSimulate).toBe(true);
    b.setDuration(0, 0);
    expect(b.canSimulate).toBe(false);
    expect(b.lastErrors[0]!.field).toBe("segment[0].duration_s");
  });

  it("step chart geometry covers every timeline entry twice", () => {
    const fixture = loadFixture<NodeSimResponse>("simulate_node_5h");
    const points = stepPoints(fixture.body.timeline);
    expect(points).toHaveLength(fixture.body.timeline.entries.length * 2);
    const path = toSvgPath(points, 640, 160);
    expect(path.startsWith("M")).toBe(true);
    expect(path.split("L").length).toBe(points.length);
  });
});

describe("ap slider probe", () => {
  it("maps duty 0 to a lamp-off operating point", () => {
    const profile = sliderProbeProfile(0);
    expect(profile.cycle[0]!.ap.vlc).toBeUndefined();
  });

  it("maps positive duty to an idle lamp at that duty", () => {
    const profile = sliderProbeProfile(50);
    expect(profile.cycle[0]!.ap.vlc).toEqual({ mode: "idle", duty_pct: 50 });
  });
});

describe("request plumbing", () => {
  it("debounce fires once after the burst settles", () => {
    vi.useFakeTimers();
    const calls: number[] = [];
    const fire = debounce((x: number) => calls.push(x), 300);
    fire(1);
    fire(2);
    fire(3);
    vi.advanceTimersByTime(299);
    expect(calls).toEqual([]);
    vi.advanceTimersByTime(2);
    expect(calls).toEqual([3]);
    vi.useRealTimers();
  });

  it("latest-wins drops stale responses", async () => {
    const seen: string[] = [];
    const gate = new LatestWins<string>();
    let releaseFirst!: (v: string) => void;
    const first = new Promise<string>((resolve) => (releaseFirst = resolve));
    const p1 = gate.run(() => first, (v) => seen.push(v));
    const p2 = gate.run(async () => "second", (v) => seen.push(v));
    await p2;
    releaseFirst("first");
    await p1;
    expect(seen).toEqual(["second"]);
  });
});
