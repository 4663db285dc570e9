/** Browser entry point: wires the three views to the API. */

import { ApiClient, LatestWins, debounce } from "./api.js";
import { clear, fieldErrorList, h, svgStepPlot } from "./dom.js";
import { NODE_STATES, ScenarioSpec } from "./types.js";
import { stepPoints, toSvgPath, voltagePoints } from "./viewmodels/charts.js";
import { ApProfileView } from "./viewmodels/apProfile.js";
import { DatasetModelView, METRICS_TABLE_ORDER } from "./viewmodels/datasetModel.js";
import { ScenarioBuilder } from "./viewmodels/scenarioBuilder.js";

const api = new ApiClient("");

function mountScenarioBuilder(root: HTMLElement): void {
  const builder = new ScenarioBuilder();
  const inflight = new LatestWins<Awaited<ReturnType<typeof api.simulateNode>>>();
  let builtins: ScenarioSpec[] = [];

  const picker = h("select", {
    change: () => {
      const spec = builtins.find((s) => s.name === (picker as HTMLSelectElement).value);
      if (spec) {
        builder.loadScenario(spec);
        redraw();
        requestSimulation();
      }
    },
  }) as HTMLSelectElement;

  const totalsPanel = h("div", { class: "totals" });
  const segmentsPanel = h("div", { class: "segments" });
  const errorsPanel = h("div", { class: "error-panel" });
  const chartPanel = h("div", { class: "chart" });

  const requestSimulation = debounce(() => {
    if (!builder.canSimulate) {
      clear(errorsPanel);
      errorsPanel.append(fieldErrorList(builder.lastErrors));
      return;
    }
    clear(errorsPanel);
    const payload = builder.requestPayload();
    void inflight.run(
      () => api.simulateNode(payload.scenario, { harvest: payload.harvest }),
      (response) => {
        builder.applyResponse(response);
        drawTotals();
      },
      (error) => {
        clear(errorsPanel);
        errorsPanel.append(h("p", { class: "errors" }, String(error)));
      },
    );
  }, 300);

  function drawTotals(): void {
    clear(totalsPanel);
    const totals = builder.totals();
    if (!totals) {
      return;
    }
    totalsPanel.append(
      h("p", {}, "energy: ", h("strong", {}, totals.energyJ), " J"),
      h("p", {}, "charge: ", h("strong", {}, totals.chargeC), " C"),
      h("p", {}, "average power: ", h("strong", {}, totals.avgPowerMw), " mW"),
    );
    const harvest = builder.harvestOverlay();
    if (harvest) {
      totalsPanel.append(
        h(
          "p",
          { class: harvest.depletionCount ? "depleted" : "" },
          `depletion events: ${harvest.depletionCount}`,
          harvest.depletionCount ? ` at ${harvest.depletionTimes.join(", ")} s` : "",
        ),
      );
    }
    clear(chartPanel);
    if (builder.lastResponse) {
      chartPanel.append(
        svgStepPlot(toSvgPath(stepPoints(builder.lastResponse.timeline), 640, 160), 640, 160),
      );
      if (builder.lastResponse.harvest) {
        const hv = builder.lastResponse.harvest;
        chartPanel.append(
          svgStepPlot(toSvgPath(voltagePoints(hv.times_s, hv.voltages), 640, 80), 640, 80),
        );
      }
    }
  }

  function redraw(): void {
    clear(segmentsPanel);
    builder.segments.forEach((seg, index) => {
      const stateSelect = h("select", {
        change: (event) => {
          seg.state = (event.target as HTMLSelectElement).value;
          requestSimulation();
        },
      }) as HTMLSelectElement;
      for (const state of NODE_STATES) {
        const opt = h("option", { value: state }, state) as HTMLOptionElement;
        opt.selected = state === seg.state;
        stateSelect.append(opt);
      }
      const durationInput = h("input", {
        type: "number",
        step: "any",
        value: String(seg.duration_s),
        input: (event) => {
          builder.setDuration(index, Number((event.target as HTMLInputElement).value));
          const errors = builder.validate();
          clear(errorsPanel);
          if (errors.length) {
            errorsPanel.append(fieldErrorList(errors));
          } else {
            requestSimulation();
          }
        },
      });
      const row = h(
        "div",
        { class: "segment-row", draggable: "true" },
        h("span", { class: "grip" }, "⋮⋮"),
        stateSelect,
        durationInput,
        h("button", { click: () => { builder.removeSegment(index); redraw(); requestSimulation(); } }, "✕"),
        h("button", { click: () => { builder.moveSegment(index, index - 1); redraw(); requestSimulation(); } }, "↑"),
        h("button", { click: () => { builder.moveSegment(index, index + 1); redraw(); requestSimulation(); } }, "↓"),
      );
      segmentsPanel.append(row);
    });
    segmentsPanel.append(
      h("button", {
        click: () => {
          builder.addSegment("idle", 1.0);
          redraw();
          requestSimulation();
        },
      }, "add segment"),
    );
  }

  root.append(
    h("h2", {}, "Node scenario builder"),
    h("label", {}, "built-in: ", picker),
    segmentsPanel,
    errorsPanel,
    totalsPanel,
    chartPanel,
  );

  void api.scenarios().then((body) => {
    builtins = body.scenarios;
    for (const spec of builtins) {
      picker.append(h("option", { value: spec.name }, spec.name));
    }
    const first = builtins[0];
    if (first) {
      builder.loadScenario(first);
      redraw();
      requestSimulation();
    }
  });
}

function mountApProfile(root: HTMLElement): void {
  const view = new ApProfileView();
  const inflight = new LatestWins<Awaited<ReturnType<typeof api.simulateAp>>>();
  const current = h("strong", {}, "—");
  const totalsPanel = h("div", { class: "totals" });
  const chartPanel = h("div", { class: "chart" });

  const probe = debounce(() => {
    void inflight.run(
      () => api.simulateAp(view.sliderPayload()),
      (response) => {
        current.textContent = view.applySliderResponse(response);
      },
    );
  }, 300);

  const slider = h("input", {
    type: "range",
    min: "0",
    max: "98",
    value: "0",
    input: (event) => {
      if (view.setSlider(Number((event.target as HTMLInputElement).value))) {
        probe();
      }
    },
  });

  const simulateProfile = () => {
    void api.simulateAp(view.profileName).then((response) => {
      const totals = view.applyProfileResponse(response);
      clear(totalsPanel);
      totalsPanel.append(
        h("p", {}, "profile: ", totals.profile),
        h("p", {}, "energy: ", h("strong", {}, totals.energyJ), " J"),
        h("p", {}, "charge: ", h("strong", {}, totals.chargeC), " C"),
        h("p", {}, "average current: ", h("strong", {}, totals.avgCurrentMa), " mA"),
      );
      clear(chartPanel);
      chartPanel.append(
        svgStepPlot(toSvgPath(stepPoints(response.trace_preview), 640, 160), 640, 160),
      );
    });
  };

  root.append(
    h("h2", {}, "AP operating profile"),
    h("p", {}, "lamp brightness: ", slider, " predicted idle current: ", current, " mA"),
    h("button", { click: simulateProfile }, "simulate ap-validation profile"),
    totalsPanel,
    chartPanel,
  );
  probe();
}

function mountDatasetModel(root: HTMLElement): void {
  const view = new DatasetModelView();
  const status = h("p", { class: "status" });
  const table = h("table", { class: "metrics" });
  const prediction = h("strong", {}, "—");
  const errorsPanel = h("div", { class: "error-panel" });

  function drawTable(): void {
    clear(table);
    table.append(
      h("tr", {}, h("th", {}, "Model"), h("th", {}, "R²"), h("th", {}, "MAE"), h("th", {}, "RMSE")),
    );
    for (const row of view.metricsTable()) {
      table.append(
        h("tr", {}, h("td", {}, row.label), h("td", {}, row.r2), h("td", {}, row.mae), h("td", {}, row.rmse)),
      );
    }
  }

  const generate = h("button", {
    click: () => {
      void api.createDataset(view.datasetPayload()).then((response) => {
        status.textContent = `dataset ${view.applyDataset(response)} (${response.n_rows} rows)`;
      });
    },
  }, "generate dataset");

  const trainButtons = METRICS_TABLE_ORDER.map(({ kind, label }) =>
    h("button", {
      click: () => {
        const payload = view.trainPayload(kind);
        clear(errorsPanel);
        if (!payload) {
          errorsPanel.append(fieldErrorList(view.lastErrors));
          return;
        }
        status.textContent = `training ${label}...`;
        void api.trainModel(payload).then((response) => {
          view.applyTrainResponse(kind, response);
          status.textContent = `${label}: model ${response.model_id}`;
          drawTable();
        });
      },
    }, `train ${label}`),
  );

  const featureInputs = [0, 1, 2].map(() =>
    h("input", { type: "number", step: "any", value: "1" }) as HTMLInputElement,
  );
  const predictButton = h("button", {
    click: () => {
      const features = featureInputs.map((input) =>
        input.value === "" ? NaN : Number(input.value),
      );
      const first = view.metricsTable()[0];
      clear(errorsPanel);
      if (!first) {
        errorsPanel.append(fieldErrorList([{ field: "model", message: "train a model first" }]));
        return;
      }
      const payload = view.predictPayload(first.kind, features);
      if (!payload) {
        errorsPanel.append(fieldErrorList(view.lastErrors));
        return;
      }
      void api.predict(payload.modelId, payload.features).then((response) => {
        prediction.textContent = view.applyPrediction(response);
      });
    },
  }, "predict");

  root.append(
    h("h2", {}, "Datasets & models"),
    h("div", {}, generate, ...trainButtons),
    status,
    table,
    h("p", {}, "what-if features (duration s, VLC bytes, BLE bytes): ",
      ...featureInputs, predictButton, " → ", prediction, " µA"),
    errorsPanel,
  );
  drawTable();
}

function main(): void {
  const app = document.getElementById("app");
  if (!app) {
    return;
  }
  const views: [string, (root: HTMLElement) => void][] = [
    ["scenario-builder", mountScenarioBuilder],
    ["ap-profile", mountApProfile],
    ["datasets-models", mountDatasetModel],
  ];
  for (const [id, mount] of views) {
    const section = h("section", { id, class: "view" });
    mount(section);
    app.append(section);
  }
}

main();
