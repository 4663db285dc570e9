/** Dataset & model view model: generate, train, compare, predict.
 *
 * The metrics table lists the model families in the conventional order
 * (linear baselines first, then the ensemble/neural families); every cell is
 * a verbatim server value.
 */

import { displayNumber } from "../format.js";
import { DatasetResponse, ModelKindName, TrainResponse } from "../types.js";
import {
  FieldError,
  validatePredictFeatures,
  validateTrainRequest,
} from "../validators.js";

export const METRICS_TABLE_ORDER: { kind: ModelKindName; label: string }[] = [
  { kind: "ridge", label: "Ridge Regression" },
  { kind: "linear", label: "Linear Regression" },
  { kind: "rf", label: "Random Forest" },
  { kind: "et", label: "Extra Trees" },
  { kind: "gb", label: "Gradient Boosting" },
  { kind: "mlp", label: "Neural Network" },
];

export interface MetricsRowDisplay {
  kind: ModelKindName;
  label: string;
  modelId: string;
  r2: string;
  mae: string;
  rmse: string;
}

export class DatasetModelView {
  nRows = 1000;
  seed = 0;
  datasetId: string | undefined;
  trained = new Map<ModelKindName, TrainResponse>();
  lastErrors: FieldError[] = [];
  predictionUa = "—";

  datasetPayload(): { n_rows: number; seed: number } {
    return { n_rows: this.nRows, seed: this.seed };
  }

  applyDataset(response: DatasetResponse): string {
    this.datasetId = response.dataset_id;
    return this.datasetId;
  }

  trainPayload(kind: ModelKindName, seed = this.seed) {
    const payload = { kind, dataset_id: this.datasetId ?? "", seed };
    this.lastErrors = validateTrainRequest(payload).errors;
    return this.lastErrors.length === 0 ? payload : undefined;
  }

  applyTrainResponse(kind: ModelKindName, response: TrainResponse): void {
    this.trained.set(kind, response);
  }

  metricsTable(): MetricsRowDisplay[] {
    const rows: MetricsRowDisplay[] = [];
    for (const { kind, label } of METRICS_TABLE_ORDER) {
      const trained = this.trained.get(kind);
      if (trained) {
        rows.push({
          kind,
          label,
          modelId: trained.model_id,
          r2: displayNumber(trained.metrics.r2),
          mae: displayNumber(trained.metrics.mae_ua),
          rmse: displayNumber(trained.metrics.rmse_ua),
        });
      }
    }
    return rows;
  }

  predictPayload(modelKind: ModelKindName, features: unknown[]) {
    const model = this.trained.get(modelKind);
    if (!model) {
      this.lastErrors = [{ field: "model", message: "train the model first" }];
      return undefined;
    }
    const check = validatePredictFeatures(features);
    this.lastErrors = check.errors;
    if (!check.ok) {
      return undefined;
    }
    return { modelId: model.model_id, features: features as number[] };
  }

  applyPrediction(response: { current_ua: number }): string {
    this.predictionUa = displayNumber(response.current_ua);
    return this.predictionUa;
  }
}
