/** Typed API client plus the debounce/latest-wins plumbing the views share. */

import {
  ApProfileSpec,
  ApSimResponse,
  DatasetResponse,
  HarvestConfigSpec,
  NodeSimResponse,
  ScenarioSpec,
  TrainResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: "GET" | "POST", path: string, payload?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: payload === undefined ? undefined : { "content-type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
    if (!response.ok) {
      let code = "internal";
      let message = `${response.status}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/api/v1/health");
  }

  scenarios(): Promise<{ scenarios: ScenarioSpec[]; ap_profiles: ApProfileSpec[] }> {
    return this.request("GET", "/api/v1/scenarios");
  }

  simulateNode(
    scenario: ScenarioSpec | string,
    options: { horizon_s?: number; harvest?: HarvestConfigSpec } = {},
  ): Promise<NodeSimResponse> {
    return this.request("POST", "/api/v1/simulate/node", { scenario, ...options });
  }

  simulateAp(profile: ApProfileSpec | string): Promise<ApSimResponse> {
    return this.request("POST", "/api/v1/simulate/ap", { profile });
  }

  createDataset(params: { n_rows: number; seed: number; noise_sigma_ua?: number }): Promise<DatasetResponse> {
    return this.request("POST", "/api/v1/datasets", params);
  }

  trainModel(params: {
    kind: string;
    dataset_id: string;
    seed?: number;
    test_fraction?: number;
  }): Promise<TrainResponse> {
    return this.request("POST", "/api/v1/models", params);
  }

  predict(modelId: string, features: number[]): Promise<{ current_ua: number }> {
    return this.request("POST", `/api/v1/models/${modelId}/predict`, { features });
  }
}

/** Trailing-edge debounce; the what-if loop fires once typing settles. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  delayMs = 300,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) {
      timers.clear(handle);
    }
    handle = timers.set(() => fn(...args), delayMs);
  };
}

/** At most one in-flight request per view; stale responses are dropped. */
export class LatestWins<T> {
  private ticket = 0;

  async run(task: () => Promise<T>, apply: (value: T) => void, onError?: (e: unknown) => void) {
    const mine = ++this.ticket;
    try {
      const value = await task();
      if (mine === this.ticket) {
        apply(value);
      }
    } catch (error) {
      if (mine === this.ticket && onError) {
        onError(error);
      }
    }
  }
}
