import type {
  FrontSummary,
  NavigateResponse,
  PointDetail,
  ProblemDescriptor,
  RunConfigBody,
  RunStatus,
  WorstcaseResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body?.message ?? response.statusText);
  }
  return body as T;
}

export class ApiClient {
  constructor(private base = "") {}

  listProblems(): Promise<ProblemDescriptor[]> {
    return request(`${this.base}/api/problems`);
  }

  createRun(config: RunConfigBody): Promise<{ id: string; status: string }> {
    return request(`${this.base}/api/runs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(config),
    });
  }

  runStatus(id: string): Promise<RunStatus> {
    return request(`${this.base}/api/runs/${id}`);
  }

  front(id: string): Promise<FrontSummary> {
    return request(`${this.base}/api/runs/${id}/front`);
  }

  point(id: string, pointId: number): Promise<PointDetail> {
    return request(`${this.base}/api/runs/${id}/points/${pointId}`);
  }

  navigate(id: string, bounds: (number | null)[], reference: number | null): Promise<NavigateResponse> {
    return request(`${this.base}/api/runs/${id}/navigate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ upper_bounds: bounds, reference }),
    });
  }

  worstcase(id: string, scenarioIds: number[]): Promise<WorstcaseResponse> {
    return request(`${this.base}/api/runs/${id}/worstcase`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ scenario_ids: scenarioIds }),
    });
  }

  async waitForRun(id: string, timeoutMs = 300_000, pollMs = 400): Promise<RunStatus> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const status = await this.runStatus(id);
      if (status.status === "done" || status.status === "failed") return status;
      if (Date.now() > deadline) throw new Error(`run ${id} timed out`);
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }
}

/** Serializes async UI queries so only the latest result is applied. */
export function latestWins<T>(): (work: () => Promise<T>, apply: (value: T) => void) => Promise<void> {
  let token = 0;
  return async (work, apply) => {
    const mine = ++token;
    const value = await work();
    if (mine === token) apply(value);
  };
}

export function debounce<A extends unknown[]>(fn: (...args: A) => void, waitMs: number): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) clearTimeout(handle);
    handle = setTimeout(() => fn(...args), waitMs);
  };
}
