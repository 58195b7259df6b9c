// View state, its URL encoding, and the display-only numeric helpers.
// Everything here must stay traceable to API fields; the only numerics are
// the axis normalization where each objective's maximum maps to 1.

export const MAX_RUNS = 3;

export interface ViewState {
  runs: string[];
  activeRun: string | null;
  bounds: (number | null)[];
  reference: number | null;
  scenarioSubset: number[] | null;
  selectedPoint: number | null;
  normalized: boolean;
}

export function initialState(): ViewState {
  return {
    runs: [],
    activeRun: null,
    bounds: [null, null],
    reference: null,
    scenarioSubset: null,
    selectedPoint: null,
    normalized: false,
  };
}

export function withRunToggled(state: ViewState, runId: string): ViewState {
  const runs = state.runs.includes(runId)
    ? state.runs.filter((r) => r !== runId)
    : [...state.runs, runId].slice(-MAX_RUNS);
  const activeRun = runs.includes(state.activeRun ?? "") ? state.activeRun : runs[0] ?? null;
  return { ...state, runs, activeRun, selectedPoint: null, reference: null, scenarioSubset: null };
}

export function markerForMethod(method: string): "diamond" | "circle" | "square" {
  if (method === "nominal") return "diamond";
  if (method === "rmo") return "circle";
  return "square";
}

export function methodLabel(method: string): string {
  switch (method) {
    case "nominal":
      return "nominal";
    case "rmo":
      return "robust (rmo)";
    case "maro_replication":
      return "adjustable robust (maro)";
    case "maro_affine":
      return "adjustable robust (affine rule)";
    default:
      return method;
  }
}

/** Per-objective maxima over all displayed fronts; the normalization scale. */
export function objectiveMaxima(fronts: number[][][]): number[] {
  const maxima: number[] = [];
  for (const front of fronts) {
    for (const row of front) {
      row.forEach((v, m) => {
        maxima[m] = Math.max(maxima[m] ?? -Infinity, Math.abs(v) > 0 ? Math.abs(v) : 1e-30);
      });
    }
  }
  return maxima;
}

export function normalizeRow(row: number[], maxima: number[], enabled: boolean): number[] {
  if (!enabled) return row;
  return row.map((v, m) => v / (maxima[m] || 1));
}

export function clampBounds(bounds: (number | null)[], ideal: number[], nadir: number[]): (number | null)[] {
  return bounds.map((b, m) => {
    if (b === null) return null;
    return Math.min(Math.max(b, ideal[m]), nadir[m]);
  });
}

const VERSION = "1";

export function encodeState(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("v", VERSION);
  if (state.runs.length) params.set("runs", state.runs.join(","));
  if (state.activeRun) params.set("active", state.activeRun);
  const bounds = state.bounds.map((b) => (b === null ? "" : String(b))).join(",");
  if (bounds.replace(/,/g, "") !== "") params.set("bounds", bounds);
  if (state.reference !== null) params.set("ref", String(state.reference));
  if (state.scenarioSubset !== null) params.set("scenarios", state.scenarioSubset.join(","));
  if (state.selectedPoint !== null) params.set("point", String(state.selectedPoint));
  if (state.normalized) params.set("norm", "1");
  return params.toString();
}

export function decodeState(encoded: string): ViewState {
  const params = new URLSearchParams(encoded);
  const state = initialState();
  if (params.get("v") !== VERSION) return state;
  const runs = params.get("runs");
  if (runs) state.runs = runs.split(",").filter(Boolean).slice(0, MAX_RUNS);
  state.activeRun = params.get("active") || state.runs[0] || null;
  if (state.activeRun && !state.runs.includes(state.activeRun)) state.activeRun = state.runs[0] ?? null;
  const bounds = params.get("bounds");
  if (bounds !== null) {
    state.bounds = bounds.split(",").map((piece) => (piece === "" ? null : Number(piece)));
  }
  const ref = params.get("ref");
  if (ref !== null && ref !== "") state.reference = Number(ref);
  const scenarios = params.get("scenarios");
  if (scenarios !== null) {
    state.scenarioSubset = scenarios === "" ? [] : scenarios.split(",").map(Number);
  }
  const point = params.get("point");
  if (point !== null && point !== "") state.selectedPoint = Number(point);
  state.normalized = params.get("norm") === "1";
  return state;
}
