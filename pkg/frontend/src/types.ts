// Wire types for the run service; field names mirror the JSON exactly.

export interface VariableDescriptor {
  name: string;
  kind: "hnv" | "wsv";
  lower: number;
  upper: number;
}

export interface UncertainDescriptor {
  name: string;
  nominal: number;
  lower: number;
  upper: number;
}

export interface ProblemDescriptor {
  id: string;
  objectives: string[];
  variables: VariableDescriptor[];
  uncertain: UncertainDescriptor[];
  overrides: Record<string, unknown>;
}

export interface RunStatus {
  id: string;
  status: "pending" | "running" | "done" | "failed";
  method?: string;
  problem?: string;
  n_points?: number;
  error?: string;
}

export interface FrontSummary {
  run_id: string;
  method: string;
  problem: string;
  objective_names: string[];
  scenario_ids: number[];
  point_ids: number[];
  objectives: number[][];
}

export interface ScenarioRow {
  scenario_id: number;
  objectives: number[];
  max_violation: number;
  wsv: Record<string, number>;
}

export interface CostRecord {
  nominal_objectives: number[];
  gaps: number[] | null;
}

export interface PointDetail {
  id: number;
  solver_status: string;
  hnv: Record<string, number>;
  wsv?: Record<string, number>;
  wsv_per_scenario?: Record<string, number>[];
  objectives: number[];
  objectives_nominal: number[];
  objectives_worst_case: number[];
  scenario_table: ScenarioRow[];
  scatter_stats: { range: number[]; std: number[] };
  cost_of_robustness: CostRecord | null;
}

export interface NavigateResponse {
  surviving_point_ids: number[];
  nearest_point_id: number | null;
}

export interface WorstcasePoint {
  id: number;
  objectives: number[];
}

export interface WorstcaseResponse {
  points: WorstcasePoint[];
  scenario_ids: number[];
  upper_bound_for_maro: boolean;
}

export interface RunConfigBody {
  problem: string;
  method: string;
  overrides?: Record<string, unknown>;
  scenarios?: { strategy: string; rows?: Record<string, number>[] };
  scalarization?: { type: string; n_points?: number; weights?: number[][] };
  solver?: Record<string, number>;
  seed?: number;
}
