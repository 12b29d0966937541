/** Document shapes exchanged with the engine service. The workbench treats
 * all of these as opaque service-owned data: it renders tokens from response
 * bodies verbatim and never recomputes engine math client-side. */

export interface DependumDoc {
  id: string;
  kind: "goal" | "task" | "resource" | "softgoal";
  importance_weight: number;
}

export interface LinkDoc {
  depender: string;
  dependee: string;
  dependum_id: string;
  criticality: number;
  alternatives_count?: number;
  criticality_override?: boolean;
}

export interface ScenarioDoc {
  actors: string[];
  dependums: Record<string, DependumDoc[]>;
  links: LinkDoc[];
  value: {
    form: "power" | "logarithmic";
    synergy?: "geometric_mean" | "minimum" | "additive";
    gamma?: number;
    beta?: number;
    theta?: number;
  };
  bargaining: Record<string, number>;
  endowments: Record<string, number>;
  action_bounds?: Record<string, [number, number]>;
  cost_model?: { kind: "linear" | "quadratic"; c?: number };
  appropriation_mode?: "separable" | "pooled";
  matrix_override?: { order: string[]; entries: number[][] };
}

export interface ViolationDoc {
  code: string;
  message: string;
  where?: string;
}

export interface MatrixDoc {
  order: string[];
  entries: number[][];
  from_override: boolean;
  asymmetry: { pair: [string, string]; d_ij: number; d_ji: number; imbalance: number }[];
}

export interface EquilibriumDoc {
  mode: string;
  actions: Record<string, number>;
  payoffs: Record<string, number>;
  utilities: Record<string, number>;
  converged: boolean;
  iterations: number;
  residual: number;
  multi_start_agreement: boolean;
  boundary_flags: Record<string, "interior" | "at_lower" | "at_upper">;
}

export interface EditDoc {
  criticality_overrides?: {
    depender: string;
    dependee: string;
    dependum_id: string;
    criticality: number;
  }[];
  weight_overrides?: { actor: string; dependum_id: string; importance_weight: number }[];
  bargaining_overrides?: Record<string, number>;
  gamma_override?: number;
}

export interface ComparisonDoc {
  base: EquilibriumDoc;
  edited: EquilibriumDoc;
  action_deltas: Record<string, number>;
  payoff_deltas: Record<string, number>;
  matrix: {
    order: string[];
    base_entries: number[][];
    edited_entries: number[][];
    delta_entries: number[][];
  };
  shares: { base: Record<string, number>; edited: Record<string, number> };
}

export interface ScoreDoc {
  metrics: Record<string, number | null>;
  points: Record<string, number>;
  total: number;
  max_total: number;
  flags: string[];
  notes: string[];
}

export interface JobDoc {
  job_id: string;
  kind: string;
  state: "queued" | "running" | "done" | "failed";
  progress: { completed: number; total: number };
  result_id: string | null;
  error: string | null;
}

export interface SweepRowDoc {
  params: Record<string, number | string>;
  actions: Record<string, number>;
  payoffs: Record<string, number>;
  total_value: number;
  converged: boolean;
}

export interface SweepResultDoc {
  order: string[];
  axis_names: string[];
  rows: SweepRowDoc[];
  csv: string;
}

export interface HealthDoc {
  status: string;
  version: string;
}
