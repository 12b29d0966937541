/** Workbench state: one active scenario document plus the latest service
 * responses per pane. Edits are staged locally and applied atomically as new
 * content-addressed scenarios, so `history` is an immutable trail of ids the
 * analyst can walk back through. */

import type { ApiResult } from "./api";
import type {
  ComparisonDoc,
  EditDoc,
  EquilibriumDoc,
  JobDoc,
  MatrixDoc,
  ScenarioDoc,
  SweepResultDoc,
  ViolationDoc,
} from "./types";

export interface SweepPaneState {
  jobId: string | null;
  job: JobDoc | null;
  result: ApiResult<SweepResultDoc> | null;
}

export interface WorkbenchState {
  scenario: ScenarioDoc | null;
  scenarioId: string | null;
  history: string[];
  violations: ViolationDoc[];
  offline: boolean;
  pendingSaves: ScenarioDoc[];
  matrix: ApiResult<MatrixDoc> | null;
  equilibrium: ApiResult<EquilibriumDoc> | null;
  draftEdit: EditDoc;
  comparison: ApiResult<ComparisonDoc> | null;
  sweep: SweepPaneState;
}

export function initialState(): WorkbenchState {
  return {
    scenario: null,
    scenarioId: null,
    history: [],
    violations: [],
    offline: false,
    pendingSaves: [],
    matrix: null,
    equilibrium: null,
    draftEdit: {},
    comparison: null,
    sweep: { jobId: null, job: null, result: null },
  };
}

export function loadScenario(state: WorkbenchState, doc: ScenarioDoc): WorkbenchState {
  return {
    ...state,
    scenario: structuredClone(doc),
    scenarioId: null,
    violations: [],
    matrix: null,
    equilibrium: null,
    comparison: null,
    draftEdit: {},
  };
}

export function recordSaved(state: WorkbenchState, id: string): WorkbenchState {
  const history = state.history[state.history.length - 1] === id ? state.history : [...state.history, id];
  return { ...state, scenarioId: id, history, violations: [], offline: false };
}

/** Step back to the previous content-addressed scenario id, if any. */
export function previousScenarioId(state: WorkbenchState): string | null {
  const index = state.scenarioId === null ? -1 : state.history.lastIndexOf(state.scenarioId);
  if (index > 0) return state.history[index - 1] ?? null;
  if (index === -1 && state.history.length > 0) return state.history[state.history.length - 1] ?? null;
  return null;
}

export function setDraftEdit(state: WorkbenchState, edit: EditDoc): WorkbenchState {
  return { ...state, draftEdit: structuredClone(edit) };
}
