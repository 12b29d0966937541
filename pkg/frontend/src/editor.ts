/** Scenario editor: a dependency table with weight and criticality controls.
 *
 * Edits mutate a working copy of the document only; saving posts the whole
 * document to the service, which is the sole validator of record. A few
 * obvious mistakes (negative weight, out-of-range criticality) are caught
 * inline before any request goes out. When the service is unreachable the
 * editor keeps working: saves queue locally behind an offline banner.
 */

import type { ServiceClient } from "./api";
import { ApiError } from "./api";
import { recordSaved, type WorkbenchState } from "./state";
import type { ScenarioDoc, ViolationDoc } from "./types";

export interface DependencyRow {
  depender: string;
  dependee: string;
  dependumId: string;
  kind: string;
  weight: number;
  criticality: number;
}

export function dependencyTable(scenario: ScenarioDoc): DependencyRow[] {
  const rows: DependencyRow[] = [];
  for (const link of scenario.links) {
    const dependum = (scenario.dependums[link.depender] ?? []).find((d) => d.id === link.dependum_id);
    rows.push({
      depender: link.depender,
      dependee: link.dependee,
      dependumId: link.dependum_id,
      kind: dependum?.kind ?? "goal",
      weight: dependum?.importance_weight ?? 0,
      criticality: link.criticality,
    });
  }
  return rows;
}

export function setCriticality(
  scenario: ScenarioDoc,
  depender: string,
  dependee: string,
  dependumId: string,
  criticality: number,
): ScenarioDoc {
  const next = structuredClone(scenario);
  for (const link of next.links) {
    if (link.depender === depender && link.dependee === dependee && link.dependum_id === dependumId) {
      link.criticality = criticality;
      if (link.alternatives_count !== undefined) link.criticality_override = true;
    }
  }
  return next;
}

export function setWeight(scenario: ScenarioDoc, actor: string, dependumId: string, weight: number): ScenarioDoc {
  const next = structuredClone(scenario);
  for (const dependum of next.dependums[actor] ?? []) {
    if (dependum.id === dependumId) dependum.importance_weight = weight;
  }
  return next;
}

/** Inline pre-flight checks; anything flagged here never reaches the wire. */
export function localViolations(scenario: ScenarioDoc): ViolationDoc[] {
  const out: ViolationDoc[] = [];
  for (const [actor, dependums] of Object.entries(scenario.dependums)) {
    for (const dependum of dependums) {
      if (dependum.importance_weight < 0) {
        out.push({
          code: "negative_importance_weight",
          message: `importance weight ${dependum.importance_weight} < 0`,
          where: `${actor}/${dependum.id}`,
        });
      }
    }
  }
  for (const link of scenario.links) {
    if (link.criticality < 0 || link.criticality > 1) {
      out.push({
        code: "criticality_out_of_range",
        message: `criticality ${link.criticality} outside [0, 1]`,
        where: `${link.depender}->${link.dependee}/${link.dependum_id}`,
      });
    }
  }
  for (const [actor, power] of Object.entries(scenario.bargaining)) {
    if (power <= 0) {
      out.push({
        code: "nonpositive_bargaining_power",
        message: `bargaining power for ${actor} must be > 0`,
        where: actor,
      });
    }
  }
  return out;
}

/** Persist the working document as a new content-addressed scenario.
 * Local violations short-circuit (no request); service 422s land in
 * state.violations; network failures flip the offline banner and queue the
 * document for a later flush. */
export async function saveScenario(state: WorkbenchState, client: ServiceClient): Promise<WorkbenchState> {
  if (!state.scenario) return state;
  const inline = localViolations(state.scenario);
  if (inline.length > 0) {
    return { ...state, violations: inline };
  }
  try {
    const { data } = await client.createScenario(state.scenario);
    return recordSaved(state, data.id);
  } catch (error) {
    if (error instanceof ApiError) {
      return { ...state, violations: error.details, offline: false };
    }
    return { ...state, offline: true, pendingSaves: [...state.pendingSaves, structuredClone(state.scenario)] };
  }
}

/** Retry queued saves once the service is reachable again. */
export async function flushPending(state: WorkbenchState, client: ServiceClient): Promise<WorkbenchState> {
  let current = state;
  for (const doc of state.pendingSaves) {
    try {
      const { data } = await client.createScenario(doc);
      current = { ...recordSaved(current, data.id), pendingSaves: current.pendingSaves.slice(1) };
    } catch (error) {
      if (error instanceof ApiError) {
        current = { ...current, violations: error.details, pendingSaves: current.pendingSaves.slice(1) };
        continue;
      }
      return { ...current, offline: true };
    }
  }
  return { ...current, offline: false };
}
