/** Counterfactual comparison pane: base vs edited coupling matrix, shares,
 * actions, and payoffs, side by side with deltas. All cells are verbatim
 * response tokens; the pane performs zero arithmetic. */

import type { ApiResult } from "./api";
import type { ComparisonDoc, EditDoc, ScenarioDoc } from "./types";

export interface CouplingRowView {
  from: string;
  to: string;
  base: string;
  edited: string;
  delta: string;
}

export interface ActorPairView {
  actor: string;
  base: string;
  edited: string;
  delta?: string;
}

export interface ComparisonView {
  couplings: CouplingRowView[];
  shares: ActorPairView[];
  actions: ActorPairView[];
  payoffs: ActorPairView[];
  baseConverged: boolean;
  editedConverged: boolean;
}

export function comparisonView(result: ApiResult<ComparisonDoc>): ComparisonView {
  const { data, raw } = result;
  const order = data.matrix.order;

  const couplings: CouplingRowView[] = [];
  order.forEach((from, i) => {
    order.forEach((to, j) => {
      if (i === j) return;
      couplings.push({
        from,
        to,
        base: raw.token(["matrix", "base_entries", i, j]) ?? String(data.matrix.base_entries[i]?.[j]),
        edited: raw.token(["matrix", "edited_entries", i, j]) ?? String(data.matrix.edited_entries[i]?.[j]),
        delta: raw.token(["matrix", "delta_entries", i, j]) ?? String(data.matrix.delta_entries[i]?.[j]),
      });
    });
  });

  const pair = (
    basePath: (string | number)[],
    editedPath: (string | number)[],
    deltaPath: (string | number)[] | null,
    actor: string,
  ): ActorPairView => ({
    actor,
    base: raw.token([...basePath, actor]) ?? String(raw.at([...basePath, actor])),
    edited: raw.token([...editedPath, actor]) ?? String(raw.at([...editedPath, actor])),
    ...(deltaPath ? { delta: raw.token([...deltaPath, actor]) ?? String(raw.at([...deltaPath, actor])) } : {}),
  });

  return {
    couplings,
    shares: order.map((actor) => pair(["shares", "base"], ["shares", "edited"], null, actor)),
    actions: order.map((actor) => pair(["base", "actions"], ["edited", "actions"], ["action_deltas"], actor)),
    payoffs: order.map((actor) => pair(["base", "payoffs"], ["edited", "payoffs"], ["payoff_deltas"], actor)),
    baseConverged: data.base.converged,
    editedConverged: data.edited.converged,
  };
}

/** Fold a staged edit into the scenario document itself. This is how a second
 * edit stacks: the comparison's edited side becomes the new base document,
 * saved as a fresh content-addressed scenario. Pure form-state work; the
 * resulting document is re-validated and re-solved by the service. */
export function applyEditToScenarioDoc(scenario: ScenarioDoc, edit: EditDoc): ScenarioDoc {
  const next = structuredClone(scenario);
  for (const override of edit.criticality_overrides ?? []) {
    for (const link of next.links) {
      if (
        link.depender === override.depender &&
        link.dependee === override.dependee &&
        link.dependum_id === override.dependum_id
      ) {
        link.criticality = override.criticality;
        if (link.alternatives_count !== undefined) link.criticality_override = true;
      }
    }
  }
  for (const override of edit.weight_overrides ?? []) {
    for (const dependum of next.dependums[override.actor] ?? []) {
      if (dependum.id === override.dependum_id) dependum.importance_weight = override.importance_weight;
    }
  }
  if (edit.criticality_overrides?.length || edit.weight_overrides?.length) {
    delete next.matrix_override; // structural edits invalidate a pinned matrix
  }
  if (edit.bargaining_overrides) {
    next.bargaining = { ...edit.bargaining_overrides };
  }
  if (edit.gamma_override !== undefined) {
    next.value = { ...next.value, gamma: edit.gamma_override };
  }
  return next;
}
