/** Bundled scenario templates the analyst can load without typing a document
 * by hand. Mirrors the engine's shipped fixtures. */

import type { ScenarioDoc } from "./types";

export const slcdTemplate: ScenarioDoc = {
  actors: ["Sony", "Samsung"],
  dependums: {
    Sony: [
      { id: "lcd_manufacturing", kind: "resource", importance_weight: 0.5 },
      { id: "gen7_expertise", kind: "resource", importance_weight: 0.4 },
      { id: "other_goals", kind: "goal", importance_weight: 0.1 },
    ],
    Samsung: [
      { id: "capital_investment", kind: "resource", importance_weight: 0.4 },
      { id: "guaranteed_offtake", kind: "goal", importance_weight: 0.35 },
      { id: "brand_association", kind: "softgoal", importance_weight: 0.15 },
      { id: "other_goals", kind: "goal", importance_weight: 0.1 },
    ],
  },
  links: [
    { depender: "Sony", dependee: "Samsung", dependum_id: "lcd_manufacturing", criticality: 1.0 },
    { depender: "Sony", dependee: "Samsung", dependum_id: "gen7_expertise", criticality: 0.9 },
    { depender: "Samsung", dependee: "Sony", dependum_id: "capital_investment", criticality: 0.8 },
    { depender: "Samsung", dependee: "Sony", dependum_id: "guaranteed_offtake", criticality: 0.7 },
    { depender: "Samsung", dependee: "Sony", dependum_id: "brand_association", criticality: 0.5 },
  ],
  value: { form: "logarithmic", theta: 20.0, synergy: "geometric_mean", gamma: 0.65 },
  bargaining: { Sony: 0.9, Samsung: 1.1 },
  endowments: { Sony: 100.0, Samsung: 100.0 },
  action_bounds: { Sony: [0.0, 200.0], Samsung: [0.0, 200.0] },
  cost_model: { kind: "linear" },
  appropriation_mode: "separable",
};

/** The venture-diversification what-if: halve the sole-provider criticality on
 * the manufacturing dependum and strengthen the depender's bargaining power. */
export const slcdPanelEdit = {
  criticality_overrides: [
    { depender: "Sony", dependee: "Samsung", dependum_id: "lcd_manufacturing", criticality: 0.5 },
  ],
  bargaining_overrides: { Sony: 1.15, Samsung: 1.1 },
};
