/** Equilibrium pane: actions, payoffs, utilities per actor with a convergence
 * badge. Every cell is the verbatim response token. */

import type { ApiResult } from "./api";
import type { EquilibriumDoc } from "./types";

export interface EquilibriumRowView {
  actor: string;
  action: string;
  payoff: string;
  utility: string;
  boundary: string;
}

export interface EquilibriumView {
  mode: string;
  rows: EquilibriumRowView[];
  badge: { kind: "ok" | "warning"; label: string };
  iterations: string;
  residual: string;
  multiStartAgreement: boolean;
}

export function equilibriumView(result: ApiResult<EquilibriumDoc>): EquilibriumView {
  const { data, raw } = result;
  const actors = Object.keys(data.actions).sort();
  const rows = actors.map((actor) => ({
    actor,
    action: raw.token(["actions", actor]) ?? String(data.actions[actor]),
    payoff: raw.token(["payoffs", actor]) ?? String(data.payoffs[actor]),
    utility: raw.token(["utilities", actor]) ?? String(data.utilities[actor]),
    boundary: data.boundary_flags[actor] ?? "interior",
  }));
  return {
    mode: data.mode,
    rows,
    badge: data.converged
      ? { kind: "ok", label: "converged" }
      : { kind: "warning", label: "not converged" },
    iterations: raw.token(["iterations"]) ?? String(data.iterations),
    residual: raw.token(["residual"]) ?? String(data.residual),
    multiStartAgreement: data.multi_start_agreement,
  };
}
