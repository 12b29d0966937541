/** Browser shell: wires the pane view-models to a minimal DOM. All numbers on
 * screen come straight from view-model strings (verbatim service tokens). */

import { LatestRequest, ServiceClient } from "./api";
import { comparisonView } from "./comparison";
import { dependencyTable, localViolations, saveScenario, setCriticality, setWeight } from "./editor";
import { equilibriumView } from "./equilibrium";
import { initialState, loadScenario, setDraftEdit, type WorkbenchState } from "./state";
import { lineSeries, progressView } from "./sweep";
import { slcdPanelEdit, slcdTemplate } from "./templates";

const client = new ServiceClient(localStorage.getItem("coopequil.baseUrl") ?? "http://127.0.0.1:8000");
let state: WorkbenchState = initialState();

const matrixRequest = new LatestRequest();
const equilibriumRequest = new LatestRequest();
const comparisonRequest = new LatestRequest();

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
}

function esc(text: string): string {
  return text.replace(/[&<>"]/g, (c) => ({ "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;" })[c] ?? c);
}

function render(): void {
  $("offline-banner").style.display = state.offline ? "block" : "none";
  $("violations").innerHTML = state.violations
    .map((v) => `<li class="violation"><code>${esc(v.code)}</code> ${esc(v.message)}</li>`)
    .join("");
  $("history").textContent = state.history.length
    ? `history: ${state.history.map((h) => h.slice(0, 8)).join(" → ")}`
    : "";

  renderEditor();
  renderMatrix();
  renderEquilibrium();
  renderComparison();
  renderSweep();
}

function renderEditor(): void {
  const host = $("editor");
  if (!state.scenario) {
    host.innerHTML = "<p>No scenario loaded.</p>";
    return;
  }
  const rows = dependencyTable(state.scenario)
    .map(
      (r, i) => `
      <tr>
        <td>${esc(r.depender)}</td><td>${esc(r.dependee)}</td>
        <td>${esc(r.dependumId)} <small>(${esc(r.kind)})</small></td>
        <td><input data-kind="weight" data-row="${i}" type="number" step="0.05" value="${r.weight}"></td>
        <td><input data-kind="crit" data-row="${i}" type="range" min="0" max="1" step="0.01" value="${r.criticality}">
            <span>${r.criticality}</span></td>
      </tr>`,
    )
    .join("");
  host.innerHTML = `
    <table>
      <thead><tr><th>depender</th><th>dependee</th><th>dependum</th><th>weight</th><th>criticality</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>`;
  host.querySelectorAll("input").forEach((input) => {
    input.addEventListener("change", () => {
      if (!state.scenario) return;
      const table = dependencyTable(state.scenario);
      const row = table[Number(input.dataset.row)];
      if (!row) return;
      const value = Number(input.value);
      state = {
        ...state,
        scenario:
          input.dataset.kind === "weight"
            ? setWeight(state.scenario, row.depender, row.dependumId, value)
            : setCriticality(state.scenario, row.depender, row.dependee, row.dependumId, value),
      };
      state = { ...state, violations: localViolations(state.scenario!) };
      render();
    });
  });
}

function renderMatrix(): void {
  const host = $("matrix");
  if (!state.matrix) {
    host.innerHTML = "<p>—</p>";
    return;
  }
  const { data, raw } = state.matrix;
  const header = data.order.map((a) => `<th>${esc(a)}</th>`).join("");
  const body = data.order
    .map(
      (actor, i) =>
        `<tr><th>${esc(actor)}</th>${data.order
          .map((_, j) => `<td>${esc(raw.token(["entries", i, j]) ?? "")}</td>`)
          .join("")}</tr>`,
    )
    .join("");
  host.innerHTML = `<table><thead><tr><th></th>${header}</tr></thead><tbody>${body}</tbody></table>`;
}

function renderEquilibrium(): void {
  const host = $("equilibrium");
  if (!state.equilibrium) {
    host.innerHTML = "<p>—</p>";
    return;
  }
  const view = equilibriumView(state.equilibrium);
  const rows = view.rows
    .map(
      (r) => `
      <tr><td>${esc(r.actor)}</td><td>${esc(r.action)}</td><td>${esc(r.payoff)}</td>
      <td>${esc(r.utility)}</td><td>${r.boundary === "interior" ? "" : `<em>${esc(r.boundary)}</em>`}</td></tr>`,
    )
    .join("");
  host.innerHTML = `
    <p><span class="badge badge-${view.badge.kind}">${esc(view.badge.label)}</span>
       iterations ${esc(view.iterations)}, residual ${esc(view.residual)}</p>
    <table><thead><tr><th>actor</th><th>action</th><th>payoff</th><th>utility</th><th></th></tr></thead>
    <tbody>${rows}</tbody></table>`;
}

function renderComparison(): void {
  const host = $("comparison");
  if (!state.comparison) {
    host.innerHTML = "<p>—</p>";
    return;
  }
  const view = comparisonView(state.comparison);
  const couplingRows = view.couplings
    .map(
      (r) =>
        `<tr><td>D[${esc(r.from)}→${esc(r.to)}]</td><td>${esc(r.base)}</td><td>${esc(r.edited)}</td><td>${esc(r.delta)}</td></tr>`,
    )
    .join("");
  const block = (title: string, rows: { actor: string; base: string; edited: string; delta?: string }[]) =>
    `<h4>${title}</h4><table><thead><tr><th></th><th>base</th><th>edited</th><th>delta</th></tr></thead><tbody>` +
    rows
      .map(
        (r) =>
          `<tr><td>${esc(r.actor)}</td><td>${esc(r.base)}</td><td>${esc(r.edited)}</td><td>${esc(r.delta ?? "")}</td></tr>`,
      )
      .join("") +
    "</tbody></table>";
  host.innerHTML =
    `<h4>coupling</h4><table><tbody>${couplingRows}</tbody></table>` +
    block("synergy shares", view.shares) +
    block("actions", view.actions) +
    block("payoffs", view.payoffs);
}

function renderSweep(): void {
  const host = $("sweep");
  const { job, result } = state.sweep;
  if (job && job.state !== "done") {
    const p = progressView(job);
    host.innerHTML = `<p>sweep ${esc(p.state)}: ${esc(p.completed)}/${esc(p.total)}</p>
      <progress max="1" value="${p.fraction}"></progress>`;
    return;
  }
  if (!result) {
    host.innerHTML = "<p>—</p>";
    return;
  }
  const axis = result.data.axis_names[0] ?? "";
  const points = lineSeries(result, axis, "total_value");
  host.innerHTML =
    `<table><thead><tr><th>${esc(axis)}</th><th>total value</th></tr></thead><tbody>` +
    points.map((p) => `<tr><td>${esc(p.x)}</td><td>${esc(p.y)}</td></tr>`).join("") +
    "</tbody></table>";
}

async function ensureSaved(): Promise<string | null> {
  state = await saveScenario(state, client);
  render();
  return state.scenarioId;
}

function wireActions(): void {
  $("load-template").addEventListener("click", () => {
    state = loadScenario(state, slcdTemplate);
    state = setDraftEdit(state, slcdPanelEdit);
    render();
  });
  $("save").addEventListener("click", () => void ensureSaved());
  $("refresh-matrix").addEventListener("click", async () => {
    const id = await ensureSaved();
    if (!id) return;
    state = { ...state, matrix: await client.matrix(id, matrixRequest.begin()) };
    render();
  });
  $("solve").addEventListener("click", async () => {
    const id = await ensureSaved();
    if (!id) return;
    state = { ...state, equilibrium: await client.equilibrium(id, {}, equilibriumRequest.begin()) };
    render();
  });
  $("compare").addEventListener("click", async () => {
    const id = await ensureSaved();
    if (!id) return;
    state = { ...state, comparison: await client.counterfactual(id, state.draftEdit, comparisonRequest.begin()) };
    render();
  });
  $("run-sweep").addEventListener("click", async () => {
    const id = await ensureSaved();
    if (!id) return;
    const { data } = await client.startSweep(id, [
      { name: "gamma", values: [0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5] },
    ]);
    state = { ...state, sweep: { jobId: data.job_id, job: null, result: null } };
    const job = await client.pollJob(data.job_id, {
      onProgress: (j) => {
        state = { ...state, sweep: { ...state.sweep, job: j } };
        render();
      },
    });
    if (job.result_id) {
      state = { ...state, sweep: { jobId: job.job_id, job, result: await client.getResult(job.result_id) } };
    }
    render();
  });
}

wireActions();
render();
