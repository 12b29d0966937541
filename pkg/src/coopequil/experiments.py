"""Analyst studies over the solver: parameter sweeps, the two stock experiment
designs (coupling strength and synergy weight on a symmetric pair), the
60-point validation scorer, and counterfactual what-if comparisons.

Grid points are solved in deterministic lexicographic grid order and a sweep
never aborts on an individual non-convergence; identical specs yield
byte-identical CSV output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import product
from typing import Callable

from .appropriation import shares_from_power
from .equilibrium import EquilibriumResult, SolveSettings, solve
from .interdependence import effective_matrix, scale_matrix, zero_matrix
from .model import (
    BargainingSpec,
    CostModel,
    DependencyNetwork,
    InterdependenceMatrix,
    Scenario,
    ScenarioFormatError,
    ValueSpec,
    Violation,
    canonical_actor_order,
)
from .valuation import total_value

SWEEP_PARAMETERS = ("gamma", "beta", "theta", "endowment", "D_scale", "cost", "mode")
DEFAULT_SWEEP_CAP = 100000


class SweepSizeError(ValueError):
    """The grid's cross-product exceeds the configured cap; raised before any solve."""


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    axes: tuple[SweepAxis, ...]
    settings: SolveSettings = SolveSettings()
    cap: int = DEFAULT_SWEEP_CAP


@dataclass(frozen=True)
class SweepRow:
    params: dict[str, object]
    actions: dict[str, float]
    payoffs: dict[str, float]
    total_value: float
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    order: tuple[str, ...]
    axis_names: tuple[str, ...]
    rows: tuple[SweepRow, ...]


def apply_parameter(s: Scenario, name: str, value) -> Scenario:
    """Reconfigure one swept parameter on a scenario."""
    if name == "gamma":
        return s.replace(value=replace(s.value, gamma=float(value)))
    if name == "beta":
        if s.value.form != "power":
            raise ValueError("beta axis requires the power value form")
        return s.replace(value=replace(s.value, beta=float(value)))
    if name == "theta":
        if s.value.form != "logarithmic":
            raise ValueError("theta axis requires the logarithmic value form")
        return s.replace(value=replace(s.value, theta=float(value)))
    if name == "endowment":
        return s.replace(endowments={a: float(value) for a in s.endowments})
    if name == "D_scale":
        return s.replace(matrix_override=scale_matrix(effective_matrix(s), float(value)))
    if name == "cost":
        return s.replace(cost_model=_parse_cost(value))
    if name == "mode":
        if value not in ("separable", "pooled"):
            raise ValueError(f"mode axis value must be separable or pooled, got {value!r}")
        return s.replace(appropriation_mode=str(value))
    raise ValueError(f"unknown sweep parameter {name!r}; supported: {SWEEP_PARAMETERS}")


def _parse_cost(value) -> CostModel:
    if isinstance(value, CostModel):
        return value
    text = str(value)
    if text == "linear":
        return CostModel("linear")
    if text.startswith("quadratic:"):
        return CostModel("quadratic", c=float(text.split(":", 1)[1]))
    raise ValueError(f"cost axis value must be 'linear' or 'quadratic:<c>', got {value!r}")


def grid_size(spec: SweepSpec) -> int:
    n = 1
    for axis in spec.axes:
        n *= len(axis.values)
    return n


def run_sweep(spec: SweepSpec, progress: Callable[[int, int], None] | None = None) -> SweepResult:
    """Solve every grid point of the cross product, axes in declared order.

    Individual non-convergence is recorded in the row, never raised. The cap
    is enforced before the first solve.
    """
    for axis in spec.axes:
        if not axis.values:
            raise ValueError(f"axis {axis.name!r} has no values")
        if axis.name not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {axis.name!r}; supported: {SWEEP_PARAMETERS}")
    total = grid_size(spec)
    if total > spec.cap:
        raise SweepSizeError(f"grid has {total} points, cap is {spec.cap}")

    order = canonical_actor_order(spec.base)
    rows = []
    for combo in product(*(axis.values for axis in spec.axes)):
        scenario = spec.base
        params = {}
        for axis, value in zip(spec.axes, combo):
            scenario = apply_parameter(scenario, axis.name, value)
            params[axis.name] = value
        result = solve(scenario, spec.settings)
        vec = [result.actions[a] for a in order]
        rows.append(
            SweepRow(
                params=params,
                actions=dict(result.actions),
                payoffs=dict(result.payoffs),
                total_value=total_value(scenario.value, vec).total,
                converged=result.converged,
            )
        )
        if progress is not None:
            progress(len(rows), total)
    return SweepResult(order=order, axis_names=tuple(a.name for a in spec.axes), rows=tuple(rows))


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, int):
        return str(value)
    return str(value)


def sweep_to_csv(result: SweepResult) -> str:
    """Parameter columns in axis order, then action_<actor> in canonical order,
    total_value, converged; 12 significant digits; LF line endings."""
    header = list(result.axis_names) + [f"action_{a}" for a in result.order] + ["total_value", "converged"]
    lines = [",".join(header)]
    for row in result.rows:
        cells = [_fmt(row.params[name]) for name in result.axis_names]
        cells += [_fmt(row.actions[a]) for a in result.order]
        cells.append(_fmt(row.total_value))
        cells.append(_fmt(row.converged))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Stock experiment designs: symmetric two-actor template
# ---------------------------------------------------------------------------


def symmetric_template(
    form: str,
    *,
    gamma: float,
    d: float,
    mode: str = "separable",
    beta: float = 0.75,
    theta: float = 20.0,
    endowment: float = 100.0,
) -> Scenario:
    """Two identical actors with a symmetric coupling matrix; the setting used
    by the robustness experiments. Form defaults are the validated values
    (power 0.75, logarithmic 20)."""
    actors = ("a1", "a2")
    value = ValueSpec(form=form, gamma=gamma, beta=beta if form == "power" else None, theta=theta if form == "logarithmic" else None)
    return Scenario(
        network=DependencyNetwork(actors=actors, dependums={}, links=()),
        value=value,
        bargaining=BargainingSpec({a: 1.0 for a in actors}),
        endowments={a: endowment for a in actors},
        action_bounds={a: (0.0, endowment) for a in actors},
        cost_model=CostModel("linear"),
        appropriation_mode=mode,
        matrix_override=InterdependenceMatrix(order=actors, entries=((0.0, d), (d, 0.0))),
    )


def experiment_interdependence(
    form: str,
    d_values: tuple[float, ...] = (0.0, 0.3, 0.6, 0.9),
    mode: str = "separable",
    settings: SolveSettings = SolveSettings(),
) -> tuple[SweepResult, dict]:
    """Coupling-strength study: gamma = 0 isolates the coupling channel on a
    symmetric pair. Under the separable payoff this provably changes nothing
    (the coupling enters the first-order condition only through the synergy
    share); the pooled mode is where the direction reported for this design
    is reproducible. Summary gives percent changes from the first to the last
    coupling value; reference magnitudes are not asserted anywhere."""
    base = symmetric_template(form, gamma=0.0, d=1.0, mode=mode)
    spec = SweepSpec(base=base, axes=(SweepAxis("D_scale", tuple(d_values)),), settings=settings)
    result = run_sweep(spec)
    return result, _summary(result, "D_scale")


def experiment_complementarity(
    form: str,
    gamma_values: tuple[float, ...] = (0.0, 0.5, 1.0, 1.5, 2.0),
    d: float = 0.3,
    mode: str = "separable",
    settings: SolveSettings = SolveSettings(),
) -> tuple[SweepResult, dict]:
    """Synergy-weight study at moderate symmetric coupling."""
    base = symmetric_template(form, gamma=0.0, d=d, mode=mode)
    spec = SweepSpec(base=base, axes=(SweepAxis("gamma", tuple(gamma_values)),), settings=settings)
    result = run_sweep(spec)
    return result, _summary(result, "gamma")


def _summary(result: SweepResult, axis: str) -> dict:
    first, last = result.rows[0], result.rows[-1]

    def mean_action(row: SweepRow) -> float:
        return math.fsum(row.actions.values()) / len(row.actions)

    a0, a1 = mean_action(first), mean_action(last)
    v0, v1 = first.total_value, last.total_value
    return {
        "axis": axis,
        "from": first.params[axis],
        "to": last.params[axis],
        "action_change_pct": 0.0 if a0 == 0 else (a1 - a0) / a0 * 100.0,
        "value_change_pct": 0.0 if v0 == 0 else (v1 - v0) / v0 * 100.0,
    }


# ---------------------------------------------------------------------------
# Validation scoring
# ---------------------------------------------------------------------------

RUBRIC_FAMILIES = ("baseline", "coop_increase", "counterfactual_reduction")

METRIC_DEFINITIONS = (
    "baseline_action = mean equilibrium action with the coupling matrix forced to zero",
    "coop_increase_pct = percent action increase from the zero-coupling baseline to the full-matrix equilibrium",
    "counterfactual_reduction_pct = percent drop in mean equilibrium action from the full-matrix equilibrium to the edited scenario",
)


@dataclass(frozen=True)
class ValidationRubric:
    baseline_range: tuple[float, float] = (20.0, 60.0)
    coop_increase_range: tuple[float, float] = (20.0, 100.0)
    counterfactual_reduction_range: tuple[float, float] = (5.0, 25.0)
    points_per_family: float = 20.0
    grading: str = "step"
    decay_width: float | None = None

    def range_for(self, family: str) -> tuple[float, float]:
        return {
            "baseline": self.baseline_range,
            "coop_increase": self.coop_increase_range,
            "counterfactual_reduction": self.counterfactual_reduction_range,
        }[family]

    @property
    def max_total(self) -> float:
        return self.points_per_family * len(RUBRIC_FAMILIES)


@dataclass(frozen=True)
class ValidationScore:
    metrics: dict[str, float | None]
    points: dict[str, float]
    total: float
    max_total: float
    flags: tuple[str, ...]
    notes: tuple[str, ...] = METRIC_DEFINITIONS


def validate_rubric(r: ValidationRubric) -> list[Violation]:
    out = []
    if r.grading not in ("step", "linear_decay"):
        out.append(Violation("unknown_grading", f"grading {r.grading!r} must be step or linear_decay"))
    if r.grading == "linear_decay" and (r.decay_width is None or not r.decay_width > 0):
        out.append(Violation("invalid_decay_width", f"linear_decay requires decay_width > 0, got {r.decay_width}"))
    if not r.points_per_family > 0:
        out.append(Violation("invalid_points", f"points_per_family must be > 0, got {r.points_per_family}"))
    elif r.max_total != 60.0:
        out.append(Violation("rubric_total_mismatch", f"rubric totals {r.max_total}, the scale is fixed at 60"))
    for family in RUBRIC_FAMILIES:
        lo, hi = r.range_for(family)
        if not lo < hi:
            out.append(Violation("invalid_rubric_range", f"{family} range [{lo}, {hi}] must have lo < hi"))
    return out


_RUBRIC_KEYS = {
    "baseline_range",
    "coop_increase_range",
    "counterfactual_reduction_range",
    "points_per_family",
    "grading",
    "decay_width",
}


def rubric_from_dict(doc: dict) -> ValidationRubric:
    unknown = sorted(set(doc) - _RUBRIC_KEYS)
    if unknown:
        raise ScenarioFormatError(f"unknown key(s) {unknown} in rubric")
    kwargs = {}
    for key in ("baseline_range", "coop_increase_range", "counterfactual_reduction_range"):
        if key in doc:
            pair = doc[key]
            if not isinstance(pair, list) or len(pair) != 2:
                raise ScenarioFormatError(f"rubric {key} must be a [lo, hi] pair")
            kwargs[key] = (float(pair[0]), float(pair[1]))
    if "points_per_family" in doc:
        kwargs["points_per_family"] = float(doc["points_per_family"])
    if "grading" in doc:
        kwargs["grading"] = str(doc["grading"])
    if doc.get("decay_width") is not None:
        kwargs["decay_width"] = float(doc["decay_width"])
    return ValidationRubric(**kwargs)


def grade_metric(rubric: ValidationRubric, family: str, metric: float | None) -> float:
    """Full family points inside the range; outside, step grading gives 0 and
    linear_decay fades linearly to 0 over decay_width."""
    if metric is None:
        return 0.0
    lo, hi = rubric.range_for(family)
    if lo <= metric <= hi:
        return rubric.points_per_family
    if rubric.grading == "linear_decay":
        dist = lo - metric if metric < lo else metric - hi
        return rubric.points_per_family * max(0.0, 1.0 - dist / rubric.decay_width)
    return 0.0


def score_scenario(
    s: Scenario,
    rubric: ValidationRubric | None = None,
    settings: SolveSettings = SolveSettings(),
    edit: "CounterfactualEdit | None" = None,
) -> ValidationScore:
    """Grade the scenario's three behavior metrics against the rubric.

    Metric definitions are the engine's decided operationalizations (see
    METRIC_DEFINITIONS, echoed in every score's notes); reference score totals
    from outside sources are context, never assertions.
    """
    rubric = rubric or ValidationRubric()
    order = canonical_actor_order(s)
    flags = []

    coop = solve(s, settings)
    baseline = solve(s.replace(matrix_override=zero_matrix(order)), settings)
    mean_coop = math.fsum(coop.actions.values()) / len(order)
    mean_base = math.fsum(baseline.actions.values()) / len(order)

    metrics: dict[str, float | None] = {
        "baseline_action": mean_base,
        "coop_increase_pct": 0.0 if mean_base == 0 else (mean_coop - mean_base) / mean_base * 100.0,
    }
    if not coop.converged or not baseline.converged:
        flags.append("non_convergent_solve")

    if edit is None or edit.is_empty():
        metrics["counterfactual_reduction_pct"] = None
        flags.append("missing_counterfactual_edit")
    else:
        edited = solve(apply_edit(s, edit), settings)
        mean_edited = math.fsum(edited.actions.values()) / len(order)
        metrics["counterfactual_reduction_pct"] = (
            0.0 if mean_coop == 0 else (mean_coop - mean_edited) / mean_coop * 100.0
        )
        if not edited.converged:
            flags.append("non_convergent_solve")

    points = {
        "baseline": grade_metric(rubric, "baseline", metrics["baseline_action"]),
        "coop_increase": grade_metric(rubric, "coop_increase", metrics["coop_increase_pct"]),
        "counterfactual_reduction": grade_metric(
            rubric, "counterfactual_reduction", metrics["counterfactual_reduction_pct"]
        ),
    }
    return ValidationScore(
        metrics=metrics,
        points=points,
        total=math.fsum(points.values()),
        max_total=rubric.max_total,
        flags=tuple(dict.fromkeys(flags)),
    )


# ---------------------------------------------------------------------------
# Counterfactual edits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalityOverride:
    depender: str
    dependee: str
    dependum_id: str
    criticality: float


@dataclass(frozen=True)
class WeightOverride:
    actor: str
    dependum_id: str
    importance_weight: float


@dataclass(frozen=True)
class CounterfactualEdit:
    criticality_overrides: tuple[CriticalityOverride, ...] = ()
    weight_overrides: tuple[WeightOverride, ...] = ()
    bargaining_overrides: dict[str, float] | None = None
    gamma_override: float | None = None

    def is_empty(self) -> bool:
        return (
            not self.criticality_overrides
            and not self.weight_overrides
            and self.bargaining_overrides is None
            and self.gamma_override is None
        )

    def touches_network(self) -> bool:
        return bool(self.criticality_overrides or self.weight_overrides)


_EDIT_KEYS = {"criticality_overrides", "weight_overrides", "bargaining_overrides", "gamma_override"}
_CRIT_OVERRIDE_KEYS = {"depender", "dependee", "dependum_id", "criticality"}
_WEIGHT_OVERRIDE_KEYS = {"actor", "dependum_id", "importance_weight"}


def edit_from_dict(doc: dict) -> CounterfactualEdit:
    unknown = sorted(set(doc) - _EDIT_KEYS)
    if unknown:
        raise ScenarioFormatError(f"unknown key(s) {unknown} in counterfactual edit")
    crits = []
    for i, c in enumerate(doc.get("criticality_overrides", [])):
        bad = sorted(set(c) - _CRIT_OVERRIDE_KEYS)
        if bad:
            raise ScenarioFormatError(f"unknown key(s) {bad} in criticality_overrides[{i}]")
        crits.append(
            CriticalityOverride(
                depender=str(c["depender"]),
                dependee=str(c["dependee"]),
                dependum_id=str(c["dependum_id"]),
                criticality=float(c["criticality"]),
            )
        )
    weights = []
    for i, w in enumerate(doc.get("weight_overrides", [])):
        bad = sorted(set(w) - _WEIGHT_OVERRIDE_KEYS)
        if bad:
            raise ScenarioFormatError(f"unknown key(s) {bad} in weight_overrides[{i}]")
        weights.append(
            WeightOverride(
                actor=str(w["actor"]),
                dependum_id=str(w["dependum_id"]),
                importance_weight=float(w["importance_weight"]),
            )
        )
    bargaining = doc.get("bargaining_overrides")
    gamma = doc.get("gamma_override")
    return CounterfactualEdit(
        criticality_overrides=tuple(crits),
        weight_overrides=tuple(weights),
        bargaining_overrides=None if bargaining is None else {a: float(p) for a, p in bargaining.items()},
        gamma_override=None if gamma is None else float(gamma),
    )


def validate_edit(s: Scenario, edit: CounterfactualEdit) -> list[Violation]:
    """Overridden values must satisfy their base-type ranges and reference
    existing links/dependums/actors."""
    out = []
    link_keys = {(l.depender, l.dependee, l.dependum_id) for l in s.network.links}
    for c in edit.criticality_overrides:
        key = (c.depender, c.dependee, c.dependum_id)
        if key not in link_keys:
            out.append(Violation("unknown_link", f"no link for {key}"))
        if not 0.0 <= c.criticality <= 1.0:
            out.append(Violation("criticality_out_of_range", f"criticality {c.criticality} outside [0, 1]"))
    for w in edit.weight_overrides:
        ids = {d.id for d in s.network.dependums_of(w.actor)}
        if w.dependum_id not in ids:
            out.append(Violation("unknown_dependum", f"{w.dependum_id!r} is not a dependum of {w.actor!r}"))
        if not w.importance_weight >= 0:
            out.append(Violation("negative_importance_weight", f"weight {w.importance_weight} < 0"))
    if edit.bargaining_overrides is not None:
        actors = set(s.network.actors)
        if set(edit.bargaining_overrides) != actors:
            out.append(Violation("bargaining_override_coverage", "bargaining_overrides must cover exactly the actor set"))
        for actor, p in edit.bargaining_overrides.items():
            if not p > 0:
                out.append(Violation("nonpositive_bargaining_power", f"bargaining power for {actor!r} is {p}"))
    if edit.gamma_override is not None and not edit.gamma_override >= 0:
        out.append(Violation("negative_gamma", f"gamma_override {edit.gamma_override} < 0"))
    return out


def apply_edit(s: Scenario, edit: CounterfactualEdit) -> Scenario:
    """Build the edited scenario. Edits touching the network invalidate any
    matrix override so the coupling matrix is recomputed from structure."""
    problems = validate_edit(s, edit)
    if problems:
        raise ValueError("invalid counterfactual edit: " + "; ".join(v.message for v in problems))

    scenario = s
    if edit.touches_network():
        crit_by_key = {(c.depender, c.dependee, c.dependum_id): c.criticality for c in edit.criticality_overrides}
        links = tuple(
            replace(
                l,
                criticality=crit_by_key.get((l.depender, l.dependee, l.dependum_id), l.criticality),
                criticality_override=True
                if (l.depender, l.dependee, l.dependum_id) in crit_by_key
                else l.criticality_override,
            )
            for l in s.network.links
        )
        weight_by_key = {(w.actor, w.dependum_id): w.importance_weight for w in edit.weight_overrides}
        dependums = {
            actor: tuple(
                replace(d, importance_weight=weight_by_key.get((actor, d.id), d.importance_weight)) for d in deps
            )
            for actor, deps in s.network.dependums.items()
        }
        scenario = scenario.replace(
            network=DependencyNetwork(actors=s.network.actors, dependums=dependums, links=links),
            matrix_override=None,
        )
    if edit.bargaining_overrides is not None:
        scenario = scenario.replace(bargaining=BargainingSpec(dict(edit.bargaining_overrides)))
    if edit.gamma_override is not None:
        scenario = scenario.replace(value=replace(scenario.value, gamma=edit.gamma_override))
    return scenario


@dataclass(frozen=True)
class CounterfactualReport:
    base: EquilibriumResult
    edited: EquilibriumResult
    action_deltas: dict[str, float]
    payoff_deltas: dict[str, float]
    base_matrix: InterdependenceMatrix
    edited_matrix: InterdependenceMatrix
    matrix_delta: tuple[tuple[float, ...], ...]
    base_shares: dict[str, float]
    edited_shares: dict[str, float]


def run_counterfactual(
    s: Scenario, edit: CounterfactualEdit, settings: SolveSettings = SolveSettings()
) -> CounterfactualReport:
    """Solve the scenario and its edited variant, recomputing the coupling
    matrix and shares from the edited inputs, and report per-actor deltas."""
    edited_scenario = apply_edit(s, edit)
    base_matrix = effective_matrix(s)
    edited_matrix = effective_matrix(edited_scenario)
    base = solve(s, settings)
    edited = solve(edited_scenario, settings)
    order = base_matrix.order
    return CounterfactualReport(
        base=base,
        edited=edited,
        action_deltas={a: edited.actions[a] - base.actions[a] for a in order},
        payoff_deltas={a: edited.payoffs[a] - base.payoffs[a] for a in order},
        base_matrix=base_matrix,
        edited_matrix=edited_matrix,
        matrix_delta=tuple(
            tuple(edited_matrix.entries[i][j] - base_matrix.entries[i][j] for j in range(len(order)))
            for i in range(len(order))
        ),
        base_shares=shares_from_power(s.bargaining),
        edited_shares=shares_from_power(edited_scenario.bargaining),
    )
