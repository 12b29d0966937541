"""Core domain model: actors, dependency networks, scenarios, and their invariants.

Every other module consumes the types defined here. All types are frozen
dataclasses (immutable values); validation never mutates and reports
violations as data rather than raising.
"""

from __future__ import annotations

from dataclasses import dataclass, field

DEPENDUM_KINDS = ("goal", "task", "resource", "softgoal")
VALUE_FORMS = ("power", "logarithmic")
SYNERGY_KINDS = ("geometric_mean", "minimum", "additive")
COST_KINDS = ("linear", "quadratic")
APPROPRIATION_MODES = ("separable", "pooled")

# Tolerance for the crit == 1/alternatives_count consistency rule.
_CRIT_ALT_TOL = 1e-9


class ScenarioFormatError(ValueError):
    """Raised when a scenario document is structurally malformed (strict mode)."""


class ScenarioValidationError(ValueError):
    """Raised when a parsed scenario violates model invariants."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        lines = "; ".join(f"{v.code}: {v.message}" for v in violations)
        super().__init__(f"scenario invalid: {lines}")


@dataclass(frozen=True)
class Violation:
    """One invariant violation: machine-readable code plus a human message."""

    code: str
    message: str
    where: str = ""


@dataclass(frozen=True)
class Dependum:
    id: str
    kind: str
    importance_weight: float


@dataclass(frozen=True)
class DependencyLink:
    depender: str
    dependee: str
    dependum_id: str
    criticality: float
    alternatives_count: int | None = None
    criticality_override: bool = False


@dataclass(frozen=True)
class DependencyNetwork:
    actors: tuple[str, ...]
    dependums: dict[str, tuple[Dependum, ...]]
    links: tuple[DependencyLink, ...]

    def dependums_of(self, actor: str) -> tuple[Dependum, ...]:
        return self.dependums.get(actor, ())


@dataclass(frozen=True)
class ValueSpec:
    """Value-creation specification: individual form, synergy kind, coupling weight."""

    form: str
    synergy: str = "geometric_mean"
    gamma: float = 0.0
    beta: float | None = None
    theta: float | None = None


@dataclass(frozen=True)
class BargainingSpec:
    power: dict[str, float]


@dataclass(frozen=True)
class CostModel:
    kind: str = "linear"
    c: float | None = None


@dataclass(frozen=True)
class InterdependenceMatrix:
    """Structural coupling coefficients: entries[i][j] = dependence of actor
    order[i] on actor order[j]. Zero diagonal, entries in [0, 1], generally
    asymmetric."""

    order: tuple[str, ...]
    entries: tuple[tuple[float, ...], ...]

    def coefficient(self, depender: str, dependee: str) -> float:
        i = self.order.index(depender)
        j = self.order.index(dependee)
        return self.entries[i][j]


@dataclass(frozen=True)
class Scenario:
    network: DependencyNetwork
    value: ValueSpec
    bargaining: BargainingSpec
    endowments: dict[str, float]
    action_bounds: dict[str, tuple[float, float]]
    cost_model: CostModel = field(default_factory=CostModel)
    appropriation_mode: str = "separable"
    matrix_override: InterdependenceMatrix | None = None

    def replace(self, **changes) -> "Scenario":
        from dataclasses import replace as _replace

        return _replace(self, **changes)


def canonical_actor_order(s: Scenario | DependencyNetwork) -> tuple[str, ...]:
    """Deterministic (lexicographic) actor ordering used for every matrix,
    vector, and output file."""
    network = s.network if isinstance(s, Scenario) else s
    return tuple(sorted(network.actors))


def default_action_bounds(endowments: dict[str, float]) -> dict[str, tuple[float, float]]:
    """Bounds default to [0, e_i]: investment cannot exceed endowment."""
    return {a: (0.0, e) for a, e in endowments.items()}


def validate_action_profile(s: Scenario, actions: dict[str, float]) -> list[Violation]:
    """Check an action profile against the scenario: full actor coverage and
    every action within its bounds."""
    out = list(_check_actor_map(actions, set(s.network.actors), "actions"))
    for actor, a in actions.items():
        bounds = s.action_bounds.get(actor)
        if bounds is None:
            continue
        lo, hi = bounds
        if not lo <= a <= hi:
            out.append(Violation("action_out_of_bounds", f"action {a} for {actor!r} outside [{lo}, {hi}]", actor))
    return out


def validate_scenario(s: Scenario) -> list[Violation]:
    """Check every model invariant; returns an empty list iff the scenario is
    valid. Pure and idempotent. Violations are data, not failures."""
    out: list[Violation] = []
    net = s.network

    seen_actors: set[str] = set()
    for a in net.actors:
        if not a:
            out.append(Violation("empty_actor_id", "actor id must be nonempty"))
        if a in seen_actors:
            out.append(Violation("duplicate_actor", f"actor {a!r} appears more than once", a))
        seen_actors.add(a)
    actors = set(net.actors)

    for actor, deps in net.dependums.items():
        if actor not in actors:
            out.append(Violation("unknown_dependum_actor", f"dependums listed for unknown actor {actor!r}", actor))
        seen_ids: set[str] = set()
        for d in deps:
            where = f"{actor}/{d.id}"
            if d.id in seen_ids:
                out.append(Violation("duplicate_dependum", f"dependum {d.id!r} repeated for actor {actor!r}", where))
            seen_ids.add(d.id)
            if d.kind not in DEPENDUM_KINDS:
                out.append(Violation("unknown_dependum_kind", f"kind {d.kind!r} not one of {DEPENDUM_KINDS}", where))
            if not d.importance_weight >= 0:
                out.append(Violation("negative_importance_weight", f"importance weight {d.importance_weight} < 0", where))

    seen_links: set[tuple[str, str, str]] = set()
    for link in net.links:
        where = f"{link.depender}->{link.dependee}/{link.dependum_id}"
        if link.depender == link.dependee:
            out.append(Violation("self_dependency", f"actor {link.depender!r} cannot depend on itself", where))
        if link.depender not in actors:
            out.append(Violation("unknown_link_actor", f"unknown depender {link.depender!r}", where))
        if link.dependee not in actors:
            out.append(Violation("unknown_link_actor", f"unknown dependee {link.dependee!r}", where))
        ids = {d.id for d in net.dependums_of(link.depender)}
        if link.dependum_id not in ids:
            out.append(Violation("unknown_dependum", f"{link.dependum_id!r} is not a dependum of {link.depender!r}", where))
        key = (link.depender, link.dependee, link.dependum_id)
        if key in seen_links:
            out.append(Violation("duplicate_link", f"more than one link for {key}", where))
        seen_links.add(key)
        if not 0.0 <= link.criticality <= 1.0:
            out.append(Violation("criticality_out_of_range", f"criticality {link.criticality} outside [0, 1]", where))
        if link.alternatives_count is not None:
            if link.alternatives_count < 1:
                out.append(Violation("invalid_alternatives_count", f"alternatives_count {link.alternatives_count} < 1", where))
            elif (
                not link.criticality_override
                and abs(link.criticality - 1.0 / link.alternatives_count) > _CRIT_ALT_TOL
            ):
                out.append(
                    Violation(
                        "alternatives_criticality_mismatch",
                        f"criticality {link.criticality} != 1/{link.alternatives_count} and not marked overridden",
                        where,
                    )
                )

    # The coefficient formula divides by total weight; any actor that actually
    # depends on someone needs a positive divisor.
    for actor in net.actors:
        has_link = any(l.depender == actor for l in net.links)
        total_w = sum(d.importance_weight for d in net.dependums_of(actor))
        if has_link and not total_w > 0:
            out.append(Violation("zero_weight_with_links", f"actor {actor!r} has links but total importance weight {total_w}", actor))

    v = s.value
    if v.form not in VALUE_FORMS:
        out.append(Violation("unknown_value_form", f"form {v.form!r} not one of {VALUE_FORMS}"))
    elif v.form == "power":
        if v.beta is None or not 0.0 < v.beta < 1.0:
            out.append(Violation("invalid_beta", f"power form requires 0 < beta < 1, got {v.beta}"))
    elif v.theta is None or not v.theta > 0:
        out.append(Violation("invalid_theta", f"logarithmic form requires theta > 0, got {v.theta}"))
    if v.synergy not in SYNERGY_KINDS:
        out.append(Violation("unknown_synergy_kind", f"synergy {v.synergy!r} not one of {SYNERGY_KINDS}"))
    if not v.gamma >= 0:
        out.append(Violation("negative_gamma", f"gamma {v.gamma} < 0"))

    out.extend(_check_actor_map(s.bargaining.power, actors, "bargaining"))
    for actor, p in s.bargaining.power.items():
        if actor in actors and not p > 0:
            out.append(Violation("nonpositive_bargaining_power", f"bargaining power for {actor!r} is {p}, must be > 0", actor))

    out.extend(_check_actor_map(s.endowments, actors, "endowments"))
    for actor, e in s.endowments.items():
        if actor in actors and not e >= 0:
            out.append(Violation("negative_endowment", f"endowment for {actor!r} is {e}, must be >= 0", actor))

    out.extend(_check_actor_map(s.action_bounds, actors, "action_bounds"))
    for actor, (lo, hi) in s.action_bounds.items():
        if actor in actors and not (0.0 <= lo < hi):
            out.append(Violation("invalid_action_bounds", f"bounds for {actor!r} are [{lo}, {hi}], need 0 <= lo < hi", actor))

    if s.cost_model.kind not in COST_KINDS:
        out.append(Violation("unknown_cost_kind", f"cost kind {s.cost_model.kind!r} not one of {COST_KINDS}"))
    elif s.cost_model.kind == "quadratic" and (s.cost_model.c is None or not s.cost_model.c > 0):
        out.append(Violation("invalid_cost", f"quadratic cost requires c > 0, got {s.cost_model.c}"))

    if s.appropriation_mode not in APPROPRIATION_MODES:
        out.append(Violation("unknown_appropriation_mode", f"mode {s.appropriation_mode!r} not one of {APPROPRIATION_MODES}"))

    if s.matrix_override is not None:
        out.extend(_check_matrix(s.matrix_override, canonical_actor_order(net)))

    return out


def _check_actor_map(mapping: dict, actors: set[str], name: str) -> list[Violation]:
    out = []
    for actor in mapping:
        if actor not in actors:
            out.append(Violation(f"unknown_{name}_actor", f"{name} entry for unknown actor {actor!r}", actor))
    for actor in sorted(actors - set(mapping)):
        out.append(Violation(f"missing_{name}", f"no {name} entry for actor {actor!r}", actor))
    return out


def _check_matrix(m: InterdependenceMatrix, order: tuple[str, ...]) -> list[Violation]:
    out = []
    if m.order != order:
        out.append(Violation("matrix_override_order", f"override order {m.order} != canonical order {order}"))
        return out
    n = len(order)
    if len(m.entries) != n or any(len(row) != n for row in m.entries):
        out.append(Violation("matrix_override_shape", f"override is not {n}x{n}"))
        return out
    for i in range(n):
        if m.entries[i][i] != 0.0:
            out.append(Violation("matrix_override_diagonal", f"diagonal entry [{i}][{i}] = {m.entries[i][i]}, must be 0"))
        for j in range(n):
            if not 0.0 <= m.entries[i][j] <= 1.0:
                out.append(Violation("matrix_override_range", f"entry [{i}][{j}] = {m.entries[i][j]} outside [0, 1]"))
    return out


# ---------------------------------------------------------------------------
# Scenario interchange document (strict JSON schema)
# ---------------------------------------------------------------------------

_TOP_KEYS = {
    "actors",
    "dependums",
    "links",
    "value",
    "bargaining",
    "endowments",
    "action_bounds",
    "cost_model",
    "appropriation_mode",
    "matrix_override",
}
_DEPENDUM_KEYS = {"id", "kind", "importance_weight"}
_LINK_KEYS = {"depender", "dependee", "dependum_id", "criticality", "alternatives_count", "criticality_override"}
_VALUE_KEYS = {"form", "synergy", "gamma", "beta", "theta"}
_COST_KEYS = {"kind", "c"}
_MATRIX_KEYS = {"order", "entries"}


def _reject_unknown(d: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise ScenarioFormatError(f"unknown key(s) {unknown} in {where}")


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise ScenarioFormatError(f"missing key {key!r} in {where}")
    return d[key]


def _number(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ScenarioFormatError(f"expected a number at {where}, got {x!r}")
    return float(x)


def scenario_from_dict(doc: dict) -> Scenario:
    """Parse a scenario interchange document. Strict: unknown keys are
    rejected to catch typos. Raises ScenarioFormatError on malformed input;
    call validate_scenario separately for invariant checking."""
    if not isinstance(doc, dict):
        raise ScenarioFormatError("scenario document must be a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "scenario")

    actors = _require(doc, "actors", "scenario")
    if not isinstance(actors, list) or not all(isinstance(a, str) for a in actors):
        raise ScenarioFormatError("'actors' must be a list of strings")

    dependums: dict[str, tuple[Dependum, ...]] = {}
    for actor, deps in _require(doc, "dependums", "scenario").items():
        items = []
        for i, d in enumerate(deps):
            where = f"dependums[{actor!r}][{i}]"
            _reject_unknown(d, _DEPENDUM_KEYS, where)
            items.append(
                Dependum(
                    id=str(_require(d, "id", where)),
                    kind=str(_require(d, "kind", where)),
                    importance_weight=_number(_require(d, "importance_weight", where), where),
                )
            )
        dependums[actor] = tuple(items)

    links = []
    for i, l in enumerate(_require(doc, "links", "scenario")):
        where = f"links[{i}]"
        _reject_unknown(l, _LINK_KEYS, where)
        alternatives = l.get("alternatives_count")
        if alternatives is not None and (isinstance(alternatives, bool) or not isinstance(alternatives, int)):
            raise ScenarioFormatError(f"alternatives_count must be an integer at {where}")
        links.append(
            DependencyLink(
                depender=str(_require(l, "depender", where)),
                dependee=str(_require(l, "dependee", where)),
                dependum_id=str(_require(l, "dependum_id", where)),
                criticality=_number(_require(l, "criticality", where), where),
                alternatives_count=alternatives,
                criticality_override=bool(l.get("criticality_override", False)),
            )
        )

    vdoc = _require(doc, "value", "scenario")
    _reject_unknown(vdoc, _VALUE_KEYS, "value")
    value = ValueSpec(
        form=str(_require(vdoc, "form", "value")),
        synergy=str(vdoc.get("synergy", "geometric_mean")),
        gamma=_number(vdoc.get("gamma", 0.0), "value.gamma"),
        beta=None if vdoc.get("beta") is None else _number(vdoc["beta"], "value.beta"),
        theta=None if vdoc.get("theta") is None else _number(vdoc["theta"], "value.theta"),
    )

    bargaining = BargainingSpec(
        power={a: _number(p, f"bargaining[{a!r}]") for a, p in _require(doc, "bargaining", "scenario").items()}
    )
    endowments = {a: _number(e, f"endowments[{a!r}]") for a, e in _require(doc, "endowments", "scenario").items()}

    bounds_doc = doc.get("action_bounds")
    if bounds_doc is None:
        action_bounds = default_action_bounds(endowments)
    else:
        action_bounds = {}
        for a, pair in bounds_doc.items():
            if not isinstance(pair, list) or len(pair) != 2:
                raise ScenarioFormatError(f"action_bounds[{a!r}] must be a [lo, hi] pair")
            action_bounds[a] = (_number(pair[0], "lo"), _number(pair[1], "hi"))

    cdoc = doc.get("cost_model", {"kind": "linear"})
    if isinstance(cdoc, str):
        cdoc = {"kind": cdoc}
    _reject_unknown(cdoc, _COST_KEYS, "cost_model")
    cost_model = CostModel(
        kind=str(cdoc.get("kind", "linear")),
        c=None if cdoc.get("c") is None else _number(cdoc["c"], "cost_model.c"),
    )

    override = None
    mdoc = doc.get("matrix_override")
    if mdoc is not None:
        _reject_unknown(mdoc, _MATRIX_KEYS, "matrix_override")
        override = InterdependenceMatrix(
            order=tuple(str(a) for a in _require(mdoc, "order", "matrix_override")),
            entries=tuple(
                tuple(_number(x, "matrix_override.entries") for x in row)
                for row in _require(mdoc, "entries", "matrix_override")
            ),
        )

    return Scenario(
        network=DependencyNetwork(actors=tuple(actors), dependums=dependums, links=tuple(links)),
        value=value,
        bargaining=bargaining,
        endowments=endowments,
        action_bounds=action_bounds,
        cost_model=cost_model,
        appropriation_mode=str(doc.get("appropriation_mode", "separable")),
        matrix_override=override,
    )


def scenario_to_dict(s: Scenario) -> dict:
    """Inverse of scenario_from_dict; field names exactly as in the interchange format."""
    doc: dict = {
        "actors": list(s.network.actors),
        "dependums": {
            actor: [
                {"id": d.id, "kind": d.kind, "importance_weight": d.importance_weight}
                for d in deps
            ]
            for actor, deps in s.network.dependums.items()
        },
        "links": [],
        "value": _value_to_dict(s.value),
        "bargaining": dict(s.bargaining.power),
        "endowments": dict(s.endowments),
        "action_bounds": {a: [lo, hi] for a, (lo, hi) in s.action_bounds.items()},
        "cost_model": {"kind": s.cost_model.kind} if s.cost_model.c is None else {"kind": s.cost_model.kind, "c": s.cost_model.c},
        "appropriation_mode": s.appropriation_mode,
    }
    for l in s.network.links:
        entry = {
            "depender": l.depender,
            "dependee": l.dependee,
            "dependum_id": l.dependum_id,
            "criticality": l.criticality,
        }
        if l.alternatives_count is not None:
            entry["alternatives_count"] = l.alternatives_count
        if l.criticality_override:
            entry["criticality_override"] = True
        doc["links"].append(entry)
    if s.matrix_override is not None:
        doc["matrix_override"] = {
            "order": list(s.matrix_override.order),
            "entries": [list(row) for row in s.matrix_override.entries],
        }
    return doc


def _value_to_dict(v: ValueSpec) -> dict:
    out = {"form": v.form, "synergy": v.synergy, "gamma": v.gamma}
    if v.beta is not None:
        out["beta"] = v.beta
    if v.theta is not None:
        out["theta"] = v.theta
    return out
