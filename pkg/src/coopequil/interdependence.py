"""Structural interdependence: coupling coefficients from the dependency network.

The coefficient of actor i on actor j is the importance-weighted,
criticality-moderated fraction of i's dependums that j provides:

    D_ij = sum_d w_d * Dep(i,j,d) * crit(i,j,d) / sum_d w_d

over i's full dependum set. Strictly direct links; no transitive closure.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import DependencyNetwork, InterdependenceMatrix, Scenario, canonical_actor_order


class UnknownActorError(LookupError):
    pass


def criticality_from_alternatives(n: int) -> float:
    """Criticality of a dependee with n perfect substitutes: 1/n (1 for a sole provider)."""
    if n < 1:
        raise ValueError(f"alternatives count must be >= 1, got {n}")
    return 1.0 / n


def compute_coefficient(network: DependencyNetwork, depender: str, dependee: str) -> float:
    """Dependence of `depender` on `dependee` per the weighted-criticality formula.

    An actor with no dependums (or zero total weight and no links) is fully
    independent and yields 0.
    """
    actors = set(network.actors)
    if depender not in actors:
        raise UnknownActorError(f"unknown actor {depender!r}")
    if dependee not in actors:
        raise UnknownActorError(f"unknown actor {dependee!r}")
    if depender == dependee:
        return 0.0

    deps = network.dependums_of(depender)
    total_weight = sum(d.importance_weight for d in deps)
    if total_weight <= 0:
        return 0.0

    weight_by_id = {d.id: d.importance_weight for d in deps}
    numerator = sum(
        weight_by_id[l.dependum_id] * l.criticality
        for l in network.links
        if l.depender == depender and l.dependee == dependee and l.dependum_id in weight_by_id
    )
    return numerator / total_weight


def compute_matrix(network: DependencyNetwork) -> InterdependenceMatrix:
    """Apply compute_coefficient to every ordered actor pair; zero diagonal."""
    order = canonical_actor_order(network)
    entries = tuple(
        tuple(0.0 if i == j else compute_coefficient(network, order[i], order[j]) for j in range(len(order)))
        for i in range(len(order))
    )
    return InterdependenceMatrix(order=order, entries=entries)


def effective_matrix(scenario: Scenario) -> InterdependenceMatrix:
    """The matrix a solve actually uses: the override when present, else the
    network-derived matrix."""
    if scenario.matrix_override is not None:
        return scenario.matrix_override
    return compute_matrix(scenario.network)


def zero_matrix(order: tuple[str, ...]) -> InterdependenceMatrix:
    n = len(order)
    return InterdependenceMatrix(order=order, entries=tuple(tuple(0.0 for _ in range(n)) for _ in range(n)))


def scale_matrix(m: InterdependenceMatrix, factor: float) -> InterdependenceMatrix:
    """Scale every off-diagonal entry; scaled entries must stay within [0, 1]."""
    if factor < 0:
        raise ValueError(f"scale factor must be >= 0, got {factor}")
    entries = []
    for i, row in enumerate(m.entries):
        scaled = []
        for j, x in enumerate(row):
            v = 0.0 if i == j else x * factor
            if v > 1.0 + 1e-12:
                raise ValueError(f"scaling by {factor} pushes entry [{i}][{j}] to {v}, outside [0, 1]")
            scaled.append(min(v, 1.0))
        entries.append(tuple(scaled))
    return InterdependenceMatrix(order=m.order, entries=tuple(entries))


@dataclass(frozen=True)
class AsymmetryRow:
    pair: tuple[str, str]
    d_ij: float
    d_ji: float
    imbalance: float


def asymmetry_report(m: InterdependenceMatrix) -> list[AsymmetryRow]:
    """One row per unordered actor pair, sorted by descending imbalance
    |D_ij - D_ji|. Large imbalances flag power asymmetries in the network."""
    rows = []
    n = len(m.order)
    for i in range(n):
        for j in range(i + 1, n):
            d_ij = m.entries[i][j]
            d_ji = m.entries[j][i]
            rows.append(AsymmetryRow(pair=(m.order[i], m.order[j]), d_ij=d_ij, d_ji=d_ji, imbalance=abs(d_ij - d_ji)))
    rows.sort(key=lambda r: (-r.imbalance, r.pair))
    return rows


def matrix_to_csv(m: InterdependenceMatrix) -> str:
    """CSV with a header row/column of actor ids in canonical order, 12
    significant digits, LF line endings."""
    lines = ["," + ",".join(m.order)]
    for actor, row in zip(m.order, m.entries):
        lines.append(actor + "," + ",".join(f"{x:.12g}" for x in row))
    return "\n".join(lines) + "\n"
