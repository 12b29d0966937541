"""Canonical JSON documents for engine results.

One serializer per result type, shared by the CLI's --json output and the
HTTP facade so the two surfaces cannot drift. `wire` normalizes floats to 12
significant digits, the same precision as the CSV exports; clients render
these tokens verbatim.
"""

from __future__ import annotations

from .equilibrium import EquilibriumResult
from .experiments import CounterfactualReport, SweepResult, ValidationScore, sweep_to_csv
from .interdependence import AsymmetryRow
from .model import InterdependenceMatrix, Violation

SCHEMA_VERSION = 1


def wire(obj):
    """Round every float to 12 significant digits, recursively."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: wire(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [wire(v) for v in obj]
    return obj


def violation_to_doc(v: Violation) -> dict:
    return {"code": v.code, "message": v.message, "where": v.where}


def matrix_to_doc(m: InterdependenceMatrix, asymmetry: list[AsymmetryRow], from_override: bool = False) -> dict:
    return {
        "order": list(m.order),
        "entries": [list(row) for row in m.entries],
        "from_override": from_override,
        "asymmetry": [
            {"pair": list(r.pair), "d_ij": r.d_ij, "d_ji": r.d_ji, "imbalance": r.imbalance} for r in asymmetry
        ],
    }


def equilibrium_to_doc(r: EquilibriumResult, mode: str) -> dict:
    return {
        "mode": mode,
        "actions": dict(r.actions),
        "payoffs": dict(r.payoffs),
        "utilities": dict(r.utilities),
        "converged": r.converged,
        "iterations": r.iterations,
        "residual": r.residual,
        "multi_start_agreement": r.multi_start_agreement,
        "boundary_flags": dict(r.boundary_flags),
    }


def sweep_to_doc(result: SweepResult) -> dict:
    return {
        "order": list(result.order),
        "axis_names": list(result.axis_names),
        "rows": [
            {
                "params": dict(row.params),
                "actions": dict(row.actions),
                "payoffs": dict(row.payoffs),
                "total_value": row.total_value,
                "converged": row.converged,
            }
            for row in result.rows
        ],
        "csv": sweep_to_csv(result),
    }


def score_to_doc(score: ValidationScore) -> dict:
    return {
        "metrics": dict(score.metrics),
        "points": dict(score.points),
        "total": score.total,
        "max_total": score.max_total,
        "flags": list(score.flags),
        "notes": list(score.notes),
    }


def counterfactual_to_doc(report: CounterfactualReport, mode: str) -> dict:
    return {
        "base": equilibrium_to_doc(report.base, mode),
        "edited": equilibrium_to_doc(report.edited, mode),
        "action_deltas": dict(report.action_deltas),
        "payoff_deltas": dict(report.payoff_deltas),
        "matrix": {
            "order": list(report.base_matrix.order),
            "base_entries": [list(row) for row in report.base_matrix.entries],
            "edited_entries": [list(row) for row in report.edited_matrix.entries],
            "delta_entries": [list(row) for row in report.matrix_delta],
        },
        "shares": {
            "base": dict(report.base_shares),
            "edited": dict(report.edited_shares),
        },
    }
