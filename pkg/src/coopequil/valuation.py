"""Value creation: individual contributions, synergy, totals, and analytic derivatives.

Value functions operate on action vectors in canonical actor order; callers
that work with actor-keyed mappings translate at the boundary. Everything here
is pure, stateless, and binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .model import ValueSpec


class BoundaryDerivativeError(ValueError):
    """A one-sided derivative was requested at an action of 0 where the
    analytic form diverges (power individual value, geometric-mean synergy)."""


@dataclass(frozen=True)
class ValueBreakdown:
    individual: tuple[float, ...]
    synergy_raw: float
    synergy_value: float
    total: float


def individual_value(spec: ValueSpec, a: float) -> float:
    """f(a): a^beta with 0^beta = 0 (continuous extension), or theta*ln(1+a)."""
    if a < 0:
        raise ValueError(f"action must be >= 0, got {a}")
    if spec.form == "power":
        return 0.0 if a == 0.0 else a ** spec.beta
    return spec.theta * math.log1p(a)


def individual_derivative(spec: ValueSpec, a: float) -> float:
    if a < 0:
        raise ValueError(f"action must be >= 0, got {a}")
    if spec.form == "power":
        if a == 0.0:
            raise BoundaryDerivativeError("power marginal value diverges at a = 0")
        return spec.beta * a ** (spec.beta - 1.0)
    return spec.theta / (1.0 + a)


def synergy(kind: str, actions: Sequence[float]) -> float:
    """g(a): geometric mean, minimum (Leontief), or additive."""
    if kind == "geometric_mean":
        if any(a == 0.0 for a in actions):
            return 0.0
        return math.exp(math.fsum(math.log(a) for a in actions) / len(actions))
    if kind == "minimum":
        return min(actions)
    return math.fsum(actions)


def synergy_derivative(kind: str, actions: Sequence[float], index: int) -> float:
    """dg/da_i. Geometric mean uses g/(N*a_i); minimum resolves ties to the
    subgradient 1/#minimizers so the per-actor derivatives sum to 1 at the
    kink; additive is 1."""
    if kind == "geometric_mean":
        a_i = actions[index]
        if a_i == 0.0:
            raise BoundaryDerivativeError("geometric-mean synergy derivative diverges at a_i = 0")
        return synergy(kind, actions) / (len(actions) * a_i)
    if kind == "minimum":
        m = min(actions)
        if actions[index] > m:
            return 0.0
        return 1.0 / sum(1 for a in actions if a == m)
    return 1.0


def total_value(spec: ValueSpec, actions: Sequence[float]) -> ValueBreakdown:
    """V(a) = sum_i f_i(a_i) + gamma * g(a), with the breakdown populated."""
    individual = tuple(individual_value(spec, a) for a in actions)
    g = synergy(spec.synergy, actions)
    synergy_value = spec.gamma * g
    return ValueBreakdown(
        individual=individual,
        synergy_raw=g,
        synergy_value=synergy_value,
        total=math.fsum(individual) + synergy_value,
    )


def superadditivity_gap(spec: ValueSpec, actions: Sequence[float]) -> float:
    """V(a) minus the sum of standalone values; equals gamma * g(a), strictly
    positive iff gamma > 0 and the synergy is nonzero."""
    return spec.gamma * synergy(spec.synergy, actions)


def value_gradient(spec: ValueSpec, actions: Sequence[float], index: int) -> tuple[float, float]:
    """(df_i/da_i, dg/da_i) at the given profile; analytic forms backing the
    first-order conditions. Signals BoundaryDerivativeError at a_i = 0 for the
    diverging forms."""
    return individual_derivative(spec, actions[index]), synergy_derivative(spec.synergy, actions, index)
