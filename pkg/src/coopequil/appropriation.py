"""Value appropriation: bargaining shares, investment costs, private payoffs,
and a coalition-based bargaining-power estimator.

Two appropriation modes:

  separable (default): each actor keeps the value they create individually and
      receives a negotiated share of the synergy only.
  pooled: all created value goes into one pot split by the negotiated shares.
      Added because under the separable payoff a partner's marginal payoff is
      flat in my action whenever gamma = 0, which makes the coupling matrix
      inert there; pooled is the minimal variant where coupling alone can move
      equilibria.
"""

from __future__ import annotations

import math
from itertools import combinations

from .model import BargainingSpec, CostModel, Scenario, canonical_actor_order
from .valuation import total_value

SHAPLEY_MAX_ACTORS = 10


def shares_from_power(b: BargainingSpec) -> dict[str, float]:
    """Normalize bargaining powers into synergy shares: alpha_i = beta_i / sum(beta)."""
    for actor, p in b.power.items():
        if not p > 0:
            raise ValueError(f"bargaining power for {actor!r} must be > 0, got {p}")
    total = math.fsum(b.power.values())
    return {actor: p / total for actor, p in b.power.items()}


def cost(model: CostModel, a: float) -> float:
    """Investment cost: linear is the identity, quadratic is c*a^2."""
    if a < 0:
        raise ValueError(f"action must be >= 0, got {a}")
    if model.kind == "quadratic":
        return model.c * a * a
    return a


def cost_derivative(model: CostModel, a: float) -> float:
    if model.kind == "quadratic":
        return 2.0 * model.c * a
    return 1.0


def payoffs(s: Scenario, shares: dict[str, float], actions: dict[str, float]) -> dict[str, float]:
    """Private payoff per actor at the given action profile.

    separable: pi_i = e_i - cost(a_i) + f_i(a_i) + alpha_i * gamma * g(a)
    pooled:    pi_i = e_i - cost(a_i) + alpha_i * V(a)
    """
    order = canonical_actor_order(s)
    vec = [actions[a] for a in order]
    breakdown = total_value(s.value, vec)
    out = {}
    for i, actor in enumerate(order):
        base = s.endowments[actor] - cost(s.cost_model, vec[i])
        if s.appropriation_mode == "pooled":
            out[actor] = base + shares[actor] * breakdown.total
        else:
            out[actor] = base + breakdown.individual[i] + shares[actor] * breakdown.synergy_value
    return out


def shapley_bargaining_estimate(s: Scenario, actions: dict[str, float]) -> dict[str, float]:
    """Exact Shapley values of the coalition game induced at a fixed profile;
    the value of a coalition is total value with non-members' actions zeroed.

    Offline advisory tool for eliciting bargaining powers; never consulted by
    the solver (shares stay pre-negotiated). Exact enumeration only, so the
    actor count is capped.
    """
    order = canonical_actor_order(s)
    n = len(order)
    if n > SHAPLEY_MAX_ACTORS:
        raise ValueError(f"exact Shapley enumeration capped at {SHAPLEY_MAX_ACTORS} actors, got {n}")

    def coalition_value(members: frozenset[int]) -> float:
        vec = [actions[a] if i in members else 0.0 for i, a in enumerate(order)]
        return total_value(s.value, vec).total

    values = {}
    indices = range(n)
    for size in range(n + 1):
        for combo in combinations(indices, size):
            fs = frozenset(combo)
            values[fs] = coalition_value(fs)

    fact = [math.factorial(k) for k in range(n + 1)]
    phi = {}
    for i, actor in enumerate(order):
        total = 0.0
        others = [k for k in indices if k != i]
        for size in range(n):
            weight = fact[size] * fact[n - size - 1] / fact[n]
            for combo in combinations(others, size):
                fs = frozenset(combo)
                total += weight * (values[fs | {i}] - values[fs])
        phi[actor] = total
    return phi
