"""Coopetitive equilibrium: coupled utilities, analytic gradients, and a damped
simultaneous best-response solver with a grid-scan verification oracle.

Each actor maximizes its own private payoff plus coupling-weighted partner
payoffs. The solver iterates damped simultaneous best responses from several
deterministic starts; best responses are derivative-free (bracketed scan plus
golden-section refinement), so boundary optima and synergy kinks need no
special casing. Everything is deterministic: identical scenario and settings
produce bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .appropriation import cost, cost_derivative, payoffs, shares_from_power
from .interdependence import effective_matrix
from .model import InterdependenceMatrix, Scenario, canonical_actor_order
from .valuation import individual_value, value_gradient

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0

# Boundary classification band, as a fraction of the action interval.
_BOUNDARY_BAND = 1e-6

VERIFY_GRID_POINTS = 1025


@dataclass(frozen=True)
class SolveSettings:
    tolerance: float = 1e-8
    max_iterations: int = 10000
    damping: float = 0.5
    multi_start_count: int = 5
    inner_bracket_points: int = 64


@dataclass(frozen=True)
class EquilibriumResult:
    actions: dict[str, float]
    payoffs: dict[str, float]
    utilities: dict[str, float]
    converged: bool
    iterations: int
    residual: float
    multi_start_agreement: bool
    boundary_flags: dict[str, str]


def utility(
    s: Scenario,
    matrix: InterdependenceMatrix,
    shares: dict[str, float],
    actions: dict[str, float],
    actor: str,
) -> float:
    """Integrated utility: own payoff plus coupling-weighted partner payoffs,
    U_i = pi_i + sum_{j != i} D_ij * pi_j."""
    pi = payoffs(s, shares, actions)
    i = matrix.order.index(actor)
    other = sum(
        matrix.entries[i][j] * pi[partner]
        for j, partner in enumerate(matrix.order)
        if j != i
    )
    return pi[actor] + other


def utility_gradient(
    s: Scenario,
    matrix: InterdependenceMatrix,
    shares: dict[str, float],
    actions: dict[str, float],
    actor: str,
) -> float:
    """Analytic dU_i/da_i assembled from the value and cost derivatives under
    the scenario's appropriation mode. Propagates BoundaryDerivativeError at
    a_i = 0 for diverging forms; callers there must fall back to one-sided
    handling."""
    order = matrix.order
    i = order.index(actor)
    vec = [actions[a] for a in order]
    df, dg = value_gradient(s.value, vec, i)
    dcost = cost_derivative(s.cost_model, vec[i])
    weight = shares[actor] + sum(
        matrix.entries[i][j] * shares[order[j]] for j in range(len(order)) if j != i
    )
    if s.appropriation_mode == "pooled":
        return -dcost + weight * (df + s.value.gamma * dg)
    return -dcost + df + s.value.gamma * dg * weight


def best_response(
    s: Scenario,
    matrix: InterdependenceMatrix,
    shares: dict[str, float],
    actions: dict[str, float],
    actor: str,
    settings: SolveSettings | None = None,
) -> float:
    """Argmax of U_i over the actor's action interval holding others fixed."""
    settings = settings or SolveSettings()
    engine = _Engine(s, matrix, shares)
    order = matrix.order
    vec = [actions[a] for a in order]
    return engine.best_response(order.index(actor), vec, settings)


def verify_epsilon_equilibrium(
    s: Scenario,
    matrix: InterdependenceMatrix,
    shares: dict[str, float],
    actions: dict[str, float],
    grid_points: int = VERIFY_GRID_POINTS,
) -> dict[str, float]:
    """Oracle for the no-profitable-deviation condition: for each actor, scan a
    uniform grid of unilateral deviations and report the largest utility gain
    over staying put. Independent of the solver's fast path by design."""
    gains = {}
    for actor in matrix.order:
        stay = utility(s, matrix, shares, actions, actor)
        lo, hi = s.action_bounds[actor]
        best = -math.inf
        deviated = dict(actions)
        for k in range(grid_points):
            deviated[actor] = lo + (hi - lo) * k / (grid_points - 1)
            best = max(best, utility(s, matrix, shares, deviated, actor) - stay)
        gains[actor] = best
    return gains


def solve(s: Scenario, settings: SolveSettings | None = None) -> EquilibriumResult:
    """Compute a coopetitive equilibrium by damped simultaneous best-response
    iteration from deterministic multi-starts (midpoint, both bounds, and
    fixed quasi-random interior points).

    Convergence: max relative action change below tolerance. Non-convergence
    is reported in the result, never raised; sweeps must survive pathological
    grid points. The residual is the largest unilateral improvement found by a
    grid scan at the returned profile, and boundary_flags classify actions
    within a small band of their bounds.
    """
    settings = settings or SolveSettings()
    order = canonical_actor_order(s)
    matrix = effective_matrix(s)
    shares = shares_from_power(s.bargaining)
    engine = _Engine(s, matrix, shares)
    bounds = [s.action_bounds[a] for a in order]

    runs = []
    for frac in _start_fractions(settings.multi_start_count):
        start = [lo + frac * (hi - lo) for lo, hi in bounds]
        runs.append(engine.iterate(start, settings))

    chosen = next((r for r in runs if r[2]), runs[-1])
    final, iterations, converged = chosen

    actions = {a: x for a, x in zip(order, final)}
    pi = payoffs(s, shares, actions)
    utilities = {a: utility(s, matrix, shares, actions, a) for a in order}
    gains = verify_epsilon_equilibrium(s, matrix, shares, actions)

    agreement = True
    converged_runs = [r[0] for r in runs if r[2]]
    for other in converged_runs:
        for i, a in enumerate(order):
            if abs(other[i] - final[i]) > 100.0 * settings.tolerance * max(1.0, abs(final[i])):
                agreement = False

    flags = {}
    for i, a in enumerate(order):
        lo, hi = bounds[i]
        band = _BOUNDARY_BAND * (hi - lo)
        if final[i] - lo <= band:
            flags[a] = "at_lower"
        elif hi - final[i] <= band:
            flags[a] = "at_upper"
        else:
            flags[a] = "interior"

    return EquilibriumResult(
        actions=actions,
        payoffs=pi,
        utilities=utilities,
        converged=converged,
        iterations=iterations,
        residual=max(gains.values()),
        multi_start_agreement=agreement,
        boundary_flags=flags,
    )


def _start_fractions(count: int) -> list[float]:
    fracs = [0.5, 0.0, 1.0]
    k = 1
    while len(fracs) < count:
        fracs.append((k * _INV_PHI) % 1.0)
        k += 1
    return fracs[:count]


class _Engine:
    """Fast per-actor objective for the inner loop.

    Endowments enter the utility only as additive constants (in both modes),
    so the objective drops them along with every other term constant in the
    actor's own action; the argmax is unchanged and equilibria become exactly
    endowment-invariant instead of merely numerically so. Reported payoffs and
    utilities are computed separately with endowments included.
    """

    def __init__(self, s: Scenario, matrix: InterdependenceMatrix, shares: dict[str, float]):
        self.order = matrix.order
        self.n = len(self.order)
        self.value = s.value
        self.gamma = s.value.gamma
        self.synergy_kind = s.value.synergy
        self.cost_model = s.cost_model
        self.pooled = s.appropriation_mode == "pooled"
        self.bounds = [s.action_bounds[a] for a in self.order]
        alpha = [shares[a] for a in self.order]
        # Internalized synergy-share weight: own share plus coupling-weighted
        # partner shares. This is the only way D enters the first-order
        # condition, which is why D is inert when gamma = 0 in separable mode.
        self.weights = [
            alpha[i]
            + sum(matrix.entries[i][j] * alpha[j] for j in range(self.n) if j != i)
            for i in range(self.n)
        ]

    def _objective(self, i: int, profile: list[float]):
        rest = [profile[j] for j in range(self.n) if j != i]
        value = self.value
        cost_model = self.cost_model
        gamma = self.gamma
        w = self.weights[i]

        if self.synergy_kind == "geometric_mean":
            if any(x == 0.0 for x in rest):
                coeff = 0.0 if rest else 1.0
            else:
                coeff = math.exp(math.fsum(math.log(x) for x in rest) / self.n)
            exponent = 1.0 / self.n

            def g(a: float) -> float:
                return 0.0 if a == 0.0 else coeff * a ** exponent

        elif self.synergy_kind == "minimum":
            m_rest = min(rest) if rest else math.inf

            def g(a: float) -> float:
                return min(a, m_rest)

        else:
            s_rest = math.fsum(rest)

            def g(a: float) -> float:
                return a + s_rest

        if self.pooled:

            def phi(a: float) -> float:
                return -cost(cost_model, a) + w * (individual_value(value, a) + gamma * g(a))

        else:

            def phi(a: float) -> float:
                return -cost(cost_model, a) + individual_value(value, a) + gamma * w * g(a)

        return phi

    def best_response(self, i: int, profile: list[float], settings: SolveSettings) -> float:
        phi = self._objective(i, profile)
        lo, hi = self.bounds[i]
        k = max(settings.inner_bracket_points, 2)
        step = (hi - lo) / (k - 1)
        xs = [lo + step * t for t in range(k)]
        ys = [phi(x) for x in xs]
        best = max(range(k), key=lambda t: (ys[t], -t))
        left = xs[best - 1] if best > 0 else lo
        right = xs[best + 1] if best < k - 1 else hi
        x = _golden_max(phi, left, right, settings.tolerance * (hi - lo))
        best_x, best_y = x, phi(x)
        # Exact-endpoint polish so boundary optima return the bound itself.
        if ys[0] > best_y:
            best_x, best_y = lo, ys[0]
        if ys[-1] > best_y:
            best_x = hi
        return best_x

    def iterate(self, start: list[float], settings: SolveSettings) -> tuple[list[float], int, bool]:
        lam = settings.damping
        a = list(start)
        for it in range(1, settings.max_iterations + 1):
            br = [self.best_response(i, a, settings) for i in range(self.n)]
            new = [(1.0 - lam) * a[i] + lam * br[i] for i in range(self.n)]
            delta = max(abs(new[i] - a[i]) / max(1.0, abs(a[i])) for i in range(self.n))
            a = new
            if delta < settings.tolerance:
                return a, it, True
        return a, settings.max_iterations, False


def _golden_max(f, a: float, b: float, tol_width: float):
    """Golden-section maximization on [a, b] to the given bracket width. The
    objective is concave in the own action for every supported form, so the
    bracket is unimodal."""
    dist = b - a
    if dist <= tol_width or tol_width <= 0:
        return (a + b) / 2.0
    n = int(math.ceil(math.log(tol_width / dist) / math.log(_INV_PHI)))
    c = a + _INV_PHI2 * dist
    d = a + _INV_PHI * dist
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        if yc > yd:
            b, d, yd = d, c, yc
            dist *= _INV_PHI
            c = a + _INV_PHI2 * dist
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            dist *= _INV_PHI
            d = a + _INV_PHI * dist
            yd = f(d)
    return (a + d) / 2.0 if yc > yd else (c + b) / 2.0
