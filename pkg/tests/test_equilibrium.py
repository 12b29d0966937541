import dataclasses
import math
import random

import pytest

from conftest import two_actor_scenario
from coopequil.appropriation import payoffs, shares_from_power
from coopequil.equilibrium import (
    SolveSettings,
    best_response,
    solve,
    utility,
    utility_gradient,
    verify_epsilon_equilibrium,
)
from coopequil.interdependence import effective_matrix, zero_matrix
from coopequil.model import (
    BargainingSpec,
    CostModel,
    DependencyNetwork,
    InterdependenceMatrix,
    Scenario,
    ValueSpec,
)


def _parts(s):
    return effective_matrix(s), shares_from_power(s.bargaining)


def test_utility_zero_matrix_is_own_payoff():
    s = two_actor_scenario(form="power", beta=0.6, gamma=1.0, d=(0.0, 0.0))
    m, shares = _parts(s)
    actions = {"a1": 4.0, "a2": 7.0}
    pi = payoffs(s, shares, actions)
    for a in ("a1", "a2"):
        assert utility(s, m, shares, actions, a) == pytest.approx(pi[a], rel=1e-12)


def test_utility_full_coupling_doubles_symmetric_payoff():
    s = two_actor_scenario(form="power", beta=0.6, gamma=1.0, d=(1.0, 1.0))
    m, shares = _parts(s)
    actions = {"a1": 5.0, "a2": 5.0}
    pi = payoffs(s, shares, actions)
    assert utility(s, m, shares, actions, "a1") == pytest.approx(2.0 * pi["a1"], rel=1e-12)


def test_utility_slcd_plug_in(slcd_rounded):
    m, shares = _parts(slcd_rounded)
    actions = {"Sony": 22.9, "Samsung": 22.9}
    pi = payoffs(slcd_rounded, shares, actions)
    assert utility(slcd_rounded, m, shares, actions, "Sony") == pytest.approx(
        pi["Sony"] + 0.8 * pi["Samsung"], rel=1e-12
    )
    assert utility(slcd_rounded, m, shares, actions, "Samsung") == pytest.approx(
        pi["Samsung"] + 0.6 * pi["Sony"], rel=1e-12
    )


def test_gradient_closed_form_roots():
    s = two_actor_scenario(form="power", beta=0.75, gamma=0.0)
    m, shares = _parts(s)
    root = 0.75 ** 4
    assert utility_gradient(s, m, shares, {"a1": root, "a2": 1.0}, "a1") == pytest.approx(0.0, abs=1e-12)

    s = two_actor_scenario(form="logarithmic", theta=20.0, gamma=0.0)
    m, shares = _parts(s)
    assert utility_gradient(s, m, shares, {"a1": 19.0, "a2": 1.0}, "a1") == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("mode", ["separable", "pooled"])
def test_gradient_matches_finite_differences(mode):
    rng = random.Random(mode)
    for _ in range(25):
        s = two_actor_scenario(
            form=rng.choice(["power", "logarithmic"]),
            beta=rng.uniform(0.3, 0.9),
            theta=rng.uniform(5.0, 25.0),
            gamma=rng.uniform(0.0, 2.5),
            d=(rng.random(), rng.random()),
            powers=(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)),
            cost=rng.choice([CostModel("linear"), CostModel("quadratic", c=0.01)]),
            mode=mode,
        )
        m, shares = _parts(s)
        actions = {"a1": rng.uniform(1.0, 50.0), "a2": rng.uniform(1.0, 50.0)}
        actor = rng.choice(["a1", "a2"])
        grad = utility_gradient(s, m, shares, actions, actor)
        h = 1e-6 * max(1.0, actions[actor])
        up = dict(actions, **{actor: actions[actor] + h})
        down = dict(actions, **{actor: actions[actor] - h})
        fd = (utility(s, m, shares, up, actor) - utility(s, m, shares, down, actor)) / (2 * h)
        assert abs(grad - fd) <= 1e-6 * max(1.0, abs(grad), abs(fd))


def test_best_response_closed_forms():
    # no synergy: the reply ignores the opponent entirely
    s = two_actor_scenario(form="power", beta=0.75, gamma=0.0, d=(0.9, 0.9))
    m, shares = _parts(s)
    for other in (0.0, 10.0, 99.0):
        br = best_response(s, m, shares, {"a1": 1.0, "a2": other}, "a1")
        assert br == pytest.approx(0.75 ** 4, abs=1e-6)

    # pooled log with equal shares: -1 + 0.5 * theta / (1 + a) = 0 at a = 9
    s = two_actor_scenario(form="logarithmic", theta=20.0, gamma=0.0, mode="pooled")
    m, shares = _parts(s)
    br = best_response(s, m, shares, {"a1": 1.0, "a2": 5.0}, "a1")
    assert br == pytest.approx(9.0, abs=1e-6)


def test_best_response_boundary_optimum():
    # theta < 1 makes the objective strictly decreasing: reply is the lower bound
    s = two_actor_scenario(form="logarithmic", theta=0.5, gamma=0.0)
    m, shares = _parts(s)
    assert best_response(s, m, shares, {"a1": 5.0, "a2": 5.0}, "a1") == 0.0


def test_solve_slcd_anchors(slcd_rounded):
    result = solve(slcd_rounded)
    assert result.converged
    assert result.residual < SolveSettings().tolerance  # converged implies no residual improvement
    mean = math.fsum(result.actions.values()) / 2
    assert mean == pytest.approx(26.7, abs=0.5)

    zero_d = slcd_rounded.replace(matrix_override=zero_matrix(("Samsung", "Sony")))
    base = solve(zero_d)
    assert base.converged
    assert math.fsum(base.actions.values()) / 2 == pytest.approx(22.9, abs=0.2)


def test_solve_determinism(slcd_rounded):
    a = solve(slcd_rounded)
    b = solve(slcd_rounded)
    assert a == b


def test_non_convergence_is_data(slcd_rounded):
    result = solve(slcd_rounded, SolveSettings(max_iterations=1))
    assert result.converged is False
    assert result.iterations == 1


def test_boundary_flags():
    s = two_actor_scenario(form="logarithmic", theta=20.0, gamma=0.0, bounds=(0.0, 5.0))
    result = solve(s)
    assert result.boundary_flags == {"a1": "at_upper", "a2": "at_upper"}

    s = two_actor_scenario(form="logarithmic", theta=0.5, gamma=0.0)
    result = solve(s)
    assert result.boundary_flags == {"a1": "at_lower", "a2": "at_lower"}

    s = two_actor_scenario(form="logarithmic", theta=20.0, gamma=0.0)
    result = solve(s)
    assert result.boundary_flags == {"a1": "interior", "a2": "interior"}


def test_verify_detects_non_equilibrium(slcd_rounded):
    m, shares = _parts(slcd_rounded)
    at_lower = {"Sony": 0.0, "Samsung": 0.0}
    gains = verify_epsilon_equilibrium(slcd_rounded, m, shares, at_lower)
    assert max(gains.values()) > 0.0


def test_verify_at_solution(slcd_rounded):
    m, shares = _parts(slcd_rounded)
    result = solve(slcd_rounded)
    gains = verify_epsilon_equilibrium(slcd_rounded, m, shares, result.actions)
    for actor, gain in gains.items():
        assert gain < 1e-6 * max(1.0, abs(result.utilities[actor]))


def test_single_actor_closed_form():
    s = Scenario(
        network=DependencyNetwork(actors=("solo",), dependums={}, links=()),
        value=ValueSpec(form="logarithmic", theta=20.0, gamma=0.0),
        bargaining=BargainingSpec({"solo": 1.0}),
        endowments={"solo": 100.0},
        action_bounds={"solo": (0.0, 100.0)},
    )
    result = solve(s)
    assert result.actions["solo"] == pytest.approx(19.0, abs=1e-6)
    m = effective_matrix(s)
    gains = verify_epsilon_equilibrium(s, m, shares_from_power(s.bargaining), result.actions)
    assert gains["solo"] <= 1e-9


def test_coupling_inert_when_no_synergy_weight():
    results = []
    for d in (0.0, 0.3, 0.9):
        s = two_actor_scenario(form="power", beta=0.75, gamma=0.0, d=(d, d))
        results.append(solve(s).actions)
    assert results[0] == results[1] == results[2]


def test_endowment_invariance_exact():
    actions = []
    for e in (10.0, 25.0, 50.0, 100.0, 200.0):
        s = two_actor_scenario(form="logarithmic", theta=20.0, gamma=0.65, d=(0.8, 0.6), endowment=e, bounds=(0.0, 200.0))
        actions.append(solve(s).actions)
    for other in actions[1:]:
        for a in ("a1", "a2"):
            assert abs(other[a] - actions[0][a]) <= 1e-9


def test_multi_start_agreement(slcd_rounded):
    assert solve(slcd_rounded).multi_start_agreement is True


def test_quadratic_cost_equilibrium():
    # linear-quadratic FOC has an explicit root: theta/(1+a) = 2 c a
    c = 0.05
    s = two_actor_scenario(form="logarithmic", theta=20.0, gamma=0.0, cost=CostModel("quadratic", c=c))
    result = solve(s)
    a = result.actions["a1"]
    assert 20.0 / (1.0 + a) == pytest.approx(2 * c * a, rel=1e-5)


def test_three_actor_equilibrium_passes_oracle():
    actors = ("alpha", "beta", "gamma")
    entries = (
        (0.0, 0.4, 0.7),
        (0.2, 0.0, 0.5),
        (0.6, 0.1, 0.0),
    )
    s = Scenario(
        network=DependencyNetwork(actors=actors, dependums={}, links=()),
        value=ValueSpec(form="logarithmic", theta=15.0, gamma=1.2, synergy="geometric_mean"),
        bargaining=BargainingSpec({"alpha": 1.0, "beta": 1.5, "gamma": 0.8}),
        endowments={a: 100.0 for a in actors},
        action_bounds={a: (0.0, 100.0) for a in actors},
        appropriation_mode="separable",
        matrix_override=InterdependenceMatrix(order=actors, entries=entries),
    )
    result = solve(s)
    assert result.converged
    assert all(flag == "interior" for flag in result.boundary_flags.values())
    m, shares = _parts(s)
    gains = verify_epsilon_equilibrium(s, m, shares, result.actions)
    for actor, gain in gains.items():
        assert gain < 1e-6 * max(1.0, abs(result.utilities[actor]))
    # interior FOC holds analytically too
    for actor in actors:
        assert abs(utility_gradient(s, m, shares, result.actions, actor)) < 1e-4


def test_matrix_override_validated_before_solve(slcd_rounded):
    bad = dataclasses.replace(
        slcd_rounded.matrix_override, entries=((0.0, 1.4), (0.8, 0.0))
    )
    from coopequil.model import validate_scenario

    assert any(v.code == "matrix_override_range" for v in validate_scenario(slcd_rounded.replace(matrix_override=bad)))
