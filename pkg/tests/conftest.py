import json
from importlib import resources

import pytest

from coopequil.model import (
    BargainingSpec,
    CostModel,
    DependencyNetwork,
    InterdependenceMatrix,
    Scenario,
    ValueSpec,
    scenario_from_dict,
)


def fixture_doc(name: str) -> dict:
    return json.loads(resources.files("coopequil.fixtures").joinpath(name).read_text(encoding="utf-8"))


@pytest.fixture
def slcd() -> Scenario:
    return scenario_from_dict(fixture_doc("slcd.json"))


@pytest.fixture
def slcd_rounded() -> Scenario:
    return scenario_from_dict(fixture_doc("slcd_rounded.json"))


@pytest.fixture
def platform_developer() -> Scenario:
    return scenario_from_dict(fixture_doc("platform_developer.json"))


def two_actor_scenario(
    form="power",
    beta=0.75,
    theta=20.0,
    gamma=0.0,
    synergy="geometric_mean",
    d=(0.0, 0.0),
    powers=(1.0, 1.0),
    endowment=100.0,
    bounds=(0.0, 100.0),
    cost=CostModel("linear"),
    mode="separable",
    actors=("a1", "a2"),
) -> Scenario:
    """Bare two-actor scenario with a direct coupling matrix; the workhorse for
    solver tests. d = (D_12, D_21) in canonical actor order."""
    order = tuple(sorted(actors))
    value = ValueSpec(
        form=form,
        synergy=synergy,
        gamma=gamma,
        beta=beta if form == "power" else None,
        theta=theta if form == "logarithmic" else None,
    )
    return Scenario(
        network=DependencyNetwork(actors=actors, dependums={}, links=()),
        value=value,
        bargaining=BargainingSpec({order[0]: powers[0], order[1]: powers[1]}),
        endowments={a: endowment for a in order},
        action_bounds={a: bounds for a in order},
        cost_model=cost,
        appropriation_mode=mode,
        matrix_override=InterdependenceMatrix(order=order, entries=((0.0, d[0]), (d[1], 0.0))),
    )
