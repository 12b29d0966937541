import json
import time
from importlib import resources

import pytest
from fastapi.testclient import TestClient

from coopequil import __version__
from coopequil.cli import main as cli_main
from coopequil.service import create_app

FIXTURES = resources.files("coopequil.fixtures")


def fixture_doc(name):
    return json.loads(FIXTURES.joinpath(name).read_text(encoding="utf-8"))


@pytest.fixture
def client(tmp_path):
    app = create_app(tmp_path / "store")
    with TestClient(app) as c:
        yield c


def post_scenario(client, name="slcd.json"):
    response = client.post("/scenarios", json=fixture_doc(name))
    assert response.status_code in (200, 201)
    return response.json()["id"]


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ok", "version": __version__}


def test_health_store_misconfigured(tmp_path):
    root = tmp_path / "store"
    app = create_app(root)
    # clobber the store root with a plain file after startup
    for child in root.iterdir():
        child.unlink()
    root.rmdir()
    root.write_text("not a directory")
    with TestClient(app) as c:
        response = c.get("/health")
        assert response.status_code == 500
        assert response.json()["code"] == "store_misconfigured"


def test_scenario_content_addressing(client):
    first = client.post("/scenarios", json=fixture_doc("slcd.json"))
    assert first.status_code == 201
    again = client.post("/scenarios", json=fixture_doc("slcd.json"))
    assert again.status_code == 200
    assert again.json()["id"] == first.json()["id"]

    listing = client.get("/scenarios").json()
    assert listing["scenarios"] == [first.json()["id"]]

    fetched = client.get(f"/scenarios/{first.json()['id']}")
    assert fetched.status_code == 200
    assert fetched.json()["actors"] == ["Sony", "Samsung"]


def test_invalid_scenario_lists_violations(client):
    doc = fixture_doc("slcd.json")
    doc["bargaining"]["Sony"] = 0.0
    response = client.post("/scenarios", json=doc)
    assert response.status_code == 422
    body = response.json()
    assert body["code"] == "validation_failed"
    assert body["details"][0]["code"] == "nonpositive_bargaining_power"


def test_unknown_scenario_404(client):
    assert client.post("/scenarios/none/matrix").status_code == 404
    assert client.get("/scenarios/none").status_code == 404


def test_matrix_endpoint(client):
    scenario_id = post_scenario(client)
    body = client.post(f"/scenarios/{scenario_id}/matrix").json()
    assert body["order"] == ["Samsung", "Sony"]
    assert body["entries"][1][0] == 0.86
    assert body["entries"][0][1] == 0.64
    assert body["from_override"] is False
    assert body["asymmetry"][0]["imbalance"] == pytest.approx(0.22)


def test_matrix_zero_for_no_links(client):
    doc = fixture_doc("slcd.json")
    doc["links"] = []
    scenario_id = client.post("/scenarios", json=doc).json()["id"]
    body = client.post(f"/scenarios/{scenario_id}/matrix").json()
    assert body["entries"] == [[0.0, 0.0], [0.0, 0.0]]


def test_equilibrium_endpoint(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    body = client.post(f"/scenarios/{scenario_id}/equilibrium", json={}).json()
    mean = (body["actions"]["Sony"] + body["actions"]["Samsung"]) / 2
    assert abs(mean - 26.7) < 0.5
    assert body["converged"] is True

    zeroed = client.post(
        f"/scenarios/{scenario_id}/equilibrium",
        json={"matrix_override": {"order": ["Samsung", "Sony"], "entries": [[0.0, 0.0], [0.0, 0.0]]}},
    ).json()
    mean = (zeroed["actions"]["Sony"] + zeroed["actions"]["Samsung"]) / 2
    assert abs(mean - 22.9) < 0.2


def test_equilibrium_non_convergence_is_200(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    response = client.post(
        f"/scenarios/{scenario_id}/equilibrium", json={"settings": {"max_iterations": 1}}
    )
    assert response.status_code == 200
    assert response.json()["converged"] is False


def test_equilibrium_rejects_unknown_keys(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    response = client.post(f"/scenarios/{scenario_id}/equilibrium", json={"tolerance": 1e-6})
    assert response.status_code == 422


def _wait_for_job(client, job_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        job = client.get(f"/jobs/{job_id}").json()
        if job["state"] in ("done", "failed"):
            return job
        time.sleep(0.05)
    raise AssertionError("job did not finish in time")


def test_sweep_job_lifecycle_matches_cli(client, tmp_path, capsys):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    response = client.post(
        f"/scenarios/{scenario_id}/sweep",
        json={"axes": [{"name": "gamma", "values": [0.0, 0.5, 1.0]}]},
    )
    assert response.status_code == 202
    job = _wait_for_job(client, response.json()["job_id"])
    assert job["state"] == "done"
    assert job["progress"] == {"completed": 3, "total": 3}
    assert job["result_id"]

    result = client.get(f"/results/{job['result_id']}").json()
    assert len(result["rows"]) == 3

    fixture = tmp_path / "slcd_rounded.json"
    fixture.write_text(FIXTURES.joinpath("slcd_rounded.json").read_text(encoding="utf-8"))
    out_csv = tmp_path / "cli.csv"
    assert cli_main(["sweep", str(fixture), "--axis", "gamma=0.0,0.5,1.0", "--out", str(out_csv)]) == 0
    capsys.readouterr()
    assert result["csv"] == out_csv.read_text()


def test_sweep_cap_is_422(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    response = client.post(
        f"/scenarios/{scenario_id}/sweep",
        json={"axes": [{"name": "gamma", "values": [i / 1000 for i in range(200001)]}]},
    )
    assert response.status_code == 422
    assert response.json()["code"] == "grid_too_large"


def test_unknown_job_and_result_404(client):
    assert client.get("/jobs/job-999999").status_code == 404
    assert client.get("/results/ffff").status_code == 404


def test_counterfactual_endpoint(client):
    scenario_id = post_scenario(client)
    body = client.post(
        f"/scenarios/{scenario_id}/counterfactual", json=fixture_doc("slcd_panel_edit.json")
    ).json()
    matrix = body["matrix"]
    i = matrix["order"].index("Sony")
    j = matrix["order"].index("Samsung")
    assert matrix["base_entries"][i][j] == 0.86
    assert matrix["edited_entries"][i][j] == 0.61
    assert matrix["delta_entries"][i][j] == -0.25
    assert body["shares"]["base"]["Sony"] == 0.45
    assert body["shares"]["edited"]["Sony"] == 0.511111111111


def test_counterfactual_empty_edit_zero_deltas(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    body = client.post(f"/scenarios/{scenario_id}/counterfactual", json={}).json()
    assert all(v == 0.0 for v in body["action_deltas"].values())


def test_counterfactual_out_of_range_crit_422(client):
    scenario_id = post_scenario(client)
    response = client.post(
        f"/scenarios/{scenario_id}/counterfactual",
        json={
            "criticality_overrides": [
                {"depender": "Sony", "dependee": "Samsung", "dependum_id": "lcd_manufacturing", "criticality": 1.3}
            ]
        },
    )
    assert response.status_code == 422
    assert any(d["code"] == "criticality_out_of_range" for d in response.json()["details"])


def test_score_endpoint(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    body = client.post(f"/scenarios/{scenario_id}/score", json={}).json()
    assert abs(body["metrics"]["baseline_action"] - 22.9) < 0.2
    assert abs(body["metrics"]["coop_increase_pct"] - 16.7) < 2.0
    assert body["max_total"] == 60.0
    assert "missing_counterfactual_edit" in body["flags"]


def test_score_rejects_rubric_not_totaling_60(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    response = client.post(
        f"/scenarios/{scenario_id}/score", json={"rubric": {"points_per_family": 25.0}}
    )
    assert response.status_code == 422
    assert any(d["code"] == "rubric_total_mismatch" for d in response.json()["details"])


def test_score_with_edit_and_enveloping_rubric(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    body = client.post(
        f"/scenarios/{scenario_id}/score",
        json={
            "rubric": {"coop_increase_range": [10.0, 100.0], "counterfactual_reduction_range": [0.0, 25.0]},
            "edit": fixture_doc("slcd_panel_edit.json"),
        },
    ).json()
    assert body["total"] == 60.0


def test_repeat_request_equivalence(client):
    scenario_id = post_scenario(client, "slcd_rounded.json")
    first = client.post(f"/scenarios/{scenario_id}/equilibrium", json={}).json()
    second = client.post(f"/scenarios/{scenario_id}/equilibrium", json={}).json()
    assert first == second
