"""HTTP facade over the engine for the analyst workbench and scripts.

Scenarios are content-addressed documents; every computation endpoint is a
pure function of stored scenario plus request body. Only sweeps run
asynchronously (a single background worker, one sweep at a time); solves,
scores, and counterfactuals answer synchronously. Errors use
{code, message, details[]}. No authentication: bind loopback unless told
otherwise.
"""

from __future__ import annotations

import itertools
import json
import logging
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import __version__
from .documents import (
    counterfactual_to_doc,
    equilibrium_to_doc,
    matrix_to_doc,
    score_to_doc,
    sweep_to_doc,
    violation_to_doc,
    wire,
)
from .equilibrium import SolveSettings, solve
from .experiments import (
    SWEEP_PARAMETERS,
    SweepAxis,
    SweepSpec,
    ValidationRubric,
    edit_from_dict,
    run_counterfactual,
    run_sweep,
    rubric_from_dict,
    score_scenario,
    validate_edit,
    validate_rubric,
)
from .interdependence import asymmetry_report, effective_matrix
from .model import (
    InterdependenceMatrix,
    Scenario,
    ScenarioFormatError,
    scenario_from_dict,
    validate_scenario,
)
from .store import ArtifactStore, NotFoundError

log = logging.getLogger("coopequil.service")

_SETTINGS_KEYS = {"tolerance", "max_iterations", "damping", "multi_start_count", "inner_bracket_points"}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: list | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or []
        super().__init__(message)


def _settings_from_doc(doc: dict | None) -> SolveSettings:
    if not doc:
        return SolveSettings()
    unknown = sorted(set(doc) - _SETTINGS_KEYS)
    if unknown:
        raise ApiError(422, "invalid_request", f"unknown settings key(s): {unknown}")
    defaults = SolveSettings()
    try:
        return SolveSettings(
            tolerance=float(doc.get("tolerance", defaults.tolerance)),
            max_iterations=int(doc.get("max_iterations", defaults.max_iterations)),
            damping=float(doc.get("damping", defaults.damping)),
            multi_start_count=int(doc.get("multi_start_count", defaults.multi_start_count)),
            inner_bracket_points=int(doc.get("inner_bracket_points", defaults.inner_bracket_points)),
        )
    except (TypeError, ValueError) as e:
        raise ApiError(422, "invalid_request", f"bad settings: {e}")


class SweepJobRunner:
    """Single background worker; sweeps queue and execute one at a time.
    Job state transitions only move forward: queued -> running -> done|failed."""

    def __init__(self, store: ArtifactStore):
        self.store = store
        self.jobs: dict[str, dict] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)
        self._queue: list[tuple[str, SweepSpec]] = []
        self._wakeup = threading.Condition(self._lock)
        self._thread = threading.Thread(target=self._work, daemon=True)
        self._thread.start()

    def submit(self, spec: SweepSpec) -> str:
        with self._lock:
            job_id = f"job-{next(self._counter):06d}"
            self.jobs[job_id] = {
                "job_id": job_id,
                "kind": "sweep",
                "state": "queued",
                "progress": {"completed": 0, "total": _grid_total(spec)},
                "result_id": None,
                "error": None,
            }
            self._queue.append((job_id, spec))
            self._wakeup.notify()
        return job_id

    def get(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self.jobs:
                raise NotFoundError(job_id)
            return dict(self.jobs[job_id])

    def _work(self) -> None:
        while True:
            with self._lock:
                while not self._queue:
                    self._wakeup.wait()
                job_id, spec = self._queue.pop(0)
                self.jobs[job_id]["state"] = "running"
            try:
                def progress(completed: int, total: int, job_id=job_id) -> None:
                    with self._lock:
                        self.jobs[job_id]["progress"] = {"completed": completed, "total": total}

                result = run_sweep(spec, progress=progress)
                result_id, _ = self.store.store("sweep", wire(sweep_to_doc(result)))
                with self._lock:
                    self.jobs[job_id]["state"] = "done"
                    self.jobs[job_id]["result_id"] = result_id
            except Exception as e:  # job failure is data, not a crash
                log.exception("sweep job %s failed", job_id)
                with self._lock:
                    self.jobs[job_id]["state"] = "failed"
                    self.jobs[job_id]["error"] = str(e)


def _grid_total(spec: SweepSpec) -> int:
    total = 1
    for axis in spec.axes:
        total *= len(axis.values)
    return total


def create_app(store_root: str | Path | None = None) -> FastAPI:
    root = Path(store_root or os.environ.get("COOP_STORE", "coop_store"))
    app = FastAPI(title="coopequil", version=__version__)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = ArtifactStore(root)
    runner = SweepJobRunner(store)
    app.state.store = store
    app.state.runner = runner

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    def _load_scenario(scenario_id: str) -> Scenario:
        try:
            artifact = store.fetch(scenario_id)
        except NotFoundError:
            raise ApiError(404, "not_found", f"no scenario {scenario_id}")
        if artifact.kind != "scenario":
            raise ApiError(404, "not_found", f"{scenario_id} is a {artifact.kind}, not a scenario")
        return scenario_from_dict(artifact.payload)

    @app.get("/health")
    def health():
        probe = root / ".health"
        try:
            probe.write_text("ok", encoding="utf-8")
            probe.unlink()
        except OSError as e:
            raise ApiError(500, "store_misconfigured", f"store root {root} is not writable: {e}")
        return {"status": "ok", "version": __version__}

    @app.post("/scenarios")
    async def create_scenario(request: Request):
        body = await _json_body(request)
        try:
            scenario = scenario_from_dict(body)
        except ScenarioFormatError as e:
            raise ApiError(422, "invalid_format", str(e))
        violations = validate_scenario(scenario)
        if violations:
            raise ApiError(
                422, "validation_failed", "scenario violates model invariants",
                [violation_to_doc(v) for v in violations],
            )
        scenario_id, created = store.store("scenario", body)
        return JSONResponse(status_code=201 if created else 200, content={"id": scenario_id})

    @app.get("/scenarios")
    def list_scenarios():
        return {"scenarios": store.list("scenario")}

    @app.get("/scenarios/{scenario_id}")
    def get_scenario(scenario_id: str):
        try:
            artifact = store.fetch(scenario_id)
        except NotFoundError:
            raise ApiError(404, "not_found", f"no scenario {scenario_id}")
        return artifact.payload

    @app.post("/scenarios/{scenario_id}/matrix")
    def matrix(scenario_id: str):
        scenario = _load_scenario(scenario_id)
        m = effective_matrix(scenario)
        return wire(matrix_to_doc(m, asymmetry_report(m), from_override=scenario.matrix_override is not None))

    @app.post("/scenarios/{scenario_id}/equilibrium")
    async def equilibrium(scenario_id: str, request: Request):
        scenario = _load_scenario(scenario_id)
        body = await _json_body(request, optional=True)
        unknown = sorted(set(body) - {"settings", "mode", "matrix_override"})
        if unknown:
            raise ApiError(422, "invalid_request", f"unknown key(s): {unknown}")
        settings = _settings_from_doc(body.get("settings"))
        if body.get("mode") is not None:
            if body["mode"] not in ("separable", "pooled"):
                raise ApiError(422, "invalid_request", f"mode must be separable or pooled, got {body['mode']!r}")
            scenario = scenario.replace(appropriation_mode=body["mode"])
        if body.get("matrix_override") is not None:
            mdoc = body["matrix_override"]
            try:
                override = InterdependenceMatrix(
                    order=tuple(mdoc["order"]),
                    entries=tuple(tuple(float(x) for x in row) for row in mdoc["entries"]),
                )
            except (KeyError, TypeError, ValueError) as e:
                raise ApiError(422, "invalid_request", f"bad matrix_override: {e}")
            scenario = scenario.replace(matrix_override=override)
        violations = validate_scenario(scenario)
        if violations:
            raise ApiError(
                422, "validation_failed", "overrides violate model invariants",
                [violation_to_doc(v) for v in violations],
            )
        result = solve(scenario, settings)
        return wire(equilibrium_to_doc(result, scenario.appropriation_mode))

    @app.post("/scenarios/{scenario_id}/sweep")
    async def sweep(scenario_id: str, request: Request):
        scenario = _load_scenario(scenario_id)
        body = await _json_body(request)
        unknown = sorted(set(body) - {"axes", "settings"})
        if unknown:
            raise ApiError(422, "invalid_request", f"unknown key(s): {unknown}")
        axes_doc = body.get("axes")
        if not isinstance(axes_doc, list) or not axes_doc:
            raise ApiError(422, "invalid_request", "body must carry a nonempty 'axes' list")
        axes = []
        for a in axes_doc:
            if not isinstance(a, dict) or set(a) - {"name", "values"} or "name" not in a or "values" not in a:
                raise ApiError(422, "invalid_request", "each axis must be {name, values}")
            axes.append(SweepAxis(str(a["name"]), tuple(a["values"])))
        spec = SweepSpec(base=scenario, axes=tuple(axes), settings=_settings_from_doc(body.get("settings")))
        if _grid_total(spec) > spec.cap:
            raise ApiError(422, "grid_too_large", f"grid has {_grid_total(spec)} points, cap is {spec.cap}")
        for axis in spec.axes:
            if axis.name not in SWEEP_PARAMETERS:
                raise ApiError(422, "invalid_request", f"unknown sweep parameter {axis.name!r}")
            if not axis.values:
                raise ApiError(422, "invalid_request", f"axis {axis.name!r} has no values")
        job_id = runner.submit(spec)
        return JSONResponse(status_code=202, content={"job_id": job_id})

    @app.get("/jobs/{job_id}")
    def job(job_id: str):
        try:
            return runner.get(job_id)
        except NotFoundError:
            raise ApiError(404, "not_found", f"no job {job_id}")

    @app.get("/results/{result_id}")
    def result(result_id: str):
        try:
            artifact = store.fetch(result_id)
        except NotFoundError:
            raise ApiError(404, "not_found", f"no result {result_id}")
        return artifact.payload

    @app.post("/scenarios/{scenario_id}/counterfactual")
    async def counterfactual(scenario_id: str, request: Request):
        scenario = _load_scenario(scenario_id)
        body = await _json_body(request, optional=True)
        try:
            edit = edit_from_dict(body)
        except (ScenarioFormatError, KeyError, TypeError, ValueError) as e:
            raise ApiError(422, "invalid_format", f"bad edit: {e}")
        problems = validate_edit(scenario, edit)
        if problems:
            raise ApiError(
                422, "validation_failed", "edit violates value ranges",
                [violation_to_doc(v) for v in problems],
            )
        report = run_counterfactual(scenario, edit)
        return wire(counterfactual_to_doc(report, scenario.appropriation_mode))

    @app.post("/scenarios/{scenario_id}/score")
    async def score(scenario_id: str, request: Request):
        scenario = _load_scenario(scenario_id)
        body = await _json_body(request, optional=True)
        unknown = sorted(set(body) - {"rubric", "edit", "settings"})
        if unknown:
            raise ApiError(422, "invalid_request", f"unknown key(s): {unknown}")
        rubric = ValidationRubric()
        if body.get("rubric") is not None:
            try:
                rubric = rubric_from_dict(body["rubric"])
            except (ScenarioFormatError, TypeError, ValueError) as e:
                raise ApiError(422, "invalid_format", f"bad rubric: {e}")
            problems = validate_rubric(rubric)
            if problems:
                raise ApiError(422, "validation_failed", "bad rubric", [violation_to_doc(v) for v in problems])
        edit = None
        if body.get("edit") is not None:
            try:
                edit = edit_from_dict(body["edit"])
            except (ScenarioFormatError, TypeError, ValueError) as e:
                raise ApiError(422, "invalid_format", f"bad edit: {e}")
            problems = validate_edit(scenario, edit)
            if problems:
                raise ApiError(422, "validation_failed", "bad edit", [violation_to_doc(v) for v in problems])
        result = score_scenario(scenario, rubric, _settings_from_doc(body.get("settings")), edit)
        return wire(score_to_doc(result))

    return app


async def _json_body(request: Request, optional: bool = False) -> dict:
    raw = await request.body()
    if not raw:
        if optional:
            return {}
        raise ApiError(422, "invalid_request", "request body required")
    try:
        body = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ApiError(422, "invalid_format", f"body is not valid JSON: {e.msg}")
    if not isinstance(body, dict):
        raise ApiError(422, "invalid_request", "body must be a JSON object")
    return body
