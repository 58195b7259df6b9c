"""HTTP facade over the library for the navigator UI.

Runs execute in a bounded background worker pool (size 1 by default) and
persist as one JSON artifact per run under the data directory; the registry
is rebuilt from a directory scan at startup, so restarting the service with
the same data directory re-serves identical artifacts. Every response is
derivable from the stored RunArtifact alone.
"""

from __future__ import annotations

import logging
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from .artifact import ConfigError, RunConfig, execute_run, load_artifact, write_artifact
from .examples import problem_descriptors

__all__ = ["create_app", "ApiError", "navigate_artifact", "worstcase_subset_artifact", "displayed_objectives"]

logger = logging.getLogger(__name__)

_RUN_ID_RE = re.compile(r"^run-(\d+)$")


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class _RunState:
    id: str
    status: str  # pending | running | done | failed
    config: RunConfig | None = None
    error: str | None = None
    artifact: dict | None = None


@dataclass
class _Registry:
    data_dir: Path
    lock: threading.Lock = field(default_factory=threading.Lock)
    runs: dict[str, _RunState] = field(default_factory=dict)

    def scan(self) -> None:
        for path in sorted(self.data_dir.glob("run-*.json")):
            run_id = path.stem
            if _RUN_ID_RE.match(run_id) and run_id not in self.runs:
                self.runs[run_id] = _RunState(id=run_id, status="done")

    def next_id(self) -> str:
        numbers = [int(m.group(1)) for rid in self.runs if (m := _RUN_ID_RE.match(rid))]
        for path in self.data_dir.glob("run-*.json"):
            if m := _RUN_ID_RE.match(path.stem):
                numbers.append(int(m.group(1)))
        return f"run-{(max(numbers, default=0) + 1):04d}"

    def artifact_path(self, run_id: str) -> Path:
        return self.data_dir / f"{run_id}.json"

    def get(self, run_id: str) -> _RunState:
        with self.lock:
            state = self.runs.get(run_id)
        if state is None:
            raise ApiError(404, f"unknown run id: {run_id}")
        return state

    def artifact(self, run_id: str) -> dict:
        state = self.get(run_id)
        if state.status != "done":
            raise ApiError(409, f"run {run_id} is not done (status: {state.status})")
        with self.lock:
            if state.artifact is None:
                state.artifact = load_artifact(self.artifact_path(run_id))
            return state.artifact


def displayed_objectives(artifact: Mapping) -> np.ndarray:
    """Objective vectors as plotted: worst case for robust runs, nominal otherwise."""
    key = "objectives_nominal" if artifact["method"] == "nominal" else "objectives_worst_case"
    return np.array([p[key] for p in artifact["front"]["points"]], dtype=float)


def navigate_artifact(artifact: Mapping, upper_bounds: list, reference: int | None) -> dict:
    """Bound filtering plus normalized nearest-point query on one artifact."""
    points = artifact["front"]["points"]
    M = len(artifact["problem"]["objectives"])
    if upper_bounds is None:
        upper_bounds = [None] * M
    if len(upper_bounds) != M:
        raise ApiError(400, f"upper_bounds must have {M} entries")
    objs = displayed_objectives(artifact)
    survivors = []
    for pid in range(len(points)):
        ok = all(b is None or objs[pid, m] <= float(b) for m, b in enumerate(upper_bounds))
        if ok:
            survivors.append(pid)
    nearest = None
    if survivors and reference is not None:
        if not 0 <= int(reference) < len(points):
            raise ApiError(404, f"unknown reference point id: {reference}")
        lo = objs.min(axis=0)
        span = objs.max(axis=0) - lo
        span = np.where(span > 0, span, 1.0)
        norm = (objs - lo) / span
        ref = norm[int(reference)]
        distances = np.linalg.norm(norm[survivors] - ref, axis=1)
        nearest = survivors[int(np.argmin(distances))]
    return {"surviving_point_ids": survivors, "nearest_point_id": nearest}


def worstcase_subset_artifact(artifact: Mapping, scenario_ids: list[int]) -> dict:
    """Recompute per-point worst-case objectives over a scenario subset."""
    if not scenario_ids:
        raise ApiError(400, "scenario subset must not be empty")
    valid = {s["id"] for s in artifact["scenario_set"]["scenarios"]}
    unknown = [i for i in scenario_ids if i not in valid]
    if unknown:
        raise ApiError(400, f"unknown scenario ids: {unknown}")
    out = []
    for point in artifact["front"]["points"]:
        rows = {r["scenario_id"]: r["objectives"] for r in point["scenario_table"]}
        values = np.max([rows[i] for i in scenario_ids], axis=0)
        out.append({"id": point["id"], "objectives": [float(v) for v in values]})
    return {
        "points": out,
        "scenario_ids": sorted(scenario_ids),
        "upper_bound_for_maro": artifact["method"] in ("maro_replication", "maro_affine"),
    }


def create_app(data_dir: str | Path, *, ui_dir: str | Path | None = None, max_workers: int = 1) -> FastAPI:
    """Build the application; ``max_workers`` bounds concurrent run execution."""
    data_dir = Path(data_dir)
    data_dir.mkdir(parents=True, exist_ok=True)
    registry = _Registry(data_dir=data_dir)
    registry.scan()
    executor = ThreadPoolExecutor(max_workers=max_workers, thread_name_prefix="run-worker")

    app = FastAPI(title="robustpareto", docs_url=None, redoc_url=None)
    app.state.registry = registry
    app.state.executor = executor

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"code": exc.status, "message": exc.message})

    @app.exception_handler(StarletteHTTPException)
    async def _http_error(request: Request, exc: StarletteHTTPException):
        return JSONResponse(status_code=exc.status_code, content={"code": exc.status_code, "message": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"code": 400, "message": str(exc)})

    def _execute(run_id: str, config: RunConfig) -> None:
        with registry.lock:
            registry.runs[run_id].status = "running"
        try:
            document = execute_run(config, run_id)
            write_artifact(document, registry.artifact_path(run_id))
            with registry.lock:
                state = registry.runs[run_id]
                state.artifact = document
                state.status = "done"
            logger.info("run %s done (%d points)", run_id, document["stats"]["n_points"])
        except Exception as exc:  # surface any failure through the status endpoint
            logger.exception("run %s failed", run_id)
            with registry.lock:
                state = registry.runs[run_id]
                state.status = "failed"
                state.error = str(exc)

    @app.get("/api/problems")
    async def list_problems() -> list[dict]:
        return problem_descriptors()

    @app.post("/api/runs")
    async def create_run(body: dict) -> dict:
        try:
            config = RunConfig.from_dict(body)
        except ConfigError as exc:
            raise ApiError(400, "; ".join(exc.messages))
        with registry.lock:
            run_id = registry.next_id()
            registry.runs[run_id] = _RunState(id=run_id, status="pending", config=config)
        executor.submit(_execute, run_id, config)
        return {"id": run_id, "status": "pending"}

    @app.get("/api/runs/{run_id}")
    async def run_status(run_id: str) -> dict:
        state = registry.get(run_id)
        out: dict[str, Any] = {"id": state.id, "status": state.status}
        if state.error:
            out["error"] = state.error
        if state.status == "done":
            artifact = registry.artifact(run_id)
            out["method"] = artifact["method"]
            out["problem"] = artifact["problem"]["id"]
            out["n_points"] = artifact["stats"]["n_points"]
        return out

    @app.get("/api/runs/{run_id}/front")
    async def get_front(run_id: str) -> dict:
        artifact = registry.artifact(run_id)
        objs = displayed_objectives(artifact)
        return {
            "run_id": run_id,
            "method": artifact["method"],
            "problem": artifact["problem"]["id"],
            "objective_names": artifact["problem"]["objectives"],
            "scenario_ids": [s["id"] for s in artifact["scenario_set"]["scenarios"]],
            "point_ids": [p["id"] for p in artifact["front"]["points"]],
            "objectives": [list(map(float, row)) for row in objs],
        }

    @app.get("/api/runs/{run_id}/points/{point_id}")
    async def get_point(run_id: str, point_id: int) -> dict:
        artifact = registry.artifact(run_id)
        points = artifact["front"]["points"]
        if not 0 <= point_id < len(points):
            raise ApiError(404, f"unknown point id: {point_id}")
        return points[point_id]

    @app.post("/api/runs/{run_id}/navigate")
    async def navigate(run_id: str, body: dict) -> dict:
        artifact = registry.artifact(run_id)
        return navigate_artifact(artifact, body.get("upper_bounds"), body.get("reference"))

    @app.post("/api/runs/{run_id}/worstcase")
    async def worstcase(run_id: str, body: dict) -> dict:
        artifact = registry.artifact(run_id)
        ids = body.get("scenario_ids") or []
        return worstcase_subset_artifact(artifact, [int(i) for i in ids])

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
