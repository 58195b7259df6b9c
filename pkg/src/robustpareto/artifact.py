"""Run configuration, run execution, and the serialized RunArtifact.

A RunArtifact is one JSON document holding the scenario set, the front with
per-point scenario tables, scatter statistics and cost-of-robustness
records, plus an echo of the configuration. Serialization is canonical
(fixed key order, floats at 17 significant digits) so identical configs and
seeds produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .examples import get_problem, problem_ids
from .nlp import SolverConfig
from .pareto import ParetoFront
from .problem import Problem, ScenarioSet, make_explicit_scenarios, make_oat_scenarios
from .robust import (
    CostOfRobustness,
    Method,
    ScalarizationSpec,
    compute_front,
    cost_of_robustness,
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "execute_run",
    "build_artifact",
    "dumps_canonical",
    "write_artifact",
    "load_artifact",
]

SCHEMA_VERSION = 1

_METHOD_ALIASES = {
    "nominal": Method.NOMINAL,
    "rmo": Method.RMO,
    "maro": Method.MARO_REPLICATION,
    "maro_replication": Method.MARO_REPLICATION,
    "maro_affine": Method.MARO_AFFINE,
}


class ConfigError(ValueError):
    """A run configuration failed validation; carries all messages."""

    def __init__(self, messages: Sequence[str]):
        super().__init__("; ".join(messages))
        self.messages = list(messages)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one front computation."""

    problem: str
    method: Method
    overrides: dict = field(default_factory=dict)
    scenario_strategy: str = "oat"  # "oat" | "explicit"
    scenario_rows: tuple = ()
    scalarization: ScalarizationSpec = ScalarizationSpec()
    solver: SolverConfig = SolverConfig()
    seed: int = 0

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "RunConfig":
        messages: list[str] = []
        if not isinstance(data, Mapping):
            raise ConfigError(["configuration must be a JSON object"])

        known = {"problem", "method", "overrides", "scenarios", "scalarization", "solver", "seed"}
        for key in data:
            if key not in known:
                messages.append(f"unknown configuration key: {key}")

        problem = data.get("problem")
        if not isinstance(problem, str) or problem not in problem_ids():
            messages.append(f"problem must be one of: {', '.join(problem_ids())}")
            problem = ""

        method_raw = str(data.get("method", "")).lower()
        method = _METHOD_ALIASES.get(method_raw)
        if method is None:
            messages.append(f"method must be one of: {', '.join(sorted(_METHOD_ALIASES))}")

        overrides = data.get("overrides", {})
        if not isinstance(overrides, Mapping):
            messages.append("overrides must be an object")
            overrides = {}

        scen = data.get("scenarios", {"strategy": "oat"})
        strategy = "oat"
        rows: tuple = ()
        if not isinstance(scen, Mapping):
            messages.append("scenarios must be an object")
        else:
            strategy = scen.get("strategy", "oat")
            if strategy not in ("oat", "explicit"):
                messages.append("scenarios.strategy must be 'oat' or 'explicit'")
            raw_rows = scen.get("rows", [])
            if strategy == "explicit":
                if not isinstance(raw_rows, Sequence) or isinstance(raw_rows, (str, bytes)):
                    messages.append("scenarios.rows must be a list of objects")
                else:
                    rows = tuple(dict(r) for r in raw_rows)

        scal_raw = data.get("scalarization", {})
        scal = ScalarizationSpec()
        if not isinstance(scal_raw, Mapping):
            messages.append("scalarization must be an object")
        else:
            kind = scal_raw.get("type", "epsilon_constraint")
            if kind not in ("epsilon_constraint", "weighted_sum"):
                messages.append("scalarization.type must be 'epsilon_constraint' or 'weighted_sum'")
                kind = "epsilon_constraint"
            n_points = scal_raw.get("n_points", 11)
            if not isinstance(n_points, int) or n_points < 1:
                messages.append("scalarization.n_points must be an integer >= 1")
                n_points = 11
            weights = None
            if kind == "weighted_sum":
                raw_w = scal_raw.get("weights")
                if not raw_w:
                    messages.append("scalarization.weights is required for weighted_sum")
                else:
                    weights = tuple(tuple(float(v) for v in w) for w in raw_w)
                    for w in weights:
                        if any(v <= 0 for v in w) or abs(sum(w) - 1.0) > 1e-9:
                            messages.append(f"weight vector {list(w)} must be positive and sum to 1")
            scal = ScalarizationSpec(kind=kind, n_points=n_points, weights=weights)

        seed = data.get("seed", 0)
        if not isinstance(seed, int):
            messages.append("seed must be an integer")
            seed = 0

        solver_raw = data.get("solver", {})
        solver = SolverConfig(seed=seed)
        if not isinstance(solver_raw, Mapping):
            messages.append("solver must be an object")
        else:
            if "seed" in solver_raw:
                messages.append("set the top-level seed instead of solver.seed")
            fields = {k: v for k, v in solver_raw.items() if k != "seed"}
            unknown = set(fields) - {"feas_tol", "opt_tol", "max_iter", "multistart_count", "fd_step"}
            if unknown:
                messages.append(f"unknown solver options: {sorted(unknown)}")
            else:
                try:
                    solver = SolverConfig(seed=seed, **fields)
                except (TypeError, ValueError) as exc:
                    messages.append(f"invalid solver options: {exc}")

        if messages:
            raise ConfigError(messages)
        return cls(
            problem=problem,
            method=method,
            overrides=dict(overrides),
            scenario_strategy=strategy,
            scenario_rows=rows,
            scalarization=scal,
            solver=solver,
            seed=seed,
        )

    def to_dict(self) -> dict:
        scal: dict[str, Any] = {"type": self.scalarization.kind}
        if self.scalarization.kind == "epsilon_constraint":
            scal["n_points"] = self.scalarization.n_points
        else:
            scal["weights"] = [list(w) for w in self.scalarization.weights or ()]
        scenarios: dict[str, Any] = {"strategy": self.scenario_strategy}
        if self.scenario_strategy == "explicit":
            scenarios["rows"] = [dict(r) for r in self.scenario_rows]
        return {
            "problem": self.problem,
            "method": self.method.value,
            "overrides": dict(self.overrides),
            "scenarios": scenarios,
            "scalarization": scal,
            "solver": {
                "feas_tol": self.solver.feas_tol,
                "opt_tol": self.solver.opt_tol,
                "max_iter": self.solver.max_iter,
                "multistart_count": self.solver.multistart_count,
                "fd_step": self.solver.fd_step,
            },
            "seed": self.seed,
        }


def _scenario_set(p: Problem, config: RunConfig) -> ScenarioSet:
    if config.scenario_strategy == "oat":
        return make_oat_scenarios(p.uncertain)
    return make_explicit_scenarios(p.uncertain, config.scenario_rows)


def execute_run(config: RunConfig, run_id: str) -> dict:
    """Run the configured front computation and return the artifact document."""
    p = get_problem(config.problem, config.overrides)
    ss = _scenario_set(p, config)
    solver_cfg = replace(config.solver, seed=config.seed)
    front = compute_front(p, ss, config.method, config.scalarization, solver_cfg)
    costs: list[CostOfRobustness | None] = [None] * len(front.points)
    if config.method != Method.NOMINAL and front.points:
        nominal_front = compute_front(p, ss, Method.NOMINAL, config.scalarization, solver_cfg)
        costs = [cost_of_robustness(p, ss, point, nominal_front) for point in front.points]
    return build_artifact(run_id, config, p, ss, front, costs)


def build_artifact(
    run_id: str,
    config: RunConfig,
    p: Problem,
    ss: ScenarioSet,
    front: ParetoFront,
    costs: Sequence[CostOfRobustness | None],
) -> dict:
    points = []
    for pid, point in enumerate(front.points):
        ann = point.annotations
        table = ann["scenario_table"]
        scatter = ann["scatter"]
        record: dict[str, Any] = {
            "id": pid,
            "solver_status": point.solver_status.value,
            "scalarization": _scalarization_dict(point),
            "hnv": {k: float(v) for k, v in ann["hnv"].items()},
        }
        wsv = ann["wsv"]
        if isinstance(wsv, Mapping):
            record["wsv"] = {k: float(v) for k, v in wsv.items()}
        else:
            record["wsv_per_scenario"] = [{k: float(v) for k, v in row.items()} for row in wsv]
        if "affine_rule" in ann:
            record["affine_rule"] = ann["affine_rule"]
        record["objectives"] = _floats(point.objectives)
        record["objectives_nominal"] = _floats(ann["objectives_nominal"])
        record["objectives_worst_case"] = _floats(ann["objectives_worst_case"])
        record["scenario_table"] = [
            {
                "scenario_id": row.scenario_id,
                "objectives": _floats(row.objectives),
                "max_violation": float(row.max_violation),
                "wsv": {k: float(v) for k, v in row.wsv.items()},
            }
            for row in table.rows
        ]
        record["scatter_stats"] = {"range": _floats(scatter.ranges), "std": _floats(scatter.stds)}
        cost = costs[pid] if pid < len(costs) else None
        record["cost_of_robustness"] = (
            None
            if cost is None
            else {
                "nominal_objectives": _floats(cost.nominal_objectives),
                "gaps": None if cost.gaps is None else _floats(cost.gaps),
            }
        )
        points.append(record)

    empty = not front.points
    return {
        "schema_version": SCHEMA_VERSION,
        "run_id": run_id,
        "config": config.to_dict(),
        "problem": {
            "id": config.problem,
            "objectives": list(p.objective_labels()),
            "variables": [
                {"name": v.name, "kind": v.kind.value, "lower": v.lower, "upper": v.upper} for v in p.variables
            ],
            "uncertain": [
                {"name": q.name, "nominal": q.nominal, "lower": q.lower, "upper": q.upper} for q in p.uncertain
            ],
        },
        "method": config.method.value,
        "scenario_set": {
            "scenarios": [
                {"id": s.id, "values": {k: float(v) for k, v in s.values.items()}, "is_nominal": s.is_nominal}
                for s in ss.scenarios
            ]
        },
        "front": {
            "ideal": None if empty else _floats(front.ideal),
            "nadir_estimate": None if empty else _floats(front.nadir_estimate),
            "points": points,
        },
        "stats": {
            "n_points": len(points),
            "n_scenarios": len(ss),
            "n_subproblems": int(front.meta.get("n_subproblems", 0)),
            "n_skipped": int(front.meta.get("n_skipped", 0)),
            "diagnostic": front.meta.get("diagnostic"),
        },
    }


def _scalarization_dict(point) -> dict:
    s = point.scalarization
    out: dict[str, Any] = {"type": s.kind}
    if s.kind == "epsilon_constraint":
        out["free_index"] = s.free_index
        out["bounds"] = [None if b is None else float(b) for b in (s.bounds or ())]
    else:
        out["weights"] = [float(w) for w in (s.weights or ())]
    return out


def _floats(arr) -> list[float]:
    return [float(v) for v in np.asarray(arr, dtype=float)]


def _format_float(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"non-finite value cannot be serialized: {x}")
    return format(x, ".17g")


def _dump(value: Any, indent: int, out: list[str]) -> None:
    pad = "  " * indent
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(_format_float(value))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=True))
    elif isinstance(value, Mapping):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        items = list(value.items())
        for i, (k, v) in enumerate(items):
            out.append(f"{pad}  {json.dumps(str(k))}: ")
            _dump(v, indent + 1, out)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not len(value):
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(value):
            out.append(pad + "  ")
            _dump(v, indent + 1, out)
            out.append(",\n" if i + 1 < len(value) else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps_canonical(document: Mapping) -> str:
    """Serialize with stable key order and 17-significant-digit floats."""
    out: list[str] = []
    _dump(document, 0, out)
    out.append("\n")
    return "".join(out)


def write_artifact(document: Mapping, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_canonical(document), encoding="utf-8")
    return path


def load_artifact(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
