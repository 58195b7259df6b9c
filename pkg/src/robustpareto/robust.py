"""Worst-case and adjustable-robust front assembly over discrete scenarios.

Four formulations share one mechanism: each objective of the assembled
vector problem is the componentwise maximum of per-scenario evaluations,
and every constraint is replicated per scenario.

* nominal: one decision ``(x, y)``, nominal scenario only.
* rmo: one decision ``(x, y)``, worst case over all scenarios.
* maro_replication: decision ``(x, y_1, ..., y_K)``, one WSV copy per
  scenario standing for the value of the unknown recourse policy there.
* maro_affine: decision ``(x, a, B)`` with the affine recourse rule
  ``y(u) = a + B (u - u_nom)``; the WSV box is enforced at every scenario.

The affine rule is parametrized around the nominal scenario so that ``a``
is the nominal-scenario WSV vector and inherits the WSV box as its bounds;
the representable set of rules is the same as for ``y = a + B u``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np

from .pareto import (
    InfeasibleProblemError,
    ParetoFront,
    ParetoPoint,
    VectorProblem,
    epsilon_constraint_front,
    nondominated_filter,
    weighted_sum_point,
)
from .nlp import SolverConfig
from .problem import Problem, Scenario, ScenarioSet, VariableKind, evaluate, validate_problem

__all__ = [
    "Method",
    "RobustAssembly",
    "ScenarioRow",
    "ScenarioTable",
    "ScatterStats",
    "CostOfRobustness",
    "ScalarizationSpec",
    "assemble",
    "build_vector_problem",
    "compute_front",
    "sensitivity_scatter",
    "cost_of_robustness",
    "worstcase_over_subset",
]

logger = logging.getLogger(__name__)

# Sensitivity bound for affine-rule coefficients, in WSV spans per parameter
# half-range; generous enough to cover any rule whose scenario images stay
# inside the WSV box.
_AFFINE_GAIN_MARGIN = 2.0


class Method(str, Enum):
    NOMINAL = "nominal"
    RMO = "rmo"
    MARO_REPLICATION = "maro_replication"
    MARO_AFFINE = "maro_affine"


@dataclass(frozen=True)
class ScenarioRow:
    scenario_id: int
    objectives: np.ndarray
    max_violation: float
    wsv: dict[str, float]


@dataclass(frozen=True)
class ScenarioTable:
    rows: tuple[ScenarioRow, ...]

    def worstcase(self) -> np.ndarray:
        return np.max([r.objectives for r in self.rows], axis=0)

    def scenario_ids(self) -> list[int]:
        return [r.scenario_id for r in self.rows]


@dataclass(frozen=True)
class ScatterStats:
    """Per-objective spread of one design's objectives across scenarios."""

    ranges: np.ndarray
    stds: np.ndarray


@dataclass(frozen=True)
class CostOfRobustness:
    """Nominal-scenario objectives of a robust design and front gaps.

    ``gaps[m]`` is the difference between the design's nominal-scenario
    value of objective ``m`` and the nominal front linearly interpolated at
    the design's value of the other objective (two-objective fronts only;
    ``None`` otherwise).
    """

    nominal_objectives: np.ndarray
    gaps: np.ndarray | None


@dataclass(frozen=True)
class ScalarizationSpec:
    """Front strategy: epsilon-constraint grid or a list of weight vectors."""

    kind: str = "epsilon_constraint"  # or "weighted_sum"
    n_points: int = 11
    weights: tuple[tuple[float, ...], ...] | None = None


@dataclass(frozen=True)
class RobustAssembly:
    """A method-specific vector problem plus its decision layout."""

    method: Method
    problem: Problem
    scenarios: ScenarioSet
    vector_problem: VectorProblem
    n_hnv: int
    n_wsv: int
    deviations: np.ndarray  # (K, P) scenario minus nominal parameter values

    @property
    def n_scenarios(self) -> int:
        return len(self.scenarios)

    def split_decision(self, z: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """HNV vector and the per-scenario WSV vectors encoded in ``z``."""
        z = np.asarray(z, dtype=float)
        x = z[: self.n_hnv]
        K, ny = self.n_scenarios, self.n_wsv
        if self.method in (Method.NOMINAL, Method.RMO):
            y = z[self.n_hnv :]
            return x, [y] * K
        if self.method == Method.MARO_REPLICATION:
            ys = [z[self.n_hnv + k * ny : self.n_hnv + (k + 1) * ny] for k in range(K)]
            return x, ys
        a, gain = self.affine_coefficients(z)
        return x, [a + gain @ self.deviations[k] for k in range(K)]

    def affine_coefficients(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.method != Method.MARO_AFFINE:
            raise ValueError("affine coefficients exist only for the maro_affine method")
        z = np.asarray(z, dtype=float)
        ny, P = self.n_wsv, self.deviations.shape[1]
        a = z[self.n_hnv : self.n_hnv + ny]
        gain = z[self.n_hnv + ny :].reshape(ny, P)
        return a, gain


def _eval_rows(f: Callable, X: np.ndarray, Y: np.ndarray, u: Mapping[str, float], vectorized: bool) -> np.ndarray:
    if vectorized:
        return np.asarray(f(X, Y, u), dtype=float).reshape(len(X))
    return np.array([float(f(X[i], Y[i], u)) for i in range(len(X))])


def assemble(p: Problem, ss: ScenarioSet, method: Method) -> RobustAssembly:
    """Build the scenario-expanded vector problem for ``method``."""
    messages = validate_problem(p)
    if messages:
        raise ValueError("invalid problem: " + "; ".join(messages))
    if len(ss) == 0:
        raise ValueError("scenario set must not be empty")
    method = Method(method)

    x_lo, x_hi = p.box(VariableKind.HNV)
    y_lo, y_hi = p.box(VariableKind.WSV)
    nx, ny = x_lo.size, y_lo.size
    scenarios = list(ss.scenarios)
    K = len(scenarios)
    params = [q.name for q in p.uncertain]
    u_nom = np.array([ss.nominal.values[nm] for nm in params], dtype=float)
    deviations = np.array([[s.values[nm] - u_nom[j] for j, nm in enumerate(params)] for s in scenarios], dtype=float)
    deviations = deviations.reshape(K, len(params))

    if method == Method.NOMINAL:
        used = [ss.nominal]
        lower = np.concatenate([x_lo, y_lo])
        upper = np.concatenate([x_hi, y_hi])
    elif method == Method.RMO:
        used = scenarios
        lower = np.concatenate([x_lo, y_lo])
        upper = np.concatenate([x_hi, y_hi])
    elif method == Method.MARO_REPLICATION:
        used = scenarios
        lower = np.concatenate([x_lo] + [y_lo] * K)
        upper = np.concatenate([x_hi] + [y_hi] * K)
    else:
        used = scenarios
        span = y_hi - y_lo
        half_range = np.max(np.abs(deviations), axis=0) if deviations.size else np.zeros(0)
        gain_bound = np.empty((ny, len(params)))
        for j, h in enumerate(half_range):
            gain_bound[:, j] = _AFFINE_GAIN_MARGIN * span / h if h > 0 else 1.0
        lower = np.concatenate([x_lo, y_lo, -gain_bound.ravel()])
        upper = np.concatenate([x_hi, y_hi, gain_bound.ravel()])

    n_used = len(used)

    def wsv_blocks(Z: np.ndarray) -> list[np.ndarray]:
        if method in (Method.NOMINAL, Method.RMO):
            return [Z[:, nx:]] * n_used
        if method == Method.MARO_REPLICATION:
            return [Z[:, nx + k * ny : nx + (k + 1) * ny] for k in range(n_used)]
        a = Z[:, nx : nx + ny]
        gain = Z[:, nx + ny :].reshape(len(Z), ny, len(params))
        return [a + gain @ deviations[k] for k in range(n_used)]

    def components_batch(Z: np.ndarray) -> list[np.ndarray]:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        X = Z[:, :nx]
        Ys = wsv_blocks(Z)
        out = []
        for f in p.objectives:
            cols = [_eval_rows(f, X, Ys[k], used[k].values, p.vectorized) for k in range(n_used)]
            out.append(np.stack(cols, axis=1))
        return out

    def inequalities_batch(Z: np.ndarray) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        X = Z[:, :nx]
        Ys = wsv_blocks(Z)
        cols = []
        for k in range(n_used):
            for g in p.constraints:
                cols.append(_eval_rows(g, X, Ys[k], used[k].values, p.vectorized))
        if method == Method.MARO_AFFINE:
            for k in range(n_used):
                yk = Ys[k]
                for i in range(ny):
                    cols.append(y_lo[i] - yk[:, i])
                    cols.append(yk[:, i] - y_hi[i])
        if not cols:
            return np.zeros((len(Z), 0))
        return np.stack(cols, axis=1)

    def scalar_component(m: int, k: int) -> Callable:
        return lambda z, m=m, k=k: float(components_batch(z[None, :])[m][0, k])

    def scalar_inequality(j: int) -> Callable:
        return lambda z, j=j: float(inequalities_batch(z[None, :])[0, j])

    n_box = 2 * ny * n_used if method == Method.MARO_AFFINE else 0
    n_ineq = len(p.constraints) * n_used + n_box
    components = tuple(tuple(scalar_component(m, k) for k in range(n_used)) for m in range(p.n_objectives))
    inequalities = tuple(scalar_inequality(j) for j in range(n_ineq))

    # Multistart samples begin at constant recourse policies (every scenario
    # gets the same WSV block; affine rules start with zero gain), which are
    # exactly the rmo-feasible shapes and avoid hopeless replicate corners.
    start_transform = None
    if method == Method.MARO_REPLICATION and ny:

        def start_transform(z: np.ndarray) -> np.ndarray:
            out = np.asarray(z, dtype=float).copy()
            first = out[nx : nx + ny]
            for k in range(1, K):
                out[nx + k * ny : nx + (k + 1) * ny] = first
            return out

    elif method == Method.MARO_AFFINE and ny:

        def start_transform(z: np.ndarray) -> np.ndarray:
            out = np.asarray(z, dtype=float).copy()
            out[nx + ny :] = 0.0
            return out

    vp = VectorProblem(
        lower=lower,
        upper=upper,
        components=components,
        inequalities=inequalities,
        components_batch=components_batch,
        inequalities_batch=inequalities_batch,
        start_transform=start_transform,
    )
    return RobustAssembly(
        method=method,
        problem=p,
        scenarios=ss,
        vector_problem=vp,
        n_hnv=nx,
        n_wsv=ny,
        deviations=deviations,
    )


def build_vector_problem(p: Problem, ss: ScenarioSet, method: Method) -> VectorProblem:
    """The assembled vector problem alone (see :func:`assemble`)."""
    return assemble(p, ss, method).vector_problem


def _scenario_table(p: Problem, ss: ScenarioSet, x: np.ndarray, ys: Sequence[np.ndarray]) -> ScenarioTable:
    wsv_names = [v.name for v in p.wsv]
    rows = []
    for s, y in zip(ss.scenarios, ys):
        ev = evaluate(p, x, y, s)
        rows.append(
            ScenarioRow(
                scenario_id=s.id,
                objectives=ev.objectives,
                max_violation=ev.max_violation,
                wsv={nm: float(v) for nm, v in zip(wsv_names, y)},
            )
        )
    return ScenarioTable(rows=tuple(rows))


def _scatter_stats(table: ScenarioTable) -> ScatterStats:
    values = np.array([r.objectives for r in table.rows])
    return ScatterStats(ranges=values.max(axis=0) - values.min(axis=0), stds=values.std(axis=0))


def _annotate_point(asm: RobustAssembly, point: ParetoPoint) -> None:
    p, ss = asm.problem, asm.scenarios
    x, ys = asm.split_decision(point.decision)
    table = _scenario_table(p, ss, x, ys)
    nominal_row = table.rows[ss.nominal_index]
    hnv_names = [v.name for v in p.hnv]
    point.annotations["hnv"] = {nm: float(v) for nm, v in zip(hnv_names, x)}
    if asm.method in (Method.NOMINAL, Method.RMO):
        point.annotations["wsv"] = dict(table.rows[0].wsv)
    else:
        point.annotations["wsv"] = [dict(r.wsv) for r in table.rows]
    if asm.method == Method.MARO_AFFINE:
        a, gain = asm.affine_coefficients(point.decision)
        wsv_names = [v.name for v in p.wsv]
        params = [q.name for q in p.uncertain]
        point.annotations["affine_rule"] = {
            "intercept": {nm: float(v) for nm, v in zip(wsv_names, a)},
            "gains": {
                wsv_names[i]: {params[j]: float(gain[i, j]) for j in range(len(params))} for i in range(len(wsv_names))
            },
        }
    point.annotations["scenario_table"] = table
    point.annotations["scatter"] = _scatter_stats(table)
    point.annotations["objectives_nominal"] = nominal_row.objectives
    point.annotations["objectives_worst_case"] = table.worstcase()


def compute_front(
    p: Problem,
    ss: ScenarioSet,
    method: Method,
    scal: ScalarizationSpec = ScalarizationSpec(),
    cfg: SolverConfig = SolverConfig(),
) -> ParetoFront:
    """Front of the assembled problem, each point annotated per scenario.

    Stored point objectives are worst-case values for the robust methods and
    nominal-scenario values for ``nominal``. An all-infeasible scalarization
    grid yields an empty front with a diagnostic in ``front.meta``.
    """
    asm = assemble(p, ss, method)
    vp = asm.vector_problem
    try:
        if scal.kind == "epsilon_constraint":
            front = epsilon_constraint_front(vp, scal.n_points, cfg)
        elif scal.kind == "weighted_sum":
            if not scal.weights:
                raise ValueError("weighted_sum scalarization needs at least one weight vector")
            points = [weighted_sum_point(vp, np.asarray(w, dtype=float), cfg) for w in scal.weights]
            kept = nondominated_filter(points)
            kept.sort(key=lambda q: float(q.objectives[0]))
            objs = np.array([q.objectives for q in kept])
            front = ParetoFront(
                points=kept,
                ideal=objs.min(axis=0),
                nadir_estimate=objs.max(axis=0),
                meta={"n_subproblems": len(scal.weights), "n_skipped": 0},
            )
        else:
            raise ValueError(f"unknown scalarization kind: {scal.kind}")
    except InfeasibleProblemError as exc:
        logger.warning("front computation found no feasible point: %s", exc)
        M = p.n_objectives
        return ParetoFront(
            points=[],
            ideal=np.full(M, np.nan),
            nadir_estimate=np.full(M, np.nan),
            meta={"diagnostic": str(exc)},
        )
    if not front.points:
        front.meta.setdefault("diagnostic", "every scalarized subproblem was infeasible")
        logger.warning("empty front: %s", front.meta["diagnostic"])
    for point in front.points:
        _annotate_point(asm, point)
    return front


def sensitivity_scatter(p: Problem, ss: ScenarioSet, point: ParetoPoint) -> tuple[ScenarioTable, ScatterStats]:
    """Objective rows of one front point under every scenario, plus spread.

    Nominal and rmo points reuse their single WSV vector for all scenarios;
    maro points use the per-scenario WSV stored on the point.
    """
    hnv_names = [v.name for v in p.hnv]
    wsv_names = [v.name for v in p.wsv]
    x = np.array([point.annotations["hnv"][nm] for nm in hnv_names], dtype=float)
    wsv = point.annotations["wsv"]
    if isinstance(wsv, Mapping):
        y = np.array([wsv[nm] for nm in wsv_names], dtype=float)
        ys = [y] * len(ss)
    else:
        ys = [np.array([row[nm] for nm in wsv_names], dtype=float) for row in wsv]
    table = _scenario_table(p, ss, x, ys)
    return table, _scatter_stats(table)


def _interp_front(front_points: Sequence[ParetoPoint], at: float, known: int) -> float:
    """Linear interpolation of a two-objective front, clamped at its ends.

    ``known`` is the objective index whose value ``at`` is given; returns the
    interpolated value of the other objective.
    """
    arr = np.array([q.objectives for q in front_points], dtype=float)
    order = np.argsort(arr[:, known])
    xs = arr[order, known]
    vals = arr[order, 1 - known]
    return float(np.interp(at, xs, vals))


def cost_of_robustness(
    p: Problem,
    ss: ScenarioSet,
    point: ParetoPoint,
    nominal_front: ParetoFront,
) -> CostOfRobustness:
    """Nominal-scenario objectives of a robust point and gaps to the nominal front."""
    table = point.annotations.get("scenario_table")
    if table is None:
        table, _ = sensitivity_scatter(p, ss, point)
    nominal_objs = table.rows[ss.nominal_index].objectives
    gaps: np.ndarray | None = None
    if p.n_objectives == 2 and nominal_front.points:
        gaps = np.array(
            [
                float(nominal_objs[m]) - _interp_front(nominal_front.points, float(nominal_objs[1 - m]), 1 - m)
                for m in range(2)
            ]
        )
    return CostOfRobustness(nominal_objectives=nominal_objs, gaps=gaps)


def worstcase_over_subset(table: ScenarioTable, scenario_ids: Sequence[int]) -> np.ndarray:
    """Componentwise maximum of the stored rows over a scenario subset.

    For maro points this is an upper bound on the true subset worst case,
    which would re-optimize the per-scenario WSV.
    """
    ids = list(scenario_ids)
    if not ids:
        raise ValueError("scenario subset must not be empty")
    known = {r.scenario_id: r for r in table.rows}
    unknown = [i for i in ids if i not in known]
    if unknown:
        raise ValueError(f"unknown scenario ids: {unknown}")
    return np.max([known[i].objectives for i in ids], axis=0)
