"""Problem definitions: decision variables, uncertain parameters, scenarios.

A :class:`Problem` bundles smooth objective and constraint evaluators over a
box of here-and-now variables (HNV, fixed before the uncertainty realizes)
and wait-and-see variables (WSV, chosen per realized scenario), plus the
uncertain parameters whose discrete scenario assignments drive the robust
formulations.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "VariableKind",
    "VariableSpec",
    "UncertainParam",
    "Scenario",
    "ScenarioSet",
    "Problem",
    "Evaluation",
    "EvaluationError",
    "validate_problem",
    "make_oat_scenarios",
    "make_explicit_scenarios",
    "evaluate",
    "with_variable_kinds",
]

# Slack for box membership checks; solver iterates sit exactly on bounds.
_BOX_SLACK = 1e-9


class VariableKind(str, Enum):
    HNV = "hnv"
    WSV = "wsv"


class EvaluationError(RuntimeError):
    """An objective or constraint evaluator returned a non-finite value."""


@dataclass(frozen=True)
class VariableSpec:
    """One decision variable with its box bounds."""

    name: str
    kind: VariableKind
    lower: float
    upper: float


@dataclass(frozen=True)
class UncertainParam:
    """One uncertain parameter with nominal value and range."""

    name: str
    nominal: float
    lower: float
    upper: float


@dataclass(frozen=True)
class Scenario:
    """A concrete assignment of every uncertain parameter."""

    id: int
    values: Mapping[str, float]
    is_nominal: bool = False


@dataclass(frozen=True)
class ScenarioSet:
    """Ordered, finite collection of scenarios; exactly one is nominal."""

    scenarios: tuple[Scenario, ...]

    def __post_init__(self) -> None:
        n_nominal = sum(1 for s in self.scenarios if s.is_nominal)
        if n_nominal != 1:
            raise ValueError(f"scenario set must contain exactly one nominal scenario, found {n_nominal}")
        ids = [s.id for s in self.scenarios]
        if ids != list(range(len(ids))):
            raise ValueError(f"scenario ids must be dense from 0, got {ids}")

    def __len__(self) -> int:
        return len(self.scenarios)

    def __iter__(self):
        return iter(self.scenarios)

    @property
    def nominal(self) -> Scenario:
        return next(s for s in self.scenarios if s.is_nominal)

    @property
    def nominal_index(self) -> int:
        return next(i for i, s in enumerate(self.scenarios) if s.is_nominal)


Evaluator = Callable[[np.ndarray, np.ndarray, Mapping[str, float]], "float | np.ndarray"]


@dataclass(frozen=True)
class Problem:
    """A multi-objective problem over HNV/WSV boxes and uncertain parameters.

    Evaluators receive ``(x, y, u)`` where ``x`` holds the HNV values and
    ``y`` the WSV values, each in declaration order, and ``u`` maps parameter
    names to values. If ``vectorized`` is set, evaluators must also accept
    stacked inputs of shape ``(batch, n)`` and return a ``(batch,)`` array;
    the engines exploit this for batched finite differences.
    """

    name: str
    variables: tuple[VariableSpec, ...]
    uncertain: tuple[UncertainParam, ...]
    objectives: tuple[Evaluator, ...]
    constraints: tuple[Evaluator, ...] = ()
    objective_names: tuple[str, ...] | None = None
    vectorized: bool = False

    @property
    def n_objectives(self) -> int:
        return len(self.objectives)

    @property
    def hnv(self) -> tuple[VariableSpec, ...]:
        return tuple(v for v in self.variables if v.kind == VariableKind.HNV)

    @property
    def wsv(self) -> tuple[VariableSpec, ...]:
        return tuple(v for v in self.variables if v.kind == VariableKind.WSV)

    def objective_labels(self) -> tuple[str, ...]:
        if self.objective_names is not None:
            return self.objective_names
        return tuple(f"f{i + 1}" for i in range(self.n_objectives))

    def box(self, kind: VariableKind) -> tuple[np.ndarray, np.ndarray]:
        specs = self.hnv if kind == VariableKind.HNV else self.wsv
        lo = np.array([v.lower for v in specs], dtype=float)
        hi = np.array([v.upper for v in specs], dtype=float)
        return lo, hi


@dataclass(frozen=True)
class Evaluation:
    """Objective and constraint values of one decision under one scenario."""

    objectives: np.ndarray
    constraint_values: np.ndarray
    max_violation: float


def validate_problem(p: Problem) -> list[str]:
    """Check all type invariants; returns diagnostics instead of raising."""
    messages: list[str] = []
    if p.n_objectives < 2:
        messages.append("M ≥ 2 required")
    if not p.variables:
        messages.append("at least one variable required")
    seen: set[str] = set()
    for v in p.variables:
        if not v.lower < v.upper:
            messages.append(f"variable {v.name}: lower < upper violated")
        if v.name in seen:
            messages.append(f"duplicate name: {v.name}")
        seen.add(v.name)
    for q in p.uncertain:
        if not q.lower <= q.nominal <= q.upper:
            messages.append(f"uncertain parameter {q.name}: lower ≤ nominal ≤ upper violated")
        if q.name in seen:
            messages.append(f"duplicate name: {q.name}")
        seen.add(q.name)
    if p.objective_names is not None and len(p.objective_names) != p.n_objectives:
        messages.append("objective_names length must match number of objectives")
    return messages


def make_oat_scenarios(params: Sequence[UncertainParam]) -> ScenarioSet:
    """One-at-a-time scenarios: nominal plus each parameter at each bound.

    Returns ``2P + 1`` scenarios for ``P`` parameters; the nominal scenario
    has id 0, followed per parameter by its lower- and upper-bound scenario
    with all other parameters at their nominal values.
    """
    nominal = {q.name: float(q.nominal) for q in params}
    scenarios = [Scenario(0, dict(nominal), is_nominal=True)]
    for q in params:
        for bound in (q.lower, q.upper):
            values = dict(nominal)
            values[q.name] = float(bound)
            scenarios.append(Scenario(len(scenarios), values))
    return ScenarioSet(tuple(scenarios))


def make_explicit_scenarios(params: Sequence[UncertainParam], rows: Sequence[Mapping[str, float]]) -> ScenarioSet:
    """Scenario set from user-given rows, nominal prepended if absent.

    Each row must assign every parameter a value within its range; exact
    duplicates (including of the nominal assignment) are dropped, keeping
    the earliest occurrence.
    """
    by_name = {q.name: q for q in params}
    nominal = {q.name: float(q.nominal) for q in params}
    assignments: list[dict[str, float]] = [nominal]
    for i, row in enumerate(rows):
        for key in row:
            if key not in by_name:
                raise ValueError(f"unknown parameter {key} in row {i}")
        values: dict[str, float] = {}
        for q in params:
            if q.name not in row:
                raise ValueError(f"{q.name} missing in row {i}")
            v = float(row[q.name])
            if not q.lower <= v <= q.upper:
                raise ValueError(f"{q.name} out of range in row {i}")
            values[q.name] = v
        if values not in assignments:
            assignments.append(values)
    scenarios = tuple(
        Scenario(i, values, is_nominal=(i == 0)) for i, values in enumerate(assignments)
    )
    return ScenarioSet(scenarios)


def _check_box(values: np.ndarray, specs: tuple[VariableSpec, ...], label: str) -> None:
    if values.shape != (len(specs),):
        raise ValueError(f"{label} must have {len(specs)} entries, got shape {values.shape}")
    for v, spec in zip(values, specs):
        slack = _BOX_SLACK * (1.0 + abs(spec.lower) + abs(spec.upper))
        if v < spec.lower - slack or v > spec.upper + slack:
            raise ValueError(f"{label} value {v} for {spec.name} outside [{spec.lower}, {spec.upper}]")


def evaluate(p: Problem, x: Sequence[float], y: Sequence[float], s: Scenario) -> Evaluation:
    """Evaluate all objectives and constraints at ``(x, y)`` under scenario ``s``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_box(x, p.hnv, "x")
    _check_box(y, p.wsv, "y")
    objs = np.empty(p.n_objectives)
    for i, f in enumerate(p.objectives):
        val = float(f(x, y, s.values))
        if not np.isfinite(val):
            raise EvaluationError(f"objective {i} returned non-finite value at x={x.tolist()}, y={y.tolist()}, u={dict(s.values)}")
        objs[i] = val
    cons = np.empty(len(p.constraints))
    for j, g in enumerate(p.constraints):
        val = float(g(x, y, s.values))
        if not np.isfinite(val):
            raise EvaluationError(f"constraint {j} returned non-finite value at x={x.tolist()}, y={y.tolist()}, u={dict(s.values)}")
        cons[j] = val
    max_violation = float(max(0.0, cons.max())) if cons.size else 0.0
    return Evaluation(objectives=objs, constraint_values=cons, max_violation=max_violation)


def with_variable_kinds(p: Problem, kinds: Mapping[str, VariableKind | str]) -> Problem:
    """Return a copy of ``p`` with some variables reassigned between HNV and WSV.

    Evaluators are wrapped so they keep receiving ``(x, y)`` in the problem's
    original layout regardless of the new split.
    """
    new_vars = []
    for v in p.variables:
        k = kinds.get(v.name, v.kind)
        new_vars.append(replace(v, kind=VariableKind(k)))
    new_vars = tuple(new_vars)

    old_x = [v.name for v in p.variables if v.kind == VariableKind.HNV]
    old_y = [v.name for v in p.variables if v.kind == VariableKind.WSV]
    new_x = [v.name for v in new_vars if v.kind == VariableKind.HNV]
    new_y = [v.name for v in new_vars if v.kind == VariableKind.WSV]

    def locate(name: str) -> tuple[int, int]:
        return (0, new_x.index(name)) if name in new_x else (1, new_y.index(name))

    x_src = [locate(nm) for nm in old_x]
    y_src = [locate(nm) for nm in old_y]

    def gather(xn: np.ndarray, yn: np.ndarray, sources: list[tuple[int, int]]) -> np.ndarray:
        args = (xn, yn)
        if not sources:
            return np.zeros(xn.shape[:-1] + (0,))
        return np.stack([args[a][..., i] for a, i in sources], axis=-1)

    def wrap(f: Evaluator) -> Evaluator:
        def wrapped(xn, yn, u, _f=f):
            return _f(gather(xn, yn, x_src), gather(xn, yn, y_src), u)

        return wrapped

    return replace(
        p,
        variables=new_vars,
        objectives=tuple(wrap(f) for f in p.objectives),
        constraints=tuple(wrap(g) for g in p.constraints),
    )
