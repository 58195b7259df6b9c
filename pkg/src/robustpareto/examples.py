"""Built-in example problems: a trigonometric toy and a distillation surrogate.

The toy problem has one decision ``t`` on ``[0, pi/2]`` and one additive
uncertain shift ``u``; its front is a quarter circle in objective space,
which makes every engine property checkable in closed form.

The column surrogate mimics the cost/feasibility structure of a binary
distillation design task: five sizing decisions (stages, feed stage,
diameter, reboiler and condenser areas), two operating decisions (reflux
ratio, specific reboiler duty), and three uncertain parameters (column load,
feed mass fraction of the light boiler, and an activity-coefficient
prefactor). Minimum-reflux and stage-requirement constraints couple the
operating point to the uncertainty; capacity and heat-exchanger constraints
size the equipment. Constants are frozen in ``COLUMN_CONSTANTS`` and can be
overridden for what-if studies; they are calibrated for plausibility, not to
reproduce any particular plant.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .nlp import halton_points
from .problem import (
    Problem,
    ScenarioSet,
    UncertainParam,
    VariableKind,
    VariableSpec,
    validate_problem,
)

__all__ = [
    "toy",
    "column",
    "feasibility_probe",
    "ProbeResult",
    "get_problem",
    "problem_ids",
    "problem_descriptors",
    "UnknownProblemError",
    "COLUMN_CONSTANTS",
    "COLUMN_BOUNDS",
    "COLUMN_UNCERTAIN",
]


class UnknownProblemError(ValueError):
    def __init__(self, pid: str, valid: Sequence[str]):
        super().__init__(f"unknown problem id {pid!r}; valid ids: {', '.join(valid)}")
        self.valid_ids = list(valid)


def toy(kind: VariableKind | str = VariableKind.HNV) -> Problem:
    """Toy problem: minimize ``(1 - cos t + u, 1 - sin t - u)`` on ``t in [0, pi/2]``.

    ``kind`` selects whether ``t`` is a here-and-now or wait-and-see
    variable; evaluations are identical either way.
    """
    kind = VariableKind(kind)

    if kind == VariableKind.HNV:
        pick = lambda x, y: x[..., 0]
    else:
        pick = lambda x, y: y[..., 0]

    def f1(x, y, u):
        return 1.0 - np.cos(pick(x, y)) + u["u"]

    def f2(x, y, u):
        return 1.0 - np.sin(pick(x, y)) - u["u"]

    return Problem(
        name="toy",
        variables=(VariableSpec("t", kind, 0.0, np.pi / 2),),
        uncertain=(UncertainParam("u", 0.0, -0.1, 0.1),),
        objectives=(f1, f2),
        objective_names=("f1", "f2"),
        vectorized=True,
    )


COLUMN_BOUNDS: dict[str, tuple[float, float]] = {
    "N": (10.0, 150.0),
    "N_f": (3.0, 40.0),
    "D": (0.8, 2.0),
    "A_r": (50.0, 1000.0),
    "A_c": (50.0, 1000.0),
    "R_V": (0.5, 2.0),
    "Q_r": (0.0625, 0.375),
}

COLUMN_UNCERTAIN: dict[str, tuple[float, float, float]] = {
    # name: (lower, nominal, upper)
    "l": (0.6, 1.0, 1.2),
    "w_MF": (0.78, 0.8, 0.82),
    "F12": (0.9, 1.0, 1.1),
}

COLUMN_CONSTANTS: dict[str, float] = {
    "rmin_base": 0.5,        # minimum reflux at nominal activity and feed
    "rmin_w_gain": 2.0,      # sensitivity of R_min to the feed mass fraction
    "reflux_margin": 0.05,   # required operating margin above R_min
    "stage_base": 8.0,       # stage-requirement scale
    "stage_w_gain": 5.0,     # sensitivity of the stage requirement to w_MF
    "feed_gain": 1.2,        # efficiency loss for off-optimum feed location
    "feed_opt": 0.15,        # optimal feed-stage fraction N_f / N
    "capacity_coeff": 2.0,   # vapor-capacity coefficient on D^2
    "duty_coeff": 0.1,       # specific duty demanded per unit boilup
    "mass_rate": 8000.0,     # reference feed mass flow at load 1
    "reboiler_coeff": 5.0,   # reboiler heat-transfer capacity per area
    "condenser_frac": 0.9,   # condenser load as fraction of reboiler duty
    "condenser_coeff": 4.5,  # condenser heat-transfer capacity per area
    "shell_cost": 50.0,      # shell cost per stage and D^1.5
    "shell_exp": 1.5,
    "area_cost": 10.0,       # exchanger cost per area^0.6
    "area_exp": 0.6,
    "diameter_cost": 2000.0, # foundation/internals cost on D^2
    "energy_cost": 1000.0,   # operating cost per unit duty and load
}


def column(
    *,
    constants: Mapping[str, float] | None = None,
    bounds: Mapping[str, Sequence[float]] | None = None,
) -> Problem:
    """Distillation-column surrogate with CAPEX/OPEX objectives.

    HNV: N (stages, continuous-relaxed), N_f (feed stage), D (diameter),
    A_r, A_c (exchanger areas). WSV: R_V (reflux ratio), Q_r (specific
    reboiler duty). Uncertain: l (load), w_MF (feed mass fraction), F12
    (activity-coefficient prefactor).
    """
    c = dict(COLUMN_CONSTANTS)
    if constants:
        unknown = set(constants) - set(c)
        if unknown:
            raise ValueError(f"unknown column constants: {sorted(unknown)}")
        c.update({k: float(v) for k, v in constants.items()})
    b = {k: tuple(v) for k, v in COLUMN_BOUNDS.items()}
    if bounds:
        unknown = set(bounds) - set(b)
        if unknown:
            raise ValueError(f"unknown column variables: {sorted(unknown)}")
        for k, v in bounds.items():
            lo, hi = float(v[0]), float(v[1])
            b[k] = (lo, hi)

    def rmin(u):
        return c["rmin_base"] * u["F12"] * (1.0 + c["rmin_w_gain"] * (u["w_MF"] - 0.8))

    def capex(x, y, u):
        N, D, A_r, A_c = x[..., 0], x[..., 2], x[..., 3], x[..., 4]
        return (
            c["shell_cost"] * N * D ** c["shell_exp"]
            + c["area_cost"] * (A_r ** c["area_exp"] + A_c ** c["area_exp"])
            + c["diameter_cost"] * D**2
        )

    def opex(x, y, u):
        return c["energy_cost"] * y[..., 1] * u["l"]

    def g_separability(x, y, u):
        return rmin(u) + c["reflux_margin"] - y[..., 0]

    def g_stages(x, y, u):
        # Requirement demand * (1 + 1/(R_V - R_min)) <= N_eff, multiplied
        # through by the reflux margin (R_V - R_min): polynomial in R_V with
        # no pole for solvers to cross. Equivalent wherever g_separability
        # holds, which pins R_V above R_min.
        N, N_f = x[..., 0], x[..., 1]
        margin = y[..., 0] - rmin(u)
        n_eff = N * (1.0 - c["feed_gain"] * (N_f / N - c["feed_opt"]) ** 2)
        demand = c["stage_base"] * u["F12"] * (1.0 + c["stage_w_gain"] * (u["w_MF"] - 0.8))
        return demand * (margin + 1.0) - n_eff * margin

    def g_capacity(x, y, u):
        return u["l"] * (1.0 + y[..., 0]) - c["capacity_coeff"] * x[..., 2] ** 2

    def g_duty(x, y, u):
        return c["duty_coeff"] * (1.0 + y[..., 0]) - y[..., 1]

    def g_reboiler_area(x, y, u):
        return y[..., 1] * u["l"] * c["mass_rate"] - c["reboiler_coeff"] * x[..., 3]

    def g_condenser_area(x, y, u):
        return c["condenser_frac"] * y[..., 1] * u["l"] * c["mass_rate"] - c["condenser_coeff"] * x[..., 4]

    variables = (
        VariableSpec("N", VariableKind.HNV, *b["N"]),
        VariableSpec("N_f", VariableKind.HNV, *b["N_f"]),
        VariableSpec("D", VariableKind.HNV, *b["D"]),
        VariableSpec("A_r", VariableKind.HNV, *b["A_r"]),
        VariableSpec("A_c", VariableKind.HNV, *b["A_c"]),
        VariableSpec("R_V", VariableKind.WSV, *b["R_V"]),
        VariableSpec("Q_r", VariableKind.WSV, *b["Q_r"]),
    )
    uncertain = tuple(
        UncertainParam(name, nominal=vals[1], lower=vals[0], upper=vals[2]) for name, vals in COLUMN_UNCERTAIN.items()
    )
    return Problem(
        name="column",
        variables=variables,
        uncertain=uncertain,
        objectives=(capex, opex),
        constraints=(g_separability, g_stages, g_capacity, g_duty, g_reboiler_area, g_condenser_area),
        objective_names=("CAPEX", "OPEX"),
        vectorized=True,
    )


@dataclass(frozen=True)
class ProbeResult:
    fraction_feasible: float
    witness: np.ndarray | None
    n_samples: int


def feasibility_probe(
    p: Problem,
    ss: ScenarioSet,
    n_samples: int,
    *,
    seed: int = 0,
    points: Sequence[Sequence[float]] | None = None,
) -> ProbeResult:
    """Fraction of decision-box samples feasible under every scenario.

    Samples are seeded Halton points over the full ``(x, y)`` box unless
    explicit ``points`` are given. The witness is the first feasible sample.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    x_lo, x_hi = p.box(VariableKind.HNV)
    y_lo, y_hi = p.box(VariableKind.WSV)
    lo = np.concatenate([x_lo, y_lo])
    hi = np.concatenate([x_hi, y_hi])
    if points is None:
        samples = np.array(halton_points(lo, hi, n_samples, seed))
    else:
        samples = np.atleast_2d(np.asarray(points, dtype=float))
    nx = x_lo.size
    X, Y = samples[:, :nx], samples[:, nx:]
    feasible = np.ones(len(samples), dtype=bool)
    for s in ss.scenarios:
        for g in p.constraints:
            if p.vectorized:
                vals = np.asarray(g(X, Y, s.values), dtype=float).reshape(len(samples))
            else:
                vals = np.array([float(g(X[i], Y[i], s.values)) for i in range(len(samples))])
            feasible &= vals <= 0.0
    idx = np.nonzero(feasible)[0]
    witness = samples[idx[0]] if idx.size else None
    return ProbeResult(
        fraction_feasible=float(feasible.mean()),
        witness=witness,
        n_samples=len(samples),
    )


def _build_toy(overrides: Mapping | None) -> Problem:
    overrides = dict(overrides or {})
    kind = overrides.pop("kind", "hnv")
    if overrides:
        raise ValueError(f"unknown toy overrides: {sorted(overrides)}")
    return toy(kind)


def _build_column(overrides: Mapping | None) -> Problem:
    overrides = dict(overrides or {})
    constants = overrides.pop("constants", None)
    bounds = overrides.pop("bounds", None)
    if overrides:
        raise ValueError(f"unknown column overrides: {sorted(overrides)}")
    return column(constants=constants, bounds=bounds)


_BUILDERS = {"toy": _build_toy, "column": _build_column}

_OVERRIDE_SCHEMAS = {
    "toy": {"kind": "hnv | wsv (default hnv): treat t as here-and-now or wait-and-see"},
    "column": {
        "constants": "partial map of surrogate constants (see COLUMN_CONSTANTS)",
        "bounds": "partial map of variable name -> [lower, upper]",
    },
}


def problem_ids() -> list[str]:
    return sorted(_BUILDERS)


def get_problem(pid: str, overrides: Mapping | None = None) -> Problem:
    """Build a registered problem, applying user overrides."""
    if pid not in _BUILDERS:
        raise UnknownProblemError(pid, problem_ids())
    p = _BUILDERS[pid](overrides)
    messages = validate_problem(p)
    if messages:
        raise ValueError(f"overrides produce an invalid problem: {'; '.join(messages)}")
    return p


def problem_descriptors() -> list[dict]:
    """Serializable descriptors of the built-in problems, stable order."""
    descriptors = []
    for pid in problem_ids():
        p = get_problem(pid)
        descriptors.append(
            {
                "id": pid,
                "objectives": list(p.objective_labels()),
                "variables": [
                    {"name": v.name, "kind": v.kind.value, "lower": v.lower, "upper": v.upper} for v in p.variables
                ],
                "uncertain": [
                    {"name": q.name, "nominal": q.nominal, "lower": q.lower, "upper": q.upper} for q in p.uncertain
                ],
                "overrides": _OVERRIDE_SCHEMAS[pid],
            }
        )
    return descriptors
