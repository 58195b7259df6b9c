"""Local solver for smooth, box- and inequality-constrained minimization.

The solver runs an augmented-Lagrangian outer loop (Powell-Hestenes-
Rockafellar form) around L-BFGS-B inner solves, so box bounds are satisfied
exactly by projection while general inequalities ``g(z) <= 0`` enter through
multiplier estimates. Gradients are central finite differences with step
``fd_step * max(1, |z_i|)`` unless analytic gradients are supplied; problems
may expose batched evaluators so one gradient costs a single vectorized call.

Stationarity is measured as the infinity norm of the projected gradient of
the Lagrangian, with multipliers re-estimated at the queried point by
nonnegative least squares over the active constraints. Evaluators must
tolerate excursions of one finite-difference step beyond the box.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize, nnls
from scipy.stats import qmc

__all__ = [
    "NlpProblem",
    "SolverConfig",
    "SolverResult",
    "SolverStatus",
    "solve",
    "multistart_solve",
    "check_kkt",
    "fd_gradient",
    "halton_points",
]

logger = logging.getLogger(__name__)

_ACTIVE_TOL = 1e-6   # inequality counts as active for multiplier estimation
_BOUND_TOL = 1e-10   # coordinate counts as sitting on its bound
_HUGE = 1e20         # finite stand-in for non-finite evaluator output
_MAX_OUTER = 30
_MU0 = 10.0
_MU_MAX = 1e12
_MU_GROWTH = 10.0
_VIOL_DECREASE = 0.25


class SolverStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets shared by all solves of a run.

    ``max_iter`` bounds each inner L-BFGS-B solve; ``seed`` drives the
    low-discrepancy multistart points and is the only randomness source.
    """

    feas_tol: float = 1e-8
    opt_tol: float = 1e-8
    max_iter: int = 500
    multistart_count: int = 8
    seed: int = 0
    fd_step: float = 1e-6

    def __post_init__(self) -> None:
        for name in ("feas_tol", "opt_tol", "fd_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("max_iter", "multistart_count"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass
class NlpProblem:
    """Scalar minimization over a box with smooth inequality constraints.

    ``objective`` and each entry of ``inequalities`` map a point ``z`` to a
    float. Optional batched evaluators accept a ``(batch, n)`` matrix:
    ``objective_batch -> (batch,)``, ``inequalities_batch -> (batch, J)``,
    and ``fused_batch -> ((batch,), (batch, J))`` which, when present, is
    preferred for augmented-Lagrangian evaluations. Optional analytic
    gradients (``objective_grad``, ``inequality_grads``) replace finite
    differences entirely.
    """

    lower: np.ndarray
    upper: np.ndarray
    objective: Callable[[np.ndarray], float]
    inequalities: tuple = ()
    objective_grad: Callable[[np.ndarray], np.ndarray] | None = None
    inequality_grads: tuple | None = None
    objective_batch: Callable[[np.ndarray], np.ndarray] | None = None
    inequalities_batch: Callable[[np.ndarray], np.ndarray] | None = None
    fused_batch: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None = None

    def __post_init__(self) -> None:
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.inequalities = tuple(self.inequalities)
        if self.lower.shape != self.upper.shape or self.lower.ndim != 1:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if not np.all(self.lower < self.upper):
            raise ValueError("box bounds require lower < upper componentwise")

    @property
    def n(self) -> int:
        return self.lower.size

    @property
    def n_ineq(self) -> int:
        return len(self.inequalities)


@dataclass
class SolverResult:
    z_star: np.ndarray
    f_star: float
    status: SolverStatus
    max_violation: float
    stationarity_residual: float
    inner_iterations: int = 0


def fd_gradient(fun: Callable[[np.ndarray], float], z: np.ndarray, step: float) -> np.ndarray:
    """Central finite-difference gradient with per-coordinate step ``step*max(1,|z_i|)``."""
    z = np.asarray(z, dtype=float)
    h = step * np.maximum(1.0, np.abs(z))
    grad = np.empty_like(z)
    for i in range(z.size):
        zp = z.copy()
        zm = z.copy()
        zp[i] += h[i]
        zm[i] -= h[i]
        grad[i] = (fun(zp) - fun(zm)) / (2.0 * h[i])
    return grad


def halton_points(lower: np.ndarray, upper: np.ndarray, count: int, seed: int) -> list[np.ndarray]:
    """Deterministic scrambled-Halton points scaled to the box."""
    engine = qmc.Halton(d=len(lower), scramble=True, seed=seed)
    sample = qmc.scale(engine.random(count), lower, upper)
    return [sample[i] for i in range(count)]


def _fd_points(z: np.ndarray, step: float) -> tuple[np.ndarray, np.ndarray]:
    n = z.size
    h = step * np.maximum(1.0, np.abs(z))
    pts = np.tile(z, (2 * n + 1, 1))
    idx = np.arange(n)
    pts[1 + 2 * idx, idx] += h
    pts[2 + 2 * idx, idx] -= h
    return pts, h


class _Funcs:
    """Batch-first evaluation of objective, constraints, and AL values.

    Holds the internal scaling used by the inner solver: variables are
    mapped to unit boxes (except effectively unbounded auxiliaries) and the
    objective is normalized by its magnitude at the start point, which keeps
    L-BFGS-B effective on badly scaled engineering models. Finite
    differences are always taken in original variables per the contract.
    """

    def __init__(self, nlp: NlpProblem, cfg: SolverConfig):
        self.nlp = nlp
        self.cfg = cfg
        self.J = nlp.n_ineq
        self.analytic = nlp.objective_grad is not None and (
            self.J == 0 or (nlp.inequality_grads is not None and len(nlp.inequality_grads) == self.J)
        )
        span = nlp.upper - nlp.lower
        moderate = span <= 1e8
        self.var_scale = np.where(moderate, span, 1.0)
        self.var_offset = np.where(moderate, nlp.lower, 0.0)
        self.f_scale = 1.0
        self.con_scale = np.ones(self.J)

    def set_scales(self, z0: np.ndarray) -> None:
        """Equalize objective and constraint curvatures seen by the inner solver.

        Scales are infinity norms of the start-point gradients mapped to the
        unit box, so one unit of any scaled quantity means a comparable move.
        """
        grad_f, jac = self.gradients(z0)
        # Scales never amplify: a vanishing start-point gradient (e.g. a
        # constraint whose gradient is zero at the start) must not blow up.
        self.f_scale = float(np.clip(np.abs(grad_f * self.var_scale).max(), 1.0, 1e12))
        if self.J:
            rows = np.abs(jac * self.var_scale[None, :]).max(axis=1)
            self.con_scale = np.clip(rows, 1.0, 1e12)

    def fused(self, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nlp = self.nlp
        if nlp.fused_batch is not None:
            f, g = nlp.fused_batch(Z)
            f = np.asarray(f, dtype=float)
            g = np.asarray(g, dtype=float).reshape(len(Z), self.J)
        else:
            if nlp.objective_batch is not None:
                f = np.asarray(nlp.objective_batch(Z), dtype=float)
            else:
                f = np.array([float(nlp.objective(z)) for z in Z])
            if self.J == 0:
                g = np.zeros((len(Z), 0))
            elif nlp.inequalities_batch is not None:
                g = np.asarray(nlp.inequalities_batch(Z), dtype=float).reshape(len(Z), self.J)
            else:
                g = np.array([[float(gj(z)) for gj in nlp.inequalities] for z in Z])
        # Evaluators may blow up off the feasible region (poles, fractional
        # powers); huge-but-finite surrogates keep line searches decreasing.
        f = np.nan_to_num(f, nan=_HUGE, posinf=_HUGE, neginf=-_HUGE)
        g = np.nan_to_num(g, nan=_HUGE, posinf=_HUGE, neginf=-_HUGE)
        return f, g

    def values(self, z: np.ndarray) -> tuple[float, np.ndarray]:
        f, g = self.fused(z[None, :])
        return float(f[0]), g[0]

    def _penalty(self, G: np.ndarray, lam: np.ndarray, mu: float) -> np.ndarray:
        if lam.size == 0:
            return np.zeros(G.shape[0])
        s = np.maximum(0.0, lam[None, :] + mu * G)
        return ((s * s).sum(axis=1) - float(lam @ lam)) / (2.0 * mu)

    def al_value_and_grad(self, z: np.ndarray, lam: np.ndarray, mu: float) -> tuple[float, np.ndarray]:
        """Scaled augmented-Lagrangian value and its gradient in ``z`` space.

        Works on ``objective / f_scale`` and ``g_j / con_scale_j``; the
        multipliers ``lam`` live in this scaled system.
        """
        if self.analytic:
            f0, g0 = self.values(z)
            g0 = g0 / self.con_scale
            val = f0 / self.f_scale + float(self._penalty(g0[None, :], lam, mu)[0])
            grad = np.asarray(self.nlp.objective_grad(z), dtype=float) / self.f_scale
            if self.J:
                s = np.maximum(0.0, lam + mu * g0)
                for j in np.nonzero(s)[0]:
                    grad = grad + (s[j] / self.con_scale[j]) * np.asarray(
                        self.nlp.inequality_grads[j](z), dtype=float
                    )
            return val, grad
        pts, h = _fd_points(z, self.cfg.fd_step)
        f, g = self.fused(pts)
        vals = f / self.f_scale + self._penalty(g / self.con_scale[None, :], lam, mu)
        grad = (vals[1::2] - vals[2::2]) / (2.0 * h)
        return float(vals[0]), grad

    def gradients(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Objective gradient and constraint Jacobian of shape (J, n)."""
        if self.analytic:
            grad_f = np.asarray(self.nlp.objective_grad(z), dtype=float)
            jac = (
                np.array([np.asarray(gj(z), dtype=float) for gj in self.nlp.inequality_grads])
                if self.J
                else np.zeros((0, z.size))
            )
            return grad_f, jac
        pts, h = _fd_points(z, self.cfg.fd_step)
        f, g = self.fused(pts)
        grad_f = (f[1::2] - f[2::2]) / (2.0 * h)
        jac = ((g[1::2] - g[2::2]) / (2.0 * h[:, None])).T
        return grad_f, jac


def _kkt(funcs: _Funcs, z: np.ndarray, cfg: SolverConfig) -> tuple[float, float]:
    nlp = funcs.nlp
    _, g0 = funcs.values(z)
    viol = float(max(0.0, g0.max())) if funcs.J else 0.0
    grad_f, jac = funcs.gradients(z)
    grad_lag = grad_f
    if funcs.J:
        lam_hat = np.zeros(funcs.J)
        active = np.where(g0 >= -_ACTIVE_TOL)[0]
        free = (z - nlp.lower > _BOUND_TOL * (1.0 + np.abs(nlp.lower))) & (
            nlp.upper - z > _BOUND_TOL * (1.0 + np.abs(nlp.upper))
        )
        if active.size and free.any():
            design = jac[active][:, free].T
            if design.size and np.abs(design).max() > 0:
                sol, _ = nnls(design, -grad_f[free])
                lam_hat[active] = sol
        grad_lag = grad_f + lam_hat @ jac
    step = np.clip(z - grad_lag, nlp.lower, nlp.upper)
    stationarity = float(np.abs(z - step).max())
    return viol, stationarity


def check_kkt(nlp: NlpProblem, z: np.ndarray, cfg: SolverConfig = SolverConfig()) -> tuple[float, float]:
    """Feasibility residual and projected-gradient stationarity residual at ``z``."""
    z = np.asarray(z, dtype=float)
    return _kkt(_Funcs(nlp, cfg), z, cfg)


def _inner(funcs: _Funcs, z0: np.ndarray, lam: np.ndarray, mu: float, cfg: SolverConfig) -> tuple[np.ndarray, int]:
    nlp = funcs.nlp
    s, off = funcs.var_scale, funcs.var_offset
    u_lower = (nlp.lower - off) / s
    u_upper = (nlp.upper - off) / s

    def scaled(u: np.ndarray) -> tuple[float, np.ndarray]:
        z = np.clip(off + s * u, nlp.lower, nlp.upper)
        value, grad = funcs.al_value_and_grad(z, lam, mu)
        return value, grad * s

    res = minimize(
        scaled,
        (z0 - off) / s,
        jac=True,
        method="L-BFGS-B",
        bounds=list(zip(u_lower, u_upper)),
        options={"maxiter": cfg.max_iter, "maxcor": 20, "ftol": 1e-14, "gtol": 1e-12, "maxls": 40},
    )
    z = np.clip(off + s * res.x, nlp.lower, nlp.upper)
    z = _snap_to_bounds(funcs, z, lam, mu, cfg)
    return z, int(res.nit)


def _snap_to_bounds(funcs: _Funcs, z: np.ndarray, lam: np.ndarray, mu: float, cfg: SolverConfig) -> np.ndarray:
    """Move almost-bound coordinates exactly onto their bound when harmless.

    L-BFGS-B stalls a finite-difference step short of bounds in flat
    valleys; the exact bound is usually the true minimizer there.
    """
    nlp = funcs.nlp
    tol = 10.0 * cfg.fd_step * np.maximum(1.0, np.abs(z))
    snapped = z.copy()
    near_lower = (z - nlp.lower > 0) & (z - nlp.lower <= tol)
    near_upper = (nlp.upper - z > 0) & (nlp.upper - z <= tol)
    snapped[near_lower] = nlp.lower[near_lower]
    snapped[near_upper] = nlp.upper[near_upper]
    if np.array_equal(snapped, z):
        return z
    both = np.stack([z, snapped])
    f, g = funcs.fused(both)
    vals = f / funcs.f_scale + funcs._penalty(g / funcs.con_scale[None, :], lam, mu)
    if vals[1] <= vals[0] + 1e-12 * (1.0 + abs(vals[0])):
        return snapped
    return z


def solve(nlp: NlpProblem, start: Sequence[float], cfg: SolverConfig = SolverConfig()) -> SolverResult:
    """Minimize from one start; box bounds hold exactly on the returned point."""
    funcs = _Funcs(nlp, cfg)
    z = np.clip(np.asarray(start, dtype=float), nlp.lower, nlp.upper)
    if z.shape != nlp.lower.shape:
        raise ValueError(f"start must have shape {nlp.lower.shape}, got {z.shape}")

    funcs.set_scales(z)

    if funcs.J == 0:
        z, nit = _inner(funcs, z, np.zeros(0), 1.0, cfg)
        viol, stat = _kkt(funcs, z, cfg)
        f0, _ = funcs.values(z)
        status = SolverStatus.CONVERGED if stat <= cfg.opt_tol else SolverStatus.MAX_ITER
        return SolverResult(z, f0, status, viol, stat, nit)

    lam = np.zeros(funcs.J)
    mu = _MU0
    prev_scaled_viol = np.inf
    best_key: tuple | None = None
    best_z = z.copy()
    total_inner = 0
    for _ in range(_MAX_OUTER):
        z, nit = _inner(funcs, z, lam, mu, cfg)
        total_inner += nit
        f0, g0 = funcs.values(z)
        viol = float(max(0.0, g0.max()))
        feasible = viol <= cfg.feas_tol
        key = (not feasible, f0 if feasible else viol)
        if best_key is None or key < best_key:
            best_key = key
            best_z = z.copy()
        if feasible:
            _, stat = _kkt(funcs, z, cfg)
            if stat <= cfg.opt_tol:
                return SolverResult(z, f0, SolverStatus.CONVERGED, viol, stat, total_inner)
        g_scaled = g0 / funcs.con_scale
        lam = np.maximum(0.0, lam + mu * g_scaled)
        scaled_viol = float(max(0.0, g_scaled.max()))
        if scaled_viol > _VIOL_DECREASE * prev_scaled_viol and viol > cfg.feas_tol:
            mu = min(mu * _MU_GROWTH, _MU_MAX)
        prev_scaled_viol = scaled_viol

    z = best_z
    viol, stat = _kkt(funcs, z, cfg)
    f0, _ = funcs.values(z)
    if viol > cfg.feas_tol:
        status = SolverStatus.INFEASIBLE
    elif stat <= cfg.opt_tol:
        status = SolverStatus.CONVERGED
    else:
        status = SolverStatus.MAX_ITER
    return SolverResult(z, f0, status, viol, stat, total_inner)


def multistart_solve(
    nlp: NlpProblem,
    cfg: SolverConfig = SolverConfig(),
    *,
    starts: Sequence[np.ndarray] | None = None,
    extra_starts: Sequence[np.ndarray] = (),
) -> SolverResult:
    """Best feasible result over deterministic quasi-random starts.

    Starts default to ``cfg.multistart_count`` seeded Halton points in the
    box; ``extra_starts`` are tried first. Ties on the objective keep the
    earliest start.
    """
    if starts is None:
        starts = halton_points(nlp.lower, nlp.upper, cfg.multistart_count, cfg.seed)
    best: SolverResult | None = None
    best_key: tuple | None = None
    for s in (*extra_starts, *starts):
        result = solve(nlp, np.asarray(s, dtype=float), cfg)
        feasible = result.max_violation <= cfg.feas_tol
        key = (not feasible, result.f_star if feasible else result.max_violation)
        if best_key is None or key < best_key:
            best, best_key = result, key
    assert best is not None
    return best
