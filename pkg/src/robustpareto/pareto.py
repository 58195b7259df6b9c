"""Scalarization-driven Pareto front computation and dominance utilities.

A :class:`VectorProblem` carries each objective as a tuple of smooth
components whose pointwise maximum is the objective value; a plain smooth
objective is the one-component case. Scalarized subproblems realize the
maxima through epigraph variables, so every solver instance stays smooth.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .nlp import NlpProblem, SolverConfig, SolverResult, SolverStatus, halton_points, multistart_solve

__all__ = [
    "VectorProblem",
    "Scalarization",
    "ParetoPoint",
    "ParetoFront",
    "AnchorResult",
    "InfeasibleProblemError",
    "dominates",
    "nondominated_filter",
    "anchor_points",
    "epsilon_constraint_front",
    "weighted_sum_point",
]

logger = logging.getLogger(__name__)

_AUX_BOUND = 1e9
DOMINANCE_TOL = 1e-9
DUPLICATE_TOL = 1e-7


class InfeasibleProblemError(RuntimeError):
    """No feasible point was found for a required subproblem."""


@dataclass(frozen=True)
class VectorProblem:
    """Vector minimization over a box, objectives as max-of-components.

    ``start_transform`` optionally maps raw multistart samples onto a
    structured subset of the box (e.g. constant recourse policies) that the
    assembling engine considers good starting territory.
    """

    lower: np.ndarray
    upper: np.ndarray
    components: tuple[tuple[Callable, ...], ...]
    inequalities: tuple[Callable, ...] = ()
    components_batch: Callable[[np.ndarray], list[np.ndarray]] | None = None
    inequalities_batch: Callable[[np.ndarray], np.ndarray] | None = None
    start_transform: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        if self.n_objectives < 2:
            raise ValueError("a vector problem needs M >= 2 objectives")
        if any(len(c) == 0 for c in self.components):
            raise ValueError("every objective needs at least one component")

    @property
    def n(self) -> int:
        return self.lower.size

    @property
    def n_objectives(self) -> int:
        return len(self.components)

    def component_values(self, Z: np.ndarray) -> list[np.ndarray]:
        """Per-objective component matrices of shape ``(batch, K_m)``."""
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if self.components_batch is not None:
            return [np.asarray(c, dtype=float) for c in self.components_batch(Z)]
        out = []
        for comps in self.components:
            out.append(np.array([[float(c(z)) for c in comps] for z in Z]))
        return out

    def inequality_values(self, Z: np.ndarray) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        if not self.inequalities:
            return np.zeros((len(Z), 0))
        if self.inequalities_batch is not None:
            return np.asarray(self.inequalities_batch(Z), dtype=float).reshape(len(Z), len(self.inequalities))
        return np.array([[float(g(z)) for g in self.inequalities] for z in Z])

    def objective_values(self, z: np.ndarray) -> np.ndarray:
        comps = self.component_values(np.asarray(z, dtype=float)[None, :])
        return np.array([c[0].max() for c in comps])


@dataclass(frozen=True)
class Scalarization:
    """Record of how a point was obtained from the vector problem."""

    kind: str  # "epsilon_constraint" | "weighted_sum"
    free_index: int | None = None
    bounds: tuple[float | None, ...] | None = None
    weights: tuple[float, ...] | None = None


@dataclass
class ParetoPoint:
    decision: np.ndarray
    objectives: np.ndarray
    scalarization: Scalarization
    solver_status: SolverStatus
    annotations: dict = field(default_factory=dict)


@dataclass
class ParetoFront:
    points: list[ParetoPoint]
    ideal: np.ndarray
    nadir_estimate: np.ndarray
    meta: dict = field(default_factory=dict)


@dataclass
class AnchorResult:
    ideal: np.ndarray
    nadir_estimate: np.ndarray
    minimizers: list[np.ndarray]
    objective_table: np.ndarray  # (M, M): objective values at each anchor


def dominates(a: Sequence[float], b: Sequence[float], tol: float = 0.0) -> bool:
    """Pareto dominance: ``a <= b + tol`` everywhere and ``a < b - tol`` somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"objective vectors differ in length: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b + tol) and np.any(a < b - tol))


def _objective_array(points: Sequence) -> np.ndarray:
    rows = [p.objectives if isinstance(p, ParetoPoint) else np.asarray(p, dtype=float) for p in points]
    return np.asarray(rows, dtype=float)


def nondominated_filter(
    points: Sequence,
    tol: float = DOMINANCE_TOL,
    *,
    dup_tol: float | None = None,
    scale: np.ndarray | None = None,
) -> list:
    """Points not dominated by any other, stable order, duplicates merged.

    Accepts objective vectors or :class:`ParetoPoint` objects. Duplicate
    detection compares componentwise within ``dup_tol`` (default: ``tol``),
    optionally after dividing by ``scale``.
    """
    points = list(points)
    if not points:
        return []
    arr = _objective_array(points)
    n = len(arr)
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        others = np.delete(np.arange(n), i)
        le = np.all(arr[others] <= arr[i] + tol, axis=1)
        lt = np.any(arr[others] < arr[i] - tol, axis=1)
        if np.any(le & lt):
            keep[i] = False
    if dup_tol is None:
        dup_tol = tol
    s = np.ones(arr.shape[1]) if scale is None else np.where(np.asarray(scale, dtype=float) > 0, scale, 1.0)
    survivors: list[int] = []
    for i in np.nonzero(keep)[0]:
        duplicate = any(np.all(np.abs(arr[i] - arr[j]) / s <= dup_tol) for j in survivors)
        if not duplicate:
            survivors.append(int(i))
    return [points[i] for i in survivors]


@dataclass
class _ScalarizedNlp:
    nlp: NlpProblem
    lift: Callable[[np.ndarray], np.ndarray]
    strip: Callable[[np.ndarray], np.ndarray]


def _scalarize(vp: VectorProblem, free: int, bounds: Sequence[float | None]) -> _ScalarizedNlp:
    """Minimize objective ``free`` subject to componentwise bounds on the others.

    Objectives whose bound is ``None`` are unconstrained (used for anchors).
    The free objective gets an epigraph variable only when it has several
    components.
    """
    n = vp.n
    aux = len(vp.components[free]) > 1
    constrained = [m for m in range(vp.n_objectives) if m != free and bounds[m] is not None]

    if aux:
        lower = np.concatenate([vp.lower, [-_AUX_BOUND]])
        upper = np.concatenate([vp.upper, [_AUX_BOUND]])
        objective = lambda w: float(w[n])
        objective_grad = lambda w: np.eye(w.size)[n]
    else:
        lower, upper = vp.lower, vp.upper
        comp0 = vp.components[free][0]
        objective = lambda w: float(comp0(w))
        objective_grad = None

    ineqs: list[Callable] = []
    if aux:
        for c in vp.components[free]:
            ineqs.append(lambda w, c=c: float(c(w[:n])) - float(w[n]))
    for m in constrained:
        e = float(bounds[m])
        for c in vp.components[m]:
            ineqs.append(lambda w, c=c, e=e: float(c(w[:n] if aux else w)) - e)
    for g in vp.inequalities:
        ineqs.append(lambda w, g=g: float(g(w[:n] if aux else w)))

    def fused(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Z = W[:, :n]
        comps = vp.component_values(Z)
        blocks = []
        if aux:
            blocks.append(comps[free] - W[:, n:])
        for m in constrained:
            blocks.append(comps[m] - float(bounds[m]))
        g = vp.inequality_values(Z)
        if g.shape[1]:
            blocks.append(g)
        G = np.concatenate(blocks, axis=1) if blocks else np.zeros((len(W), 0))
        F = W[:, n] if aux else comps[free][:, 0]
        return F, G

    nlp = NlpProblem(
        lower=lower,
        upper=upper,
        objective=objective,
        inequalities=tuple(ineqs),
        objective_grad=objective_grad if aux else None,
        fused_batch=fused,
    )

    def lift(z: np.ndarray) -> np.ndarray:
        if not aux:
            return np.asarray(z, dtype=float)
        t = vp.component_values(z[None, :])[free][0].max()
        return np.concatenate([z, [t]])

    def strip(w: np.ndarray) -> np.ndarray:
        return np.asarray(w[:n], dtype=float)

    return _ScalarizedNlp(nlp=nlp, lift=lift, strip=strip)


def _scalarize_weighted(
    vp: VectorProblem,
    weights: np.ndarray,
    upper_bounds: Sequence[float | None] | None = None,
) -> _ScalarizedNlp:
    """Minimize the weighted sum of (worst-case) objectives.

    Zero-weight objectives are dropped from the sum; ``upper_bounds`` adds
    componentwise caps on selected objectives (used by the anchor polish).
    """
    n = vp.n
    M = vp.n_objectives
    caps = list(upper_bounds) if upper_bounds is not None else [None] * M
    aux_objectives = [m for m in range(M) if weights[m] > 0 and len(vp.components[m]) > 1]
    aux_col = {m: n + i for i, m in enumerate(aux_objectives)}

    lower = np.concatenate([vp.lower, np.full(len(aux_objectives), -_AUX_BOUND)])
    upper = np.concatenate([vp.upper, np.full(len(aux_objectives), _AUX_BOUND)])

    def objective(w: np.ndarray) -> float:
        total = 0.0
        for m in range(M):
            if weights[m] == 0:
                continue
            if m in aux_col:
                total += weights[m] * float(w[aux_col[m]])
            else:
                total += weights[m] * float(vp.components[m][0](w[:n]))
        return total

    ineqs: list[Callable] = []
    for m in aux_objectives:
        for c in vp.components[m]:
            ineqs.append(lambda w, c=c, m=m: float(c(w[:n])) - float(w[aux_col[m]]))
    for m in range(M):
        if caps[m] is not None:
            e = float(caps[m])
            for c in vp.components[m]:
                ineqs.append(lambda w, c=c, e=e: float(c(w[:n])) - e)
    for g in vp.inequalities:
        ineqs.append(lambda w, g=g: float(g(w[:n])))

    def fused(W: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        Z = W[:, :n]
        comps = vp.component_values(Z)
        F = np.zeros(len(W))
        blocks = []
        for m in aux_objectives:
            blocks.append(comps[m] - W[:, aux_col[m]][:, None])
        for m in range(M):
            if weights[m] == 0:
                continue
            F += weights[m] * (W[:, aux_col[m]] if m in aux_col else comps[m][:, 0])
        for m in range(M):
            if caps[m] is not None:
                blocks.append(comps[m] - float(caps[m]))
        g = vp.inequality_values(Z)
        if g.shape[1]:
            blocks.append(g)
        G = np.concatenate(blocks, axis=1) if blocks else np.zeros((len(W), 0))
        return F, G

    nlp = NlpProblem(lower=lower, upper=upper, objective=objective, inequalities=tuple(ineqs), fused_batch=fused)

    def lift(z: np.ndarray) -> np.ndarray:
        if not aux_objectives:
            return np.asarray(z, dtype=float)
        comps = vp.component_values(z[None, :])
        return np.concatenate([z, [comps[m][0].max() for m in aux_objectives]])

    def strip(w: np.ndarray) -> np.ndarray:
        return np.asarray(w[:n], dtype=float)

    return _ScalarizedNlp(nlp=nlp, lift=lift, strip=strip)


def _base_starts(vp: VectorProblem, cfg: SolverConfig) -> list[np.ndarray]:
    base = halton_points(vp.lower, vp.upper, cfg.multistart_count, cfg.seed)
    if vp.start_transform is not None:
        base = [np.asarray(vp.start_transform(z), dtype=float) for z in base]
    return base


def _solve_scalarized(
    scal: _ScalarizedNlp,
    vp: VectorProblem,
    cfg: SolverConfig,
    extra_z_starts: Sequence[np.ndarray] = (),
) -> SolverResult:
    base = _base_starts(vp, cfg)
    starts = [scal.lift(np.asarray(z, dtype=float)) for z in (*extra_z_starts, *base)]
    return multistart_solve(scal.nlp, cfg, starts=starts)


def anchor_points(vp: VectorProblem, cfg: SolverConfig = SolverConfig()) -> AnchorResult:
    """Per-objective minimizers; ideal and anchor-based nadir estimate.

    Anchor minimizers need not be unique in the remaining objectives, so
    near-optimal multistart candidates are tie-broken lexicographically: the
    candidate with the smallest sum of the other objectives wins. This keeps
    anchors usable as exact front endpoints.
    """
    from .nlp import solve  # local import to keep module header lean

    minimizers: list[np.ndarray] = []
    M = vp.n_objectives
    table = np.empty((M, M))
    unbounded: list[float | None] = [None] * M
    base = _base_starts(vp, cfg)
    for m in range(M):
        scal = _scalarize(vp, m, unbounded)
        candidates = []
        for z0 in base:
            result = solve(scal.nlp, scal.lift(np.asarray(z0, dtype=float)), cfg)
            if result.max_violation <= cfg.feas_tol:
                z = scal.strip(result.z_star)
                candidates.append((result.f_star, z, vp.objective_values(z)))
        if not candidates:
            raise InfeasibleProblemError(f"anchor solve for objective {m} found no feasible point")
        best_f = min(c[0] for c in candidates)
        band = max(10.0 * cfg.opt_tol, 1e-7 * (1.0 + abs(best_f)))
        tied = [c for c in candidates if c[0] <= best_f + band]
        _, z, objs = min(tied, key=lambda c: float(c[2].sum() - c[2][m]))
        z, objs = _polish_anchor(vp, m, scal, z, objs, cfg)
        minimizers.append(z)
        table[m] = objs
    ideal = np.array([table[m, m] for m in range(M)])
    nadir = table.max(axis=0)
    return AnchorResult(ideal=ideal, nadir_estimate=nadir, minimizers=minimizers, objective_table=table)


def _polish_anchor(
    vp: VectorProblem,
    m: int,
    anchor_scal: _ScalarizedNlp,
    z: np.ndarray,
    objs: np.ndarray,
    cfg: SolverConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Reduce the non-anchored objectives while pinning objective ``m``.

    The anchor minimizer may be arbitrary along directions objective ``m``
    ignores (max-of-components objectives leave slack replicates free). A
    loose capped solve cleans those directions, then the anchor solve is
    repeated from the cleaned point to restore exactness in objective ``m``.
    The round trip is kept only when it improves the secondary sum markedly;
    an already-clean anchor would otherwise be degraded by cap wander.
    """
    from .nlp import solve

    M = vp.n_objectives
    secondary = float(objs.sum() - objs[m])
    cap = float(objs[m]) + 1e-6 * (1.0 + abs(float(objs[m])))
    weights = np.array([0.0 if j == m else 1.0 for j in range(M)])
    caps: list[float | None] = [None] * M
    caps[m] = cap
    scal = _scalarize_weighted(vp, weights, upper_bounds=caps)
    base = _base_starts(vp, cfg)
    result = multistart_solve(scal.nlp, cfg, starts=[scal.lift(np.asarray(s, dtype=float)) for s in (z, *base)])
    # Cap solves are stiff; a loosely feasible cleaning point suffices since
    # the pinning restoration below restores exactness in objective m.
    if result.max_violation > 1e-4:
        return z, objs
    z_new = _pin_to_level(vp, m, float(objs[m]), scal.strip(result.z_star), cfg)
    objs_new = vp.objective_values(z_new)
    tol_m = 1e-6 * (1.0 + abs(float(objs[m])))
    feasible = vp.inequality_values(z_new[None, :])
    if feasible.size and feasible.max() > cfg.feas_tol:
        return z, objs
    if objs_new[m] > float(objs[m]) + tol_m:
        return z, objs
    improvement = secondary - float(objs_new.sum() - objs_new[m])
    if improvement > 1e-3 * (1.0 + abs(secondary)):
        return z_new, objs_new
    return z, objs


def _pin_to_level(vp: VectorProblem, m: int, level: float, z0: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    """Descend the squared excess of objective ``m`` above ``level`` plus the
    squared constraint violations; directions without excess stay put."""
    from .nlp import solve

    def raw(Z: np.ndarray) -> np.ndarray:
        excess = np.maximum(0.0, vp.component_values(Z)[m] - level)
        total = (excess * excess).sum(axis=1)
        g = vp.inequality_values(Z)
        if g.shape[1]:
            viol = np.maximum(0.0, g)
            total = total + (viol * viol).sum(axis=1)
        return total

    z0 = np.asarray(z0, dtype=float)
    r0 = float(raw(z0[None, :])[0])
    if r0 <= 0.0:
        return z0
    # Normalize by the starting residual; the raw values are far below the
    # solver's relative stopping tests otherwise.
    fused = lambda Z: (raw(Z) / r0, np.zeros((len(Z), 0)))
    value = lambda z: float(fused(np.asarray(z, dtype=float)[None, :])[0][0])
    nlp = NlpProblem(lower=vp.lower, upper=vp.upper, objective=value, fused_batch=fused)
    return solve(nlp, z0, cfg).z_star


def epsilon_constraint_front(
    vp: VectorProblem,
    n_points: int,
    cfg: SolverConfig = SolverConfig(),
    *,
    eps_grid: Sequence[Sequence[float]] | None = None,
) -> ParetoFront:
    """Trace the front with the epsilon-constraint method.

    For two objectives the grid spans ``[ideal_0, nadir_0]`` uniformly with
    ``n_points`` values (a single point uses the loose end, i.e. the second
    objective's anchor). With more objectives a caller-supplied ``eps_grid``
    of bound vectors for objectives ``0..M-2`` is required. Infeasible
    subproblems are skipped with a notice.
    """
    anchors = anchor_points(vp, cfg)
    M = vp.n_objectives
    free = M - 1
    if eps_grid is None:
        if M != 2:
            raise ValueError("eps_grid is required for problems with more than two objectives")
        eps_values = np.linspace(anchors.nadir_estimate[0], anchors.ideal[0], n_points)
        eps_grid = [(float(e),) for e in eps_values]
    # At eps == ideal (within solver precision) the feasible set collapses
    # onto the first anchor and the subproblem loses constraint
    # qualification; emit the anchor itself for such grid slots.
    at_ideal: Callable[[Sequence[float]], bool] = lambda eps: False
    if M == 2:
        ideal0 = float(anchors.ideal[0])
        at_ideal = lambda eps: abs(eps[0] - ideal0) <= 1e-6 * (1.0 + abs(ideal0))

    points: list[ParetoPoint] = []
    n_skipped = 0
    prev: np.ndarray | None = None
    anchor_free = anchors.minimizers[free]
    for eps in eps_grid:
        bounds: list[float | None] = [None] * M
        for m, e in enumerate(eps):
            bounds[m] = float(e)
        if at_ideal(eps):
            z = anchors.minimizers[0]
            status = SolverStatus.CONVERGED
        else:
            scal = _scalarize(vp, free, bounds)
            extra = ([prev] if prev is not None else []) + [anchor_free]
            result = _solve_scalarized(scal, vp, cfg, extra_z_starts=extra)
            if result.max_violation > cfg.feas_tol:
                n_skipped += 1
                logger.info("epsilon-constraint subproblem infeasible at bounds %s; skipped", bounds)
                continue
            z = scal.strip(result.z_star)
            prev = z
            status = result.status
        points.append(
            ParetoPoint(
                decision=z,
                objectives=vp.objective_values(z),
                scalarization=Scalarization(kind="epsilon_constraint", free_index=free, bounds=tuple(bounds)),
                solver_status=status,
            )
        )

    span = anchors.nadir_estimate - anchors.ideal
    kept = nondominated_filter(points, DOMINANCE_TOL, dup_tol=DUPLICATE_TOL, scale=span)
    kept.sort(key=lambda p: float(p.objectives[0]))
    return ParetoFront(
        points=kept,
        ideal=anchors.ideal,
        nadir_estimate=anchors.nadir_estimate,
        meta={"n_subproblems": len(eps_grid), "n_skipped": n_skipped},
    )


def weighted_sum_point(vp: VectorProblem, w: Sequence[float], cfg: SolverConfig = SolverConfig()) -> ParetoPoint:
    """Minimize the positively weighted sum of the (worst-case) objectives."""
    w = np.asarray(w, dtype=float)
    if w.shape != (vp.n_objectives,):
        raise ValueError(f"weight vector must have length {vp.n_objectives}")
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    scal = _scalarize_weighted(vp, w)
    result = _solve_scalarized(scal, vp, cfg)
    if result.max_violation > cfg.feas_tol:
        raise InfeasibleProblemError("weighted-sum solve found no feasible point")
    z = scal.strip(result.z_star)
    return ParetoPoint(
        decision=z,
        objectives=vp.objective_values(z),
        scalarization=Scalarization(kind="weighted_sum", weights=tuple(float(v) for v in w)),
        solver_status=result.status,
    )
