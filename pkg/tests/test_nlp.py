import numpy as np
import pytest

from robustpareto import NlpProblem, SolverConfig, SolverStatus, check_kkt, multistart_solve, solve
from robustpareto.nlp import fd_gradient


def quadratic():
    return NlpProblem(
        lower=np.array([0.0]),
        upper=np.array([3.0]),
        objective=lambda z: (z[0] - 1.0) ** 2,
    )


def disk():
    return NlpProblem(
        lower=np.array([-2.0, -2.0]),
        upper=np.array([2.0, 2.0]),
        objective=lambda z: z[0] + z[1],
        inequalities=(lambda z: z[0] ** 2 + z[1] ** 2 - 1.0,),
    )


class TestSolve:
    def test_unconstrained_quadratic(self):
        r = solve(quadratic(), np.array([0.0]))
        assert r.status == SolverStatus.CONVERGED
        assert abs(r.z_star[0] - 1.0) < 1e-6
        assert abs(r.f_star) < 1e-12

    def test_disk_kkt_point(self):
        r = solve(disk(), np.array([0.0, 0.0]))
        assert r.max_violation <= 1e-8
        np.testing.assert_allclose(r.z_star, [-np.sqrt(2) / 2] * 2, atol=1e-6)
        assert abs(r.f_star + np.sqrt(2)) < 1e-6

    def test_toy_epsilon_subproblem(self):
        nlp = NlpProblem(
            lower=np.array([0.0]),
            upper=np.array([np.pi / 2]),
            objective=lambda z: 1.0 - np.sin(z[0]),
            inequalities=(lambda z: 1.0 - np.cos(z[0]) - 0.29289,),
        )
        r = solve(nlp, np.array([0.1]))
        t_star = np.arccos(1.0 - 0.29289)
        assert abs(r.z_star[0] - t_star) < 1e-6
        assert abs(r.f_star - (1.0 - np.sin(t_star))) < 1e-6

    def test_box_respected_exactly(self):
        nlp = NlpProblem(lower=np.array([0.5]), upper=np.array([2.0]), objective=lambda z: z[0] ** 2)
        r = solve(nlp, np.array([1.0]))
        assert r.z_star[0] >= 0.5
        assert r.z_star[0] == 0.5

    def test_deterministic(self):
        a = solve(disk(), np.array([1.0, -1.0]))
        b = solve(disk(), np.array([1.0, -1.0]))
        assert np.array_equal(a.z_star, b.z_star)
        assert a.f_star == b.f_star

    def test_infeasible_status(self):
        nlp = NlpProblem(
            lower=np.array([0.0]),
            upper=np.array([1.0]),
            objective=lambda z: z[0],
            inequalities=(lambda z: z[0] + 1.0,),  # never satisfiable on the box
        )
        r = solve(nlp, np.array([0.5]))
        assert r.status == SolverStatus.INFEASIBLE
        assert r.max_violation > 1e-8


class TestMultistart:
    def test_cos5_global(self):
        nlp = NlpProblem(lower=np.array([0.0]), upper=np.array([3.0]), objective=lambda z: np.cos(5 * z[0]))
        r = multistart_solve(nlp)
        assert abs(r.f_star + 1.0) < 1e-6

    def test_convex_matches_single_solve(self):
        cfg = SolverConfig()
        multi = multistart_solve(quadratic(), cfg)
        single = solve(quadratic(), np.array([2.5]), cfg)
        assert abs(multi.f_star - single.f_star) <= cfg.opt_tol

    def test_same_seed_bit_identical(self):
        nlp = NlpProblem(lower=np.array([0.0]), upper=np.array([3.0]), objective=lambda z: np.cos(5 * z[0]))
        a = multistart_solve(nlp, SolverConfig(seed=7))
        b = multistart_solve(nlp, SolverConfig(seed=7))
        assert np.array_equal(a.z_star, b.z_star)
        assert a.f_star == b.f_star

    def test_infeasible_everywhere(self):
        nlp = NlpProblem(
            lower=np.array([0.0]),
            upper=np.array([1.0]),
            objective=lambda z: z[0],
            inequalities=(lambda z: z[0] + 0.5,),
        )
        r = multistart_solve(nlp)
        assert r.status == SolverStatus.INFEASIBLE

    @pytest.mark.parametrize(
        "objective,inequalities",
        [
            (lambda z: np.cos(5 * z[0]), ()),
            (lambda z: (z[0] - 1.0) ** 2, ()),
            (lambda z: np.sin(z[0]) + 0.5 * z[0], (lambda z: np.cos(z[0]) - 0.5,)),
        ],
    )
    def test_grid_oracle_bound(self, objective, inequalities):
        cfg = SolverConfig()
        nlp = NlpProblem(lower=np.array([0.0]), upper=np.array([3.0]), objective=objective, inequalities=inequalities)
        r = multistart_solve(nlp, cfg)
        grid = np.linspace(0.0, 3.0, 10_001)
        values = np.array([objective(np.array([t])) for t in grid])
        feasible = np.ones_like(grid, dtype=bool)
        for g in inequalities:
            feasible &= np.array([g(np.array([t])) for t in grid]) <= cfg.feas_tol
        assert r.f_star <= values[feasible].min() + 1e-4


class TestCheckKkt:
    def test_converged_point_passes(self):
        cfg = SolverConfig()
        r = solve(disk(), np.array([0.0, 0.0]), cfg)
        viol, stat = check_kkt(disk(), r.z_star, cfg)
        assert viol <= cfg.feas_tol
        assert stat <= cfg.opt_tol

    def test_interior_non_stationary(self):
        viol, stat = check_kkt(quadratic(), np.array([0.0]))
        assert viol == 0.0
        assert abs(stat - 2.0) < 1e-6

    def test_infeasible_point(self):
        viol, stat = check_kkt(disk(), np.array([2.0, 2.0]))
        assert viol == 7.0

    def test_converged_status_invariant(self):
        cfg = SolverConfig()
        for start in ([0.0, 0.0], [1.5, -1.0], [-2.0, 2.0]):
            r = solve(disk(), np.array(start), cfg)
            if r.status == SolverStatus.CONVERGED:
                assert r.max_violation <= cfg.feas_tol
                assert r.stationarity_residual <= cfg.opt_tol


def test_fd_matches_analytic_gradient():
    rng = np.random.default_rng(3)

    def f(z):
        return z[0] ** 3 + 2.0 * z[0] * z[1] + np.exp(z[1])

    def grad(z):
        return np.array([3 * z[0] ** 2 + 2 * z[1], 2 * z[0] + np.exp(z[1])])

    for _ in range(20):
        z = rng.uniform(-1.5, 1.5, size=2)
        g_fd = fd_gradient(f, z, 1e-6)
        g_an = grad(z)
        assert np.abs(g_fd - g_an).max() <= 1e-4 * max(1.0, np.abs(g_an).max())


def test_analytic_gradients_used():
    calls = {"grad": 0}

    def grad(z):
        calls["grad"] += 1
        return np.array([2.0 * (z[0] - 1.0)])

    nlp = NlpProblem(
        lower=np.array([0.0]),
        upper=np.array([3.0]),
        objective=lambda z: (z[0] - 1.0) ** 2,
        objective_grad=grad,
    )
    r = solve(nlp, np.array([0.0]))
    assert calls["grad"] > 0
    assert abs(r.z_star[0] - 1.0) < 1e-6
