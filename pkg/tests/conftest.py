"""Shared fixtures; expensive fronts are session-scoped and reused."""

import numpy as np
import pytest

from robustpareto import (
    Method,
    ScalarizationSpec,
    SolverConfig,
    column,
    compute_front,
    make_oat_scenarios,
    toy,
)

# Column solves are the expensive part of the suite; a reduced multistart
# count keeps them tractable while the warm-start chain preserves quality.
COLUMN_CFG = SolverConfig(multistart_count=4)
COLUMN_POINTS = 7


@pytest.fixture(scope="session")
def toy_hnv():
    return toy("hnv")


@pytest.fixture(scope="session")
def toy_wsv():
    return toy("wsv")


@pytest.fixture(scope="session")
def toy_oat(toy_hnv):
    return make_oat_scenarios(toy_hnv.uncertain)


@pytest.fixture(scope="session")
def toy_nominal_front(toy_hnv, toy_oat):
    return compute_front(toy_hnv, toy_oat, Method.NOMINAL, ScalarizationSpec(n_points=11))


@pytest.fixture(scope="session")
def toy_rmo_front(toy_hnv, toy_oat):
    return compute_front(toy_hnv, toy_oat, Method.RMO, ScalarizationSpec(n_points=11))


@pytest.fixture(scope="session")
def toy_maro_front(toy_wsv, toy_oat):
    return compute_front(toy_wsv, toy_oat, Method.MARO_REPLICATION, ScalarizationSpec(n_points=21))


@pytest.fixture(scope="session")
def column_problem():
    return column()


@pytest.fixture(scope="session")
def column_oat(column_problem):
    return make_oat_scenarios(column_problem.uncertain)


@pytest.fixture(scope="session")
def column_nominal_front(column_problem, column_oat):
    return compute_front(
        column_problem, column_oat, Method.NOMINAL, ScalarizationSpec(n_points=COLUMN_POINTS), COLUMN_CFG
    )


@pytest.fixture(scope="session")
def column_rmo_front(column_problem, column_oat):
    return compute_front(
        column_problem, column_oat, Method.RMO, ScalarizationSpec(n_points=COLUMN_POINTS), COLUMN_CFG
    )


@pytest.fixture(scope="session")
def column_maro_front(column_problem, column_oat):
    return compute_front(
        column_problem,
        column_oat,
        Method.MARO_REPLICATION,
        ScalarizationSpec(n_points=COLUMN_POINTS),
        COLUMN_CFG,
    )


def toy_front_curve(f1):
    """Closed-form nominal toy front: f2 as a function of f1 on [0, 1]."""
    return 1.0 - np.sqrt(np.maximum(0.0, 1.0 - (1.0 - np.asarray(f1)) ** 2))
