"""Nominal, component-wise robust, and adjustable-robust Pareto fronts.

Multicriteria design problems split their decisions into here-and-now
variables (fixed before the uncertainty realizes) and wait-and-see variables
(adjustable per scenario). This package assembles and solves the nominal,
worst-case (rmo), and adjustable-robust (maro) formulations over discrete
scenario sets, compares the resulting fronts, and serves them to an
interactive navigator.
"""

from .problem import (
    Evaluation,
    EvaluationError,
    Problem,
    Scenario,
    ScenarioSet,
    UncertainParam,
    VariableKind,
    VariableSpec,
    evaluate,
    make_explicit_scenarios,
    make_oat_scenarios,
    validate_problem,
    with_variable_kinds,
)
from .nlp import (
    NlpProblem,
    SolverConfig,
    SolverResult,
    SolverStatus,
    check_kkt,
    multistart_solve,
    solve,
)
from .pareto import (
    AnchorResult,
    InfeasibleProblemError,
    ParetoFront,
    ParetoPoint,
    Scalarization,
    VectorProblem,
    anchor_points,
    dominates,
    epsilon_constraint_front,
    nondominated_filter,
    weighted_sum_point,
)
from .robust import (
    CostOfRobustness,
    Method,
    RobustAssembly,
    ScalarizationSpec,
    ScatterStats,
    ScenarioRow,
    ScenarioTable,
    assemble,
    build_vector_problem,
    compute_front,
    cost_of_robustness,
    sensitivity_scatter,
    worstcase_over_subset,
)
from .examples import (
    ProbeResult,
    UnknownProblemError,
    column,
    feasibility_probe,
    get_problem,
    problem_descriptors,
    problem_ids,
    toy,
)
from .artifact import ConfigError, RunConfig, dumps_canonical, execute_run, load_artifact, write_artifact

__version__ = "0.1.0"
