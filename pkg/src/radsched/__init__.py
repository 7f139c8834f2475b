"""radsched: radiotherapy patient scheduling kit.

Data model, feasibility/objective evaluation, exact reference solvers, three
population metaheuristics on one shared encoding, scenario-based stochastic
evaluation, an online replay engine, and a benchmark harness with a CLI.
"""

from .constraints import (
    Violation,
    WaitingMetrics,
    check_constraints,
    offline_objective,
    online_objective,
    waiting_metrics,
)
from .encoding import DecodeContext, DecodedSolution, decode, offline_context, online_context, os_context
from .model import (
    Assignment,
    Instance,
    ModelError,
    Occupancy,
    Patient,
    Schedule,
    build_occupancy,
    sessions_of,
    validate_instance,
)
from .oracle import (
    Candidate,
    OptimalResult,
    SearchLimits,
    candidate_assignments,
    greedy_first_fit,
    solve_exact_offline,
    solve_recourse,
)
from .scenarios import GeneratorConfig, Scenario, ScenarioSet, generate_scenarios, validate_scenarios
from .solvers import (
    RunResult,
    SolverParams,
    attractiveness,
    crossover,
    ffo_solve,
    fitness_weights,
    ga_solve,
    mutate,
    roulette_select,
    solve,
    wo_solve,
)
from .stochastic import expected_recourse, os_objective

__version__ = "0.1.0"
