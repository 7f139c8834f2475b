"""Population solvers: genetic algorithm, firefly swarm, wolf-pack search.

All three share the same continuous position encoding (see encoding.py), the
same decoder/repair, and the same penalized fitness, so their update rules
are the only thing that differs. Every solver:

- is fully determined by (context, params, seed); RNG use is batched per
  iteration in a fixed order, so results do not depend on evaluation order;
- keeps an elitist incumbent, making the best-so-far trace monotone
  non-increasing;
- records a per-iteration trace and the first iteration (1-based) whose
  best-so-far value is within 1e-9 of the final best.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .encoding import DecodeContext, DecodedSolution, decode

CONVERGENCE_TOLERANCE = 1e-9
DEFAULT_POPULATION = {"ga": 50, "ffo": 25, "wo": 30}
DEFAULT_ITERATIONS = 200


@dataclass(frozen=True)
class GAParams:
    crossover_rate: float = 0.8
    mutation_rate: float = 0.05


@dataclass(frozen=True)
class FFOParams:
    beta0: float = 1.0
    gamma: float | None = None  # None -> 1 / (L^2 + T^2) for the instance
    alpha_intensity: float = 1.0
    random_scale: float = 0.1


@dataclass(frozen=True)
class WOParams:
    a_initial: float = 2.0
    jitter_rate: float = 0.05


@dataclass(frozen=True)
class SolverParams:
    population_size: int | None = None  # None -> per-algorithm default
    max_iterations: int = DEFAULT_ITERATIONS
    ga: GAParams = field(default_factory=GAParams)
    ffo: FFOParams = field(default_factory=FFOParams)
    wo: WOParams = field(default_factory=WOParams)

    @classmethod
    def from_json(cls, obj: dict) -> "SolverParams":
        return cls(
            population_size=obj.get("population_size"),
            max_iterations=obj.get("max_iterations", DEFAULT_ITERATIONS),
            ga=GAParams(**obj.get("ga", {})),
            ffo=FFOParams(**obj.get("ffo", {})),
            wo=WOParams(**obj.get("wo", {})),
        )

    def to_json(self) -> dict:
        return {
            "population_size": self.population_size,
            "max_iterations": self.max_iterations,
            "ga": {"crossover_rate": self.ga.crossover_rate, "mutation_rate": self.ga.mutation_rate},
            "ffo": {"beta0": self.ffo.beta0, "gamma": self.ffo.gamma,
                    "alpha_intensity": self.ffo.alpha_intensity,
                    "random_scale": self.ffo.random_scale},
            "wo": {"a_initial": self.wo.a_initial, "jitter_rate": self.wo.jitter_rate},
        }

    def resolve_population(self, algorithm: str) -> int:
        return self.population_size or DEFAULT_POPULATION[algorithm]


@dataclass(frozen=True)
class RunResult:
    algorithm: str
    seed: int
    best: DecodedSolution
    best_objective: float
    trace: tuple[float, ...]
    convergence_iteration: int
    iterations_run: int
    wall_time: float  # seconds; never part of deterministic reports
    backend: str = kernels.BACKEND

    @property
    def feasible(self) -> bool:
        return self.best.penalty == 0

    def to_json(self, include_timing: bool = False) -> dict:
        obj: dict = {
            "algorithm": self.algorithm,
            "seed": self.seed,
            "best_objective": self.best_objective,
            "penalty": self.best.penalty,
            "convergence_iteration": self.convergence_iteration,
            "iterations_run": self.iterations_run,
            "trace": list(self.trace),
        }
        if include_timing:
            obj["wall_time_ms"] = self.wall_time * 1000.0
        return obj


def _validate_common(params: SolverParams, pop: int, minimum_pop: int, algorithm: str):
    if pop < minimum_pop:
        raise ValueError(f"{algorithm}: population_size must be >= {minimum_pop}, got {pop}")
    if params.max_iterations < 1:
        raise ValueError("max_iterations must be >= 1")
    for name, rate in (("crossover_rate", params.ga.crossover_rate),
                       ("mutation_rate", params.ga.mutation_rate),
                       ("jitter_rate", params.wo.jitter_rate)):
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {rate}")
    numeric = [params.ffo.beta0, params.ffo.alpha_intensity, params.ffo.random_scale,
               params.wo.a_initial]
    if params.ffo.gamma is not None:
        numeric.append(params.ffo.gamma)
    if not all(math.isfinite(v) for v in numeric):
        raise ValueError("solver parameters must be finite")


# ---------------------------------------------------------------------------
# Shared operators

def fitness_weights(objectives) -> np.ndarray:
    """Positive selection weights for a minimization objective.

    w = (max - objective) + eps with eps = 1e-6 * (1 + max); the smallest
    objective always gets the largest weight.
    """
    obj = np.asarray(objectives, dtype=np.float64)
    if obj.size == 0:
        raise ValueError("objectives must be non-empty")
    if not np.all(np.isfinite(obj)):
        raise ValueError("objectives must be finite")
    mx = float(obj.max())
    return (mx - obj) + 1e-6 * (1.0 + mx)


def roulette_select(weights, rng: np.random.Generator) -> int:
    """Fitness-proportional index selection (0-based)."""
    w = np.asarray(weights, dtype=np.float64)
    total = float(w.sum())
    if w.size == 0 or not math.isfinite(total) or total <= 0 or np.any(w < 0):
        raise ValueError("roulette selection requires positive finite weights")
    r = rng.random() * total
    idx = int(np.searchsorted(np.cumsum(w), r, side="right"))
    return min(idx, w.size - 1)


def crossover(parent_a, parent_b, rng: np.random.Generator):
    """One-point crossover applied independently within each half.

    Start-day genes never mix with slot genes; cut points are uniform over
    the interior positions of each half. Halves of length < 2 have no
    interior cut, so children are copies.
    """
    a = np.asarray(parent_a, dtype=np.float64)
    b = np.asarray(parent_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1 or a.size % 2:
        raise ValueError("parents must be equal-length even-sized vectors")
    h = a.size // 2
    if h < 2:
        return a.copy(), b.copy()
    c1 = int(rng.integers(1, h))
    c2 = int(rng.integers(1, h))
    child_a = np.concatenate([a[:c1], b[c1:h], a[h:h + c2], b[h + c2:]])
    child_b = np.concatenate([b[:c1], a[c1:h], b[h:h + c2], a[h + c2:]])
    return child_a, child_b


def mutate(position, rate: float, rng: np.random.Generator, bounds) -> np.ndarray:
    """Replace each gene independently (probability = rate) by a uniform draw."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"mutation rate must be in [0, 1], got {rate}")
    lower, upper = bounds
    pos = np.asarray(position, dtype=np.float64)
    mask = rng.random(pos.size) < rate
    vals = rng.uniform(lower, upper, size=pos.size)
    return np.where(mask, vals, pos)


def attractiveness(pos_i, pos_j, beta0: float, gamma: float) -> float:
    """Pairwise attraction: beta0 * exp(-gamma * distance^2)."""
    diff = np.asarray(pos_i, dtype=np.float64) - np.asarray(pos_j, dtype=np.float64)
    return beta0 * math.exp(-gamma * float(np.dot(diff, diff)))


def resolve_gamma(context: DecodeContext, params: FFOParams) -> float:
    if params.gamma is not None:
        return params.gamma
    inst = context.instance
    return 1.0 / (inst.horizon_days ** 2 + inst.slots_per_day ** 2)


def wolf_alpha_step(alpha, prey, coeff):
    """Leader exploration step: alpha - A * |prey - alpha|, componentwise."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return alpha - np.asarray(coeff, dtype=np.float64) * np.abs(np.asarray(prey) - alpha)


def wolf_pair_average(leader, follower):
    """Follower step: midpoint of the leader and the follower."""
    return (np.asarray(leader, dtype=np.float64) + np.asarray(follower, dtype=np.float64)) / 2.0


# ---------------------------------------------------------------------------
# Bookkeeping shared by the three solvers

class _Incumbent:
    """Elitist best-so-far tracking plus the monotone trace."""

    def __init__(self):
        self.objective = math.inf
        self.position: np.ndarray | None = None
        self.feasible_objective = math.inf
        self.feasible_position: np.ndarray | None = None
        self.trace: list[float] = []

    def observe(self, positions: np.ndarray, objectives: np.ndarray, penalties: np.ndarray):
        i = int(np.argmin(objectives))
        if objectives[i] < self.objective:
            self.objective = float(objectives[i])
            self.position = positions[i].copy()
        feas = penalties == 0
        if feas.any():
            masked = np.where(feas, objectives, np.inf)
            fi = int(np.argmin(masked))
            if masked[fi] < self.feasible_objective:
                self.feasible_objective = float(masked[fi])
                self.feasible_position = positions[fi].copy()
        self.trace.append(self.objective)

    @property
    def prey(self) -> np.ndarray:
        return self.feasible_position if self.feasible_position is not None else self.position

    def result(self, algorithm: str, context: DecodeContext, seed: int, started: float) -> RunResult:
        solution = decode(self.position, context)
        if solution.objective_with_penalty != self.objective:
            raise RuntimeError(
                f"non-deterministic decode: {solution.objective_with_penalty!r} "
                f"!= tracked best {self.objective!r}"
            )
        final = self.trace[-1]
        convergence = next(
            k + 1 for k, v in enumerate(self.trace) if abs(v - final) <= CONVERGENCE_TOLERANCE
        )
        return RunResult(
            algorithm=algorithm,
            seed=seed,
            best=solution,
            best_objective=self.objective,
            trace=tuple(self.trace),
            convergence_iteration=convergence,
            iterations_run=len(self.trace),
            wall_time=time.perf_counter() - started,
        )


def _init_population(rng: np.random.Generator, pop: int, context: DecodeContext) -> np.ndarray:
    return rng.uniform(context.lower, context.upper, size=(pop, context.genome_length))


# ---------------------------------------------------------------------------
# Genetic algorithm

def ga_solve(context: DecodeContext, params: SolverParams, seed: int) -> RunResult:
    """Roulette selection, per-half one-point crossover, genewise mutation,
    elitism of one."""
    started = time.perf_counter()
    pop = params.resolve_population("ga")
    _validate_common(params, pop, 2, "ga")
    rng = np.random.default_rng(seed)
    d = context.genome_length
    h = d // 2
    positions = _init_population(rng, pop, context)
    inc = _Incumbent()

    for it in range(params.max_iterations):
        objectives, penalties, _ = context.decode_population(positions)
        inc.observe(positions, objectives, penalties)
        if it == params.max_iterations - 1:
            break

        weights = fitness_weights(objectives)
        total = float(weights.sum())
        cum = np.cumsum(weights)
        n_children = pop - 1
        n_pairs = (n_children + 1) // 2
        parent_idx = np.minimum(
            np.searchsorted(cum, rng.random(2 * n_pairs) * total, side="right"), pop - 1)
        pa = positions[parent_idx[0::2]]
        pb = positions[parent_idx[1::2]]
        do_cx = rng.random(n_pairs) < params.ga.crossover_rate
        if h >= 2:
            cuts = rng.integers(1, h, size=(n_pairs, 2))
            col = np.arange(h)
            keep_day = col[None, :] < cuts[:, 0][:, None]
            keep_slot = col[None, :] < cuts[:, 1][:, None]
            keep = np.concatenate([keep_day, keep_slot], axis=1) | ~do_cx[:, None]
            child_a = np.where(keep, pa, pb)
            child_b = np.where(keep, pb, pa)
        else:
            child_a, child_b = pa.copy(), pb.copy()
        children = np.concatenate([child_a, child_b], axis=0)[:n_children]
        mask = rng.random((n_children, d)) < params.ga.mutation_rate
        vals = rng.uniform(context.lower, context.upper, size=(n_children, d))
        children = np.where(mask, vals, children)
        positions = np.ascontiguousarray(np.vstack([inc.position[None, :], children]))

    return inc.result("ga", context, seed, started)


# ---------------------------------------------------------------------------
# Firefly swarm

def ffo_solve(context: DecodeContext, params: SolverParams, seed: int) -> RunResult:
    """Brightness-driven pairwise moves with a decaying-free random component.

    Intensities start at the fitness-weight transform of the initial
    objectives and accumulate alpha * fitness each iteration (recurrence
    reading of the intensity update); the sweep itself runs in the kernel.
    """
    started = time.perf_counter()
    pop = params.resolve_population("ffo")
    _validate_common(params, pop, 1, "ffo")
    rng = np.random.default_rng(seed)
    d = context.genome_length
    gamma = resolve_gamma(context, params.ffo)
    scale = params.ffo.random_scale * (context.upper - context.lower)
    positions = _init_population(rng, pop, context)
    inc = _Incumbent()

    objectives, penalties, _ = context.decode_population(positions)
    intensity = fitness_weights(objectives).copy()
    inc.observe(positions, objectives, penalties)

    for _ in range(1, params.max_iterations):
        rand = rng.uniform(-1.0, 1.0, size=(pop, pop, d))
        kernels.ffo_sweep(positions, intensity, params.ffo.beta0, gamma, rand,
                          scale, context.lower, context.upper)
        objectives, penalties, _ = context.decode_population(positions)
        intensity = intensity + params.ffo.alpha_intensity * fitness_weights(objectives)
        inc.observe(positions, objectives, penalties)

    return inc.result("ffo", context, seed, started)


# ---------------------------------------------------------------------------
# Wolf pack

def wo_solve(context: DecodeContext, params: SolverParams, seed: int) -> RunResult:
    """Rank-based pack moves: the leader explores around the incumbent prey,
    the runner-up averages toward the leader, the rest average plus jitter.

    The step-size bound for the leader's random coefficient decays linearly
    to ~0 across iterations; omega jitter keeps the averaging moves from
    collapsing the pack (jitter_rate 0 recovers the literal contraction).
    """
    started = time.perf_counter()
    pop = params.resolve_population("wo")
    if pop < 3:
        raise ValueError(f"wo: population_size must be >= 3 (alpha/beta/omega), got {pop}")
    _validate_common(params, pop, 3, "wo")
    rng = np.random.default_rng(seed)
    d = context.genome_length
    positions = _init_population(rng, pop, context)
    inc = _Incumbent()

    objectives, penalties, _ = context.decode_population(positions)
    inc.observe(positions, objectives, penalties)

    moves = max(1, params.max_iterations - 1)
    for it in range(1, params.max_iterations):
        order = np.argsort(objectives, kind="stable")
        alpha_i, beta_i = int(order[0]), int(order[1])
        omega_rows = order[2:]
        a_t = params.wo.a_initial * (1.0 - (it - 1) / moves)

        new = positions.copy()
        coeff = rng.uniform(-a_t, a_t, size=d)
        new[alpha_i] = wolf_alpha_step(positions[alpha_i], inc.prey, coeff)
        new[beta_i] = wolf_pair_average(positions[alpha_i], positions[beta_i])
        new[omega_rows] = wolf_pair_average(positions[alpha_i][None, :], positions[omega_rows])
        jmask = rng.random((omega_rows.size, d)) < params.wo.jitter_rate
        jvals = rng.uniform(context.lower, context.upper, size=(omega_rows.size, d))
        new[omega_rows] = np.where(jmask, jvals, new[omega_rows])
        # elitism: the incumbent replaces the lowest-ranked wolf unchanged
        new[order[-1]] = inc.position
        positions = np.ascontiguousarray(np.clip(new, context.lower, context.upper))

        objectives, penalties, _ = context.decode_population(positions)
        inc.observe(positions, objectives, penalties)

    return inc.result("wo", context, seed, started)


ALGORITHMS = {"ga": ga_solve, "ffo": ffo_solve, "wo": wo_solve}


def solve(algorithm: str, context: DecodeContext, params: SolverParams, seed: int) -> RunResult:
    """Uniform dispatch over the three population solvers."""
    try:
        solver = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {sorted(ALGORITHMS)}") from None
    return solver(context, params, seed)
