"""
Quaternion-valued differential evolution and the real-valued DE baseline.

A D-dimensional solution is stored as D/4 quaternion blocks; D = 3 uses a
single block whose imaginary part holds the coordinates. Each generation
builds one trial per target by block-wise crossover with mutants computed
from three distinct donors, repairs it to the box, and keeps the better of
trial and target.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import (
    BOUND_POLICIES,
    DEFAULT_BOUND_POLICY,
    DEFAULT_BOUNDS,
    DEFAULT_CROSSOVER_RATE,
    DEFAULT_DIMENSION,
    DEFAULT_INIT,
    DEFAULT_MAX_GENERATIONS,
    DEFAULT_POPULATION_SIZE,
    INIT_METHODS,
    MIN_POPULATION_SIZE,
    POLAR_ANGLE_RANGE,
    Bounds,
    Objective,
    Trace,
)
from .errors import UnsupportedDimension
from .mutation import MutationSpec, Strategy, apply_mutation
from .quaternion import (
    PolarDecomposition,
    Quaternion,
    from_polar,
    random_quaternion_uniform,
    random_unit_vector3,
)

logger = logging.getLogger(__name__)


@dataclass
class Genome:
    """D/4 quaternion blocks plus the cached objective value."""

    blocks: List[Quaternion]
    fitness: Optional[float] = None


def _default_mutation() -> MutationSpec:
    return MutationSpec.default(Strategy.ESD)


@dataclass(frozen=True)
class EngineConfig:
    population_size: int = DEFAULT_POPULATION_SIZE
    crossover_rate: float = DEFAULT_CROSSOVER_RATE
    mutation: MutationSpec = field(default_factory=_default_mutation)
    init: str = DEFAULT_INIT
    max_generations: int = DEFAULT_MAX_GENERATIONS
    seed: int = 0
    dimension: int = DEFAULT_DIMENSION
    bounds: Bounds = DEFAULT_BOUNDS
    bound_policy: str = DEFAULT_BOUND_POLICY
    mutant_first: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'bounds', (float(self.bounds[0]), float(self.bounds[1])))
        validate_config(self)

    def to_dict(self) -> Dict[str, object]:
        return {
            'population_size': self.population_size,
            'crossover_rate': self.crossover_rate,
            'mutation': self.mutation.to_dict(),
            'init': self.init,
            'max_generations': self.max_generations,
            'seed': self.seed,
            'dimension': self.dimension,
            'bounds': list(self.bounds),
            'bound_policy': self.bound_policy,
            'mutant_first': self.mutant_first,
        }


@dataclass
class RunTrace:
    """Best fitness after initialization (index 0) and after every generation."""

    best_fitness_per_generation: Trace
    best_genome: Optional[Genome]
    evaluations: int
    best_x: np.ndarray

    @property
    def final_fitness(self) -> float:
        return self.best_fitness_per_generation[-1]

    @property
    def generations(self) -> int:
        return len(self.best_fitness_per_generation) - 1


def validate_config(cfg: EngineConfig) -> None:
    """
    Validates engine parameters.

    Raises:
        ValueError: If any parameter is out of range
    """
    if cfg.population_size < MIN_POPULATION_SIZE:
        raise ValueError(f"Population size must be at least {MIN_POPULATION_SIZE}, got {cfg.population_size}")

    if not 0.0 <= cfg.crossover_rate <= 1.0:
        raise ValueError(f"Crossover rate must be in [0, 1], got {cfg.crossover_rate}")

    if cfg.init not in INIT_METHODS:
        raise ValueError(f"Initialization must be one of {INIT_METHODS}, got {cfg.init!r}")

    if cfg.max_generations < 0:
        raise ValueError(f"Generation budget must be >= 0, got {cfg.max_generations}")

    if cfg.dimension < 1:
        raise ValueError(f"Dimension must be >= 1, got {cfg.dimension}")

    lo, hi = cfg.bounds
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError(f"Bounds must satisfy lo < hi, got {cfg.bounds}")

    if cfg.bound_policy not in BOUND_POLICIES:
        raise ValueError(f"Bound policy must be one of {BOUND_POLICIES}, got {cfg.bound_policy!r}")


def block_count(dimension: int) -> int:
    """
    Number of quaternion blocks for a problem dimension.

    Raises:
        UnsupportedDimension: If dimension is neither 3 nor a multiple of 4
    """
    if dimension == 3:
        return 1
    if dimension >= 4 and dimension % 4 == 0:
        return dimension // 4
    raise UnsupportedDimension(f"Dimension must be 3 or a multiple of 4, got {dimension}")


def encode(x: Sequence[float]) -> List[Quaternion]:
    """
    Splits a real vector into quaternion blocks.

    D = 3 becomes one pure quaternion (0, x1, x2, x3); D = 4k becomes k
    consecutive (w, x, y, z) blocks.
    """
    values = [float(v) for v in x]
    block_count(len(values))
    if len(values) == 3:
        return [Quaternion.pure(values)]
    return [Quaternion.from_array(values[k:k + 4]) for k in range(0, len(values), 4)]


def decode(blocks: Sequence[Quaternion], dimension: int) -> np.ndarray:
    """Inverse of encode; for D = 3 only the imaginary part is read."""
    if block_count(dimension) != len(blocks):
        raise UnsupportedDimension(f"{len(blocks)} blocks cannot hold dimension {dimension}")
    if dimension == 3:
        return np.array(blocks[0].imag, dtype=float)
    return np.array([c for q in blocks for c in q.as_tuple()], dtype=float)


def with_coordinates(blocks: Sequence[Quaternion], x: np.ndarray, dimension: int) -> List[Quaternion]:
    """Writes coordinates back into blocks, keeping the real part when D = 3."""
    if dimension == 3:
        return [Quaternion(blocks[0].w, x[0], x[1], x[2])]
    return encode(x)


def repair_bounds(x: np.ndarray, cfg: EngineConfig) -> np.ndarray:
    """
    Brings a point back into the box.

    clamp moves each coordinate to the nearest bound; reflect folds the
    overshoot back inside. In-bounds coordinates are returned unchanged.
    """
    x = np.asarray(x, dtype=float)
    lo, hi = cfg.bounds
    if cfg.bound_policy == 'clamp':
        return np.clip(x, lo, hi)

    width = hi - lo
    folded = np.mod(x - lo, 2.0 * width)
    folded = lo + np.where(folded > width, 2.0 * width - folded, folded)
    inside = (x >= lo) & (x <= hi)
    return np.where(inside, x, folded)


def _repaired(blocks: List[Quaternion], cfg: EngineConfig) -> Genome:
    x = decode(blocks, cfg.dimension)
    fixed = repair_bounds(x, cfg)
    if np.array_equal(fixed, x):
        return Genome(blocks)
    return Genome(with_coordinates(blocks, fixed, cfg.dimension))


def _init_block(cfg: EngineConfig, rng: np.random.Generator) -> Quaternion:
    if cfg.init == 'E4':
        lo, hi = cfg.bounds
        return random_quaternion_uniform(rng, lo, hi)
    angle = rng.uniform(*POLAR_ANGLE_RANGE)
    return from_polar(PolarDecomposition(1.0, angle, random_unit_vector3(rng)))


def init_population(cfg: EngineConfig, rng: np.random.Generator) -> List[Genome]:
    """
    Creates Np genomes with E4 (uniform components over the bounds) or Polar
    (unit quaternions with angle uniform in [-2pi, 2pi] and a random axis).
    Fitness is left unset.
    """
    n_blocks = block_count(cfg.dimension)
    population = []
    for _ in range(cfg.population_size):
        blocks = [_init_block(cfg, rng) for _ in range(n_blocks)]
        population.append(_repaired(blocks, cfg))
    return population


def evaluate_genome(genome: Genome, cfg: EngineConfig, objective: Objective) -> float:
    genome.fitness = float(objective(decode(genome.blocks, cfg.dimension)))
    return genome.fitness


def evaluate_population(population: List[Genome], cfg: EngineConfig, objective: Objective) -> int:
    """Evaluates every genome and returns the number of objective calls."""
    for genome in population:
        evaluate_genome(genome, cfg, objective)
    return len(population)


def best_of(population: Sequence[Genome]) -> Genome:
    """Lowest fitness; the first one wins ties."""
    return min(population, key=lambda genome: genome.fitness)


def _pick_donors(rng: np.random.Generator, size: int, target: int) -> Tuple[int, int, int]:
    candidates = np.delete(np.arange(size), target)
    r0, r1, r2 = rng.choice(candidates, size=3, replace=False)
    return int(r0), int(r1), int(r2)


def _trial_blocks(
    population: List[Genome],
    target: int,
    cfg: EngineConfig,
    rng: np.random.Generator
) -> List[Quaternion]:
    n_blocks = len(population[target].blocks)
    r0, r1, r2 = _pick_donors(rng, len(population), target)
    j_rand = int(rng.integers(n_blocks))

    def mutant(j: int) -> Quaternion:
        return apply_mutation(
            cfg.mutation,
            population[r0].blocks[j],
            population[r1].blocks[j],
            population[r2].blocks[j],
            rng,
        )

    target_blocks = population[target].blocks
    if cfg.mutant_first:
        mutants = [mutant(j) for j in range(n_blocks)]
        trial = []
        for j in range(n_blocks):
            crossover = rng.random() < cfg.crossover_rate
            trial.append(mutants[j] if crossover or j == j_rand else target_blocks[j])
        return trial

    trial = []
    for j in range(n_blocks):
        crossover = rng.random() < cfg.crossover_rate
        trial.append(mutant(j) if crossover or j == j_rand else target_blocks[j])
    return trial


def evolve_generation(
    population: List[Genome],
    cfg: EngineConfig,
    objective: Objective,
    rng: np.random.Generator
) -> List[Genome]:
    """
    One generation: every target gets a trial built from the current
    population, the trial is repaired and evaluated, and it replaces the
    target when its fitness is lower or equal. Uses exactly Np evaluations.

    Raises:
        ValueError: If the population size does not match cfg or a genome has no fitness
    """
    if len(population) != cfg.population_size:
        raise ValueError(f"Population has {len(population)} genomes, expected {cfg.population_size}")
    if any(genome.fitness is None for genome in population):
        raise ValueError("Population must be evaluated before evolving")

    next_population = []
    for i, target in enumerate(population):
        trial = _repaired(_trial_blocks(population, i, cfg, rng), cfg)
        evaluate_genome(trial, cfg, objective)
        next_population.append(trial if trial.fitness <= target.fitness else target)
    return next_population


def run(cfg: EngineConfig, objective: Objective) -> RunTrace:
    """
    Runs the quaternion-valued DE for cfg.max_generations generations.

    Returns:
        RunTrace with the initial best at index 0 and Np * (G + 1) evaluations
    """
    rng = np.random.default_rng(cfg.seed)
    population = init_population(cfg, rng)
    evaluations = evaluate_population(population, cfg, objective)
    trace = [best_of(population).fitness]

    for generation in range(1, cfg.max_generations + 1):
        population = evolve_generation(population, cfg, objective, rng)
        evaluations += cfg.population_size
        trace.append(best_of(population).fitness)
        logger.debug("generation %d best %.6e", generation, trace[-1])

    best = best_of(population)
    logger.info("%s-%s finished: best %.6e after %d evaluations",
                cfg.init, cfg.mutation.strategy, best.fitness, evaluations)
    return RunTrace(trace, best, evaluations, decode(best.blocks, cfg.dimension))


def run_real_de(cfg: EngineConfig, objective: Objective) -> RunTrace:
    """
    Classical DE/rand/1/bin on real vectors with F = cfg.mutation.alpha,
    binomial crossover with a forced coordinate and greedy selection.
    """
    rng = np.random.default_rng(cfg.seed)
    lo, hi = cfg.bounds
    size, dim = cfg.population_size, cfg.dimension
    scale = cfg.mutation.alpha

    population = rng.uniform(lo, hi, (size, dim))
    fitness = np.array([float(objective(x)) for x in population])
    evaluations = size
    trace = [float(fitness.min())]

    for generation in range(1, cfg.max_generations + 1):
        next_population = population.copy()
        next_fitness = fitness.copy()
        for i in range(size):
            r0, r1, r2 = _pick_donors(rng, size, i)
            mutant = population[r0] + scale * (population[r1] - population[r2])
            mask = rng.random(dim) < cfg.crossover_rate
            mask[rng.integers(dim)] = True
            trial = repair_bounds(np.where(mask, mutant, population[i]), cfg)
            trial_fitness = float(objective(trial))
            if trial_fitness <= fitness[i]:
                next_population[i] = trial
                next_fitness[i] = trial_fitness
        population, fitness = next_population, next_fitness
        evaluations += size
        trace.append(float(fitness.min()))
        logger.debug("generation %d best %.6e", generation, trace[-1])

    best = int(np.argmin(fitness))
    best_x = population[best].copy()
    logger.info("Real-DE finished: best %.6e after %d evaluations", fitness[best], evaluations)
    try:
        genome = Genome(encode(best_x), float(fitness[best]))
    except UnsupportedDimension:
        genome = None
    return RunTrace(trace, genome, evaluations, best_x)
