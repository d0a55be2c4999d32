"""
Configuration file for the quaternion-valued differential evolution package.
Contains constants, engine defaults, and type definitions.
"""

from typing import Callable, Final, List, Tuple

import numpy as np

VERSION: Final[str] = '0.1.0'

# Quaternion algebra
EPS_Q: Final[float] = 1e-12
UNIT_TOLERANCE: Final[float] = 1e-9
FALLBACK_AXIS: Final[Tuple[float, float, float]] = (1.0, 0.0, 0.0)

# Strategy and initialization tags
STRATEGIES: Final[Tuple[str, ...]] = ('ESD', 'EGSD', 'PM1', 'PM3', 'PM13', 'RQ')
POLAR_STRATEGIES: Final[Tuple[str, ...]] = ('PM1', 'PM3', 'PM13')
INIT_METHODS: Final[Tuple[str, ...]] = ('E4', 'Polar')
BOUND_POLICIES: Final[Tuple[str, ...]] = ('clamp', 'reflect')
REAL_DE_ID: Final[str] = 'Real-DE'

# Engine defaults (none of these are stated by the method description,
# they are reproduction assumptions and get echoed into every result file)
DEFAULT_POPULATION_SIZE: Final[int] = 30
MIN_POPULATION_SIZE: Final[int] = 4
DEFAULT_CROSSOVER_RATE: Final[float] = 0.9
DEFAULT_ESD_ALPHA: Final[float] = 0.5
DEFAULT_POLAR_ALPHA: Final[float] = 1.0
DEFAULT_POLAR_BETA: Final[float] = 0.5
DEFAULT_EGSD_RANGE: Final[Tuple[float, float]] = (0.0, 1.0)
DEFAULT_MAX_GENERATIONS: Final[int] = 100
DEFAULT_BOUNDS: Final[Tuple[float, float]] = (-5.0, 5.0)
DEFAULT_BOUND_POLICY: Final[str] = 'clamp'
DEFAULT_INIT: Final[str] = 'E4'
DEFAULT_DIMENSION: Final[int] = 3
POLAR_ANGLE_RANGE: Final[Tuple[float, float]] = (-2.0 * np.pi, 2.0 * np.pi)

# Benchmark settings
NUM_FUNCTIONS: Final[int] = 24
GROUPS: Final[Tuple[str, ...]] = ('Separable', 'ULow', 'UHigh', 'MAdequate', 'MWeak')
SMOKE_TIER: Final[Tuple[int, ...]] = (1, 8, 12, 15, 20)
XOPT_RANGE: Final[Tuple[float, float]] = (-4.0, 4.0)
WEIERSTRASS_KMAX: Final[int] = 11
KATSUURA_DIGITS: Final[int] = 32

# Experiment settings
DEFAULT_NUM_SEEDS: Final[int] = 20
DEFAULT_MASTER_SEED: Final[int] = 20250101
DEFAULT_OUTPUT_DIR: Final[str] = 'results'
DEFAULT_FORMAT: Final[str] = 'csv'
FORMATS: Final[Tuple[str, ...]] = ('csv', 'json')
TIERS: Final[Tuple[str, ...]] = ('smoke', 'full')
DEFAULT_BATCH_SIZE: Final[int] = 64
DEFAULT_CONVERGENCE_TOLERANCE: Final[float] = 0.0

# Process pool settings
MIN_PROCESSES: Final[int] = 1
MAX_PROCESSES: Final[int] = 64

# Statistics settings
DEFAULT_ALPHA: Final[float] = 0.05
HYPOTHESES: Final[Tuple[str, ...]] = (
    'all', 'per-group', 'by-mutation', 'by-initialization', 'convergence'
)
METRICS: Final[Tuple[str, ...]] = ('fitness', 'convergence')

# File settings
RUNS_FILE: Final[str] = 'runs.csv'
FAILURES_FILE: Final[str] = 'failures.csv'
TRACES_DIR: Final[str] = 'traces'
PROVENANCE_FILE: Final[str] = 'provenance.json'
RUN_HEADERS: Final[List[str]] = [
    'algorithm_id', 'function_id', 'replicate', 'seed', 'instance_seed',
    'dimension', 'final_fitness', 'convergence_generation', 'evaluations',
    'trace_ref',
]
TRACE_HEADERS: Final[List[str]] = ['generation', 'best_fitness']
FAILURE_HEADERS: Final[List[str]] = ['algorithm_id', 'function_id', 'replicate', 'error']

# Type definitions
Vector = np.ndarray
Trace = List[float]
Objective = Callable[[np.ndarray], float]
Bounds = Tuple[float, float]
