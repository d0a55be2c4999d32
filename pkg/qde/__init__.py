"""
Quaternion-valued differential evolution with a benchmark and statistics harness.
"""

from .config import (
    VERSION,
    STRATEGIES,
    INIT_METHODS,
    REAL_DE_ID,
    GROUPS,
    SMOKE_TIER,
    Vector,
    Trace,
    Objective,
    Bounds
)
from .errors import (
    QDEError,
    NearZeroQuaternion,
    NonFiniteQuaternion,
    InvalidRange,
    UnsupportedDimension,
    UnknownFunction,
    DimensionMismatch,
    EmptyCell,
    DegenerateInput,
    UnsupportedAlpha,
    KOutOfTable,
    UnknownFormat,
    UnknownStrategy,
    IncompleteMatrix,
    ConfigError
)
from .quaternion import (
    Quaternion,
    PolarDecomposition,
    Rotation,
    hamilton_product,
    conjugate,
    norm,
    normalize,
    to_polar,
    from_polar,
    sandwich,
    rotation_between,
    random_unit_quaternion,
    random_quaternion_uniform
)
from .mutation import (
    Strategy,
    MutationSpec,
    parse_strategy,
    mutate_esd,
    mutate_egsd,
    mutate_pm1,
    mutate_pm3,
    mutate_pm13,
    mutate_rq,
    apply_mutation
)
from .engine import (
    Genome,
    EngineConfig,
    RunTrace,
    encode,
    decode,
    init_population,
    evolve_generation,
    run,
    run_real_de,
    repair_bounds
)
from .benchmarks import BenchmarkInstance, make_instance, evaluate, list_functions
from .stats import (
    RunRecord,
    FriedmanResult,
    NemenyiResult,
    aggregate_cell,
    summarize_cell,
    convergence_generation,
    friedman,
    nemenyi,
    critical_difference,
    cd_diagram_data
)
from .plan import AlgorithmSpec, ExperimentPlan, parse_config, default_plan
from .experiment import run_matrix
from .report import export_results, analyze, write_analysis

__version__ = VERSION

__all__ = [
    # Quaternion algebra
    'Quaternion',
    'PolarDecomposition',
    'Rotation',
    'hamilton_product',
    'conjugate',
    'norm',
    'normalize',
    'to_polar',
    'from_polar',
    'sandwich',
    'rotation_between',
    'random_unit_quaternion',
    'random_quaternion_uniform',

    # Mutation
    'Strategy',
    'MutationSpec',
    'parse_strategy',
    'mutate_esd',
    'mutate_egsd',
    'mutate_pm1',
    'mutate_pm3',
    'mutate_pm13',
    'mutate_rq',
    'apply_mutation',

    # Engine
    'Genome',
    'EngineConfig',
    'RunTrace',
    'encode',
    'decode',
    'init_population',
    'evolve_generation',
    'run',
    'run_real_de',
    'repair_bounds',

    # Benchmarks
    'BenchmarkInstance',
    'make_instance',
    'evaluate',
    'list_functions',

    # Statistics
    'RunRecord',
    'FriedmanResult',
    'NemenyiResult',
    'aggregate_cell',
    'summarize_cell',
    'convergence_generation',
    'friedman',
    'nemenyi',
    'critical_difference',
    'cd_diagram_data',

    # Harness
    'AlgorithmSpec',
    'ExperimentPlan',
    'parse_config',
    'default_plan',
    'run_matrix',
    'export_results',
    'analyze',
    'write_analysis',

    # Errors
    'QDEError',
    'NearZeroQuaternion',
    'NonFiniteQuaternion',
    'InvalidRange',
    'UnsupportedDimension',
    'UnknownFunction',
    'DimensionMismatch',
    'EmptyCell',
    'DegenerateInput',
    'UnsupportedAlpha',
    'KOutOfTable',
    'UnknownFormat',
    'UnknownStrategy',
    'IncompleteMatrix',
    'ConfigError',

    # Types and constants
    'Vector',
    'Trace',
    'Objective',
    'Bounds',
    'STRATEGIES',
    'INIT_METHODS',
    'REAL_DE_ID',
    'GROUPS',
    'SMOKE_TIER',
    '__version__'
]
