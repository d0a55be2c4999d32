"""
Experiment plans and their configuration.

A plan is resolved in layers: built-in defaults, then an optional YAML file,
then command-line overrides. Every resolved value keeps its source so it can
be written into the provenance of the results.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import yaml

from .benchmarks import list_functions
from .config import (
    DEFAULT_ALPHA,
    DEFAULT_BATCH_SIZE,
    DEFAULT_BOUND_POLICY,
    DEFAULT_BOUNDS,
    DEFAULT_CONVERGENCE_TOLERANCE,
    DEFAULT_CROSSOVER_RATE,
    DEFAULT_DIMENSION,
    DEFAULT_EGSD_RANGE,
    DEFAULT_ESD_ALPHA,
    DEFAULT_FORMAT,
    DEFAULT_MASTER_SEED,
    DEFAULT_MAX_GENERATIONS,
    DEFAULT_NUM_SEEDS,
    DEFAULT_OUTPUT_DIR,
    DEFAULT_POLAR_ALPHA,
    DEFAULT_POLAR_BETA,
    DEFAULT_POPULATION_SIZE,
    FORMATS,
    GROUPS,
    INIT_METHODS,
    MAX_PROCESSES,
    MIN_PROCESSES,
    NUM_FUNCTIONS,
    POLAR_STRATEGIES,
    REAL_DE_ID,
    SMOKE_TIER,
    STRATEGIES,
    TIERS,
)
from .engine import EngineConfig, block_count
from .errors import ConfigError, QDEError
from .mutation import MutationSpec, Strategy, parse_strategy
from .stats import critical_difference

logger = logging.getLogger(__name__)

DEFAULTS: Dict[str, Any] = {
    'master_seed': DEFAULT_MASTER_SEED,
    'seeds': DEFAULT_NUM_SEEDS,
    'dimension': DEFAULT_DIMENSION,
    'tier': 'full',
    'functions': None,
    'algorithms': None,
    'engine': {
        'population_size': DEFAULT_POPULATION_SIZE,
        'crossover_rate': DEFAULT_CROSSOVER_RATE,
        'max_generations': DEFAULT_MAX_GENERATIONS,
        'bounds': list(DEFAULT_BOUNDS),
        'bound_policy': DEFAULT_BOUND_POLICY,
        'mutant_first': False,
    },
    'mutation': {
        'alpha': None,
        'esd_alpha': DEFAULT_ESD_ALPHA,
        'polar_alpha': DEFAULT_POLAR_ALPHA,
        'beta': DEFAULT_POLAR_BETA,
        'egsd_range': list(DEFAULT_EGSD_RANGE),
    },
    'instances': {
        'zero_shift': False,
    },
    'output': {
        'dir': DEFAULT_OUTPUT_DIR,
        'format': DEFAULT_FORMAT,
    },
    'execution': {
        'jobs': MIN_PROCESSES,
        'batch_size': DEFAULT_BATCH_SIZE,
    },
    'analysis': {
        'alpha': DEFAULT_ALPHA,
        'convergence_tolerance': DEFAULT_CONVERGENCE_TOLERANCE,
    },
}


@dataclass(frozen=True)
class AlgorithmSpec:
    """One row of the result tables: an initialization with a mutation, or the real-valued baseline."""

    id: str
    init: Optional[str]
    mutation: MutationSpec

    @property
    def is_baseline(self) -> bool:
        return self.init is None

    def to_dict(self) -> Dict[str, object]:
        return {'id': self.id, 'init': self.init, 'mutation': self.mutation.to_dict()}


@dataclass(frozen=True)
class ExperimentPlan:
    algorithms: List[AlgorithmSpec]
    functions: List[int]
    replicates: List[int]
    master_seed: int
    engine: EngineConfig
    output_dir: str = DEFAULT_OUTPUT_DIR
    output_format: str = DEFAULT_FORMAT
    zero_shift: bool = False
    jobs: int = MIN_PROCESSES
    batch_size: int = DEFAULT_BATCH_SIZE
    alpha: float = DEFAULT_ALPHA
    convergence_tolerance: float = DEFAULT_CONVERGENCE_TOLERANCE
    provenance: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.engine.dimension

    @property
    def algorithm_ids(self) -> List[str]:
        return [alg.id for alg in self.algorithms]

    def algorithm(self, algorithm_id: str) -> AlgorithmSpec:
        for alg in self.algorithms:
            if alg.id == algorithm_id:
                return alg
        raise KeyError(f"Algorithm {algorithm_id!r} is not part of the plan")

    def engine_config(self, algorithm: AlgorithmSpec, seed: int) -> EngineConfig:
        return EngineConfig(
            population_size=self.engine.population_size,
            crossover_rate=self.engine.crossover_rate,
            mutation=algorithm.mutation,
            init=algorithm.init or self.engine.init,
            max_generations=self.engine.max_generations,
            seed=seed,
            dimension=self.engine.dimension,
            bounds=self.engine.bounds,
            bound_policy=self.engine.bound_policy,
            mutant_first=self.engine.mutant_first,
        )

    def cells(self) -> List[Tuple[str, int, int]]:
        """(algorithm, function, replicate) triples in table order."""
        return [
            (alg.id, fid, rep)
            for alg in self.algorithms
            for fid in self.functions
            for rep in self.replicates
        ]

    def to_dict(self) -> Dict[str, object]:
        return {
            'algorithms': [alg.to_dict() for alg in self.algorithms],
            'functions': list(self.functions),
            'replicates': len(self.replicates),
            'master_seed': self.master_seed,
            'engine': {k: v for k, v in self.engine.to_dict().items() if k not in ('seed', 'mutation', 'init')},
            'zero_shift': self.zero_shift,
            'alpha': self.alpha,
            'convergence_tolerance': self.convergence_tolerance,
        }


def default_algorithm_ids() -> List[str]:
    """The twelve init x strategy combinations followed by the real-valued baseline."""
    return [f"{init}-{strategy}" for init in INIT_METHODS for strategy in STRATEGIES] + [REAL_DE_ID]


def _flatten(tree: Mapping[str, Any], prefix: str = '') -> Dict[str, Any]:
    flat = {}
    for key, value in tree.items():
        path = f"{prefix}{key}"
        if isinstance(value, Mapping) and path in _SECTIONS:
            flat.update(_flatten(value, f"{path}."))
        else:
            flat[path] = value
    return flat


_SECTIONS = frozenset(k for k, v in DEFAULTS.items() if isinstance(v, dict))
_KNOWN_KEYS = frozenset(_flatten(DEFAULTS))


def _key_lines(node: yaml.Node, prefix: str = '') -> Dict[str, int]:
    lines = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            path = f"{prefix}{key_node.value}"
            lines[path] = key_node.start_mark.line + 1
            lines.update(_key_lines(value_node, f"{path}."))
    return lines


def load_config_file(path: Union[str, Path]) -> Tuple[Dict[str, Any], Dict[str, int]]:
    """
    Reads a YAML configuration into flat key paths with their line numbers.

    Raises:
        ConfigError: If the file cannot be parsed or contains unknown keys
    """
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")
    text = config_path.read_text()

    try:
        data = yaml.safe_load(text)
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise ConfigError(f"Invalid YAML: {e}", line=mark.line + 1 if mark else None) from None

    if data is None:
        return {}, {}
    if not isinstance(data, dict):
        raise ConfigError("Top level of the config must be a mapping", line=1)

    lines = _key_lines(node)
    for section in _SECTIONS:
        if section in data and not isinstance(data[section], dict):
            raise ConfigError("Expected a mapping", section, lines.get(section))
    values = _flatten(data)
    for key in values:
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"Unknown key; valid keys: {', '.join(sorted(_KNOWN_KEYS))}", key, lines.get(key))
    return values, lines


def resolve_settings(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None
) -> Tuple[Dict[str, Any], Dict[str, Dict[str, Any]], Dict[str, int]]:
    """
    Merges defaults, file values and overrides.

    Returns:
        Tuple (resolved values, provenance per key, line numbers of file keys)
    """
    resolved = _flatten(DEFAULTS)
    provenance = {key: {'value': value, 'source': 'default'} for key, value in resolved.items()}
    lines: Dict[str, int] = {}

    layers = []
    if config_path is not None:
        file_values, lines = load_config_file(config_path)
        layers.append(('file', file_values))
    if overrides:
        for key in overrides:
            if key not in _KNOWN_KEYS:
                raise ConfigError("Unknown override", key)
        layers.append(('flag', {k: v for k, v in overrides.items() if v is not None}))

    for source, values in layers:
        for key, value in values.items():
            entry = {'value': value, 'source': source}
            if resolved[key] != value:
                entry['replaced'] = resolved[key]
            provenance[key] = entry
            resolved[key] = value
    return resolved, provenance, lines


def parse_functions(value: Any) -> List[int]:
    """
    Accepts a list of ids, a comma-separated string, a group name, 'smoke' or 'all'.

    Raises:
        ValueError: If an id or name is not recognized
    """
    if isinstance(value, int):
        value = [value]
    if isinstance(value, str):
        text = value.strip()
        if text in ('all', 'full'):
            return list(range(1, NUM_FUNCTIONS + 1))
        if text == 'smoke':
            return list(SMOKE_TIER)
        if text in GROUPS:
            return [info.id for info in list_functions(text)]
        value = [part for part in text.split(',') if part.strip()]
    try:
        ids = [int(v) for v in value]
    except (TypeError, ValueError):
        raise ValueError(f"Functions must be ids, 'all', 'smoke' or one of {GROUPS}, got {value!r}") from None
    for fid in ids:
        if not 1 <= fid <= NUM_FUNCTIONS:
            raise ValueError(f"Function id must be in 1..{NUM_FUNCTIONS}, got {fid}")
    if len(set(ids)) != len(ids):
        raise ValueError(f"Function ids must be unique, got {ids}")
    return ids


def parse_algorithm(algorithm_id: str, settings: Mapping[str, Any]) -> AlgorithmSpec:
    """
    Turns '<Init>-<Strategy>' or 'Real-DE' into an AlgorithmSpec using the
    resolved mutation settings.

    Raises:
        ValueError: If the initialization tag is unknown
        UnknownStrategy: If the strategy tag is unknown
    """
    algorithm_id = str(algorithm_id).strip()
    override = settings['mutation.alpha']
    esd_alpha = override if override is not None else settings['mutation.esd_alpha']
    polar_alpha = override if override is not None else settings['mutation.polar_alpha']

    if algorithm_id == REAL_DE_ID:
        return AlgorithmSpec(REAL_DE_ID, None, MutationSpec(Strategy.ESD, alpha=float(esd_alpha)))

    init, _, tag = algorithm_id.partition('-')
    if init not in INIT_METHODS:
        raise ValueError(f"Unknown initialization {init!r} in {algorithm_id!r}; valid: {INIT_METHODS}")
    strategy = parse_strategy(tag)
    alpha = polar_alpha if strategy.value in POLAR_STRATEGIES else esd_alpha
    mutation = MutationSpec(
        strategy,
        alpha=float(alpha),
        beta=float(settings['mutation.beta']),
        egsd_component_range=tuple(float(v) for v in settings['mutation.egsd_range']),
    )
    return AlgorithmSpec(f"{init}-{strategy.value}", init, mutation)


def _parse_algorithms(value: Any, settings: Mapping[str, Any]) -> List[AlgorithmSpec]:
    if value is None:
        ids = default_algorithm_ids()
    elif isinstance(value, str):
        ids = [part.strip() for part in value.split(',') if part.strip()]
    else:
        ids = list(value)
    algorithms = [parse_algorithm(alg_id, settings) for alg_id in ids]
    seen = [alg.id for alg in algorithms]
    if len(set(seen)) != len(seen):
        raise ValueError(f"Algorithm ids must be unique, got {seen}")
    return algorithms


def _engine_field(name: str, value: Any) -> Any:
    # Builds a throwaway config to reuse EngineConfig validation for one field
    EngineConfig(**{name: value})
    return value


def parse_config(
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None
) -> ExperimentPlan:
    """
    Resolves an ExperimentPlan from defaults, an optional YAML file and flag overrides.

    Args:
        config_path: Path of a YAML config file
        overrides: Flat key paths such as 'engine.population_size' mapped to values;
            None values are ignored

    Raises:
        ConfigError: With the key path and line of the offending value
    """
    settings, provenance, lines = resolve_settings(config_path, overrides)

    def checked(key: str, parse):
        try:
            return parse(settings[key])
        except ConfigError:
            raise
        except (QDEError, ValueError, TypeError) as e:
            raise ConfigError(str(e), key, lines.get(key)) from None

    master_seed = checked('master_seed', int)
    num_seeds = checked('seeds', int)
    if num_seeds < 1:
        raise ConfigError("Number of seeds must be >= 1", 'seeds', lines.get('seeds'))

    def dimension_value(value):
        block_count(int(value))
        return int(value)

    dimension = checked('dimension', dimension_value)

    def tier_value(value):
        if value not in TIERS:
            raise ValueError(f"Tier must be one of {TIERS}, got {value!r}")
        return value

    tier = checked('tier', tier_value)
    if settings['functions'] is None:
        functions = list(SMOKE_TIER) if tier == 'smoke' else list(range(1, NUM_FUNCTIONS + 1))
    else:
        functions = checked('functions', parse_functions)

    for key in ('mutation.esd_alpha', 'mutation.polar_alpha', 'mutation.alpha'):
        if settings[key] is not None:
            checked(key, lambda v: MutationSpec(Strategy.ESD, alpha=float(v)))
    checked('mutation.beta', lambda v: MutationSpec(Strategy.PM3, beta=float(v)))
    checked('mutation.egsd_range', lambda v: MutationSpec(Strategy.EGSD, egsd_component_range=tuple(float(x) for x in v)))
    algorithms = checked('algorithms', lambda v: _parse_algorithms(v, settings))

    population_size = checked('engine.population_size', lambda v: _engine_field('population_size', int(v)))
    crossover_rate = checked('engine.crossover_rate', lambda v: _engine_field('crossover_rate', float(v)))
    max_generations = checked('engine.max_generations', lambda v: _engine_field('max_generations', int(v)))
    bounds = checked('engine.bounds', lambda v: _engine_field('bounds', tuple(float(x) for x in v)))
    bound_policy = checked('engine.bound_policy', lambda v: _engine_field('bound_policy', str(v)))
    engine = EngineConfig(
        population_size=population_size,
        crossover_rate=crossover_rate,
        max_generations=max_generations,
        dimension=dimension,
        bounds=bounds,
        bound_policy=bound_policy,
        mutant_first=bool(settings['engine.mutant_first']),
    )

    def format_value(value):
        if value not in FORMATS:
            raise ValueError(f"Format must be one of {FORMATS}, got {value!r}")
        return value

    def jobs_value(value):
        jobs = int(value)
        if jobs < MIN_PROCESSES or jobs > MAX_PROCESSES:
            raise ValueError(f"Number of processes must be between {MIN_PROCESSES} and {MAX_PROCESSES}")
        return jobs

    def positive_int(value):
        number = int(value)
        if number <= 0:
            raise ValueError("Value must be greater than 0")
        return number

    def significance_value(value):
        level = float(value)
        critical_difference(2, 2, level)
        return level

    def tolerance_value(value):
        tolerance = float(value)
        if tolerance < 0:
            raise ValueError("Convergence tolerance must be >= 0")
        return tolerance

    plan = ExperimentPlan(
        algorithms=algorithms,
        functions=functions,
        replicates=list(range(num_seeds)),
        master_seed=master_seed,
        engine=engine,
        output_dir=str(settings['output.dir']),
        output_format=checked('output.format', format_value),
        zero_shift=bool(settings['instances.zero_shift']),
        jobs=checked('execution.jobs', jobs_value),
        batch_size=checked('execution.batch_size', positive_int),
        alpha=checked('analysis.alpha', significance_value),
        convergence_tolerance=checked('analysis.convergence_tolerance', tolerance_value),
        provenance=provenance,
    )
    logger.info("Resolved plan: %d algorithms x %d functions x %d seeds",
                len(plan.algorithms), len(plan.functions), len(plan.replicates))
    return plan


def default_plan() -> ExperimentPlan:
    return parse_config()
