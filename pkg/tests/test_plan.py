"""Tests for experiment plans and layered configuration."""

import pytest

from qde import ConfigError, Strategy, default_plan, parse_config
from qde.plan import default_algorithm_ids, parse_algorithm, parse_functions, resolve_settings


def _write(tmp_path, text):
    path = tmp_path / 'experiment.yaml'
    path.write_text(text)
    return str(path)


def test_default_plan():
    """Test the full default matrix."""
    plan = default_plan()
    assert len(plan.algorithms) == 13
    assert plan.algorithm_ids == default_algorithm_ids()
    assert plan.algorithm_ids[0] == 'E4-ESD'
    assert plan.algorithm_ids[-1] == 'Real-DE'
    assert plan.functions == list(range(1, 25))
    assert plan.replicates == list(range(20))
    assert len(plan.cells()) == 13 * 24 * 20
    assert plan.dimension == 3
    assert plan.engine.population_size == 30
    assert plan.engine.crossover_rate == 0.9
    assert plan.provenance['engine.population_size'] == {'value': 30, 'source': 'default'}


def test_default_scale_factors():
    """Test per-strategy defaults for alpha and beta."""
    plan = default_plan()
    assert plan.algorithm('E4-ESD').mutation.alpha == 0.5
    assert plan.algorithm('Polar-PM13').mutation.alpha == 1.0
    assert plan.algorithm('Polar-PM13').mutation.beta == 0.5
    assert plan.algorithm('Real-DE').is_baseline
    assert plan.algorithm('Real-DE').mutation.alpha == 0.5
    with pytest.raises(KeyError):
        plan.algorithm('E4-PM2')


def test_flag_overrides():
    """Test that flags win and provenance records the replaced value."""
    plan = parse_config(overrides={'engine.population_size': 50, 'tier': 'smoke', 'seeds': None})
    assert plan.engine.population_size == 50
    assert plan.provenance['engine.population_size'] == {'value': 50, 'source': 'flag', 'replaced': 30}
    assert plan.functions == [1, 8, 12, 15, 20]
    assert len(plan.cells()) == 13 * 5 * 20

    plan = parse_config(overrides={'mutation.alpha': 0.8})
    assert {alg.mutation.alpha for alg in plan.algorithms} == {0.8}


def test_file_then_flags(tmp_path):
    """Test the order defaults, file, flags."""
    path = _write(tmp_path, "seeds: 5\nengine:\n  max_generations: 50\nfunctions: UHigh\n")
    plan = parse_config(path, {'seeds': 3})
    assert plan.replicates == [0, 1, 2]
    assert plan.engine.max_generations == 50
    assert plan.functions == [10, 11, 12, 13, 14]
    assert plan.provenance['seeds'] == {'value': 3, 'source': 'flag', 'replaced': 5}
    assert plan.provenance['engine.max_generations']['source'] == 'file'


def test_config_errors_name_key_and_line(tmp_path):
    """Test diagnostics for bad values, unknown keys and broken YAML."""
    path = _write(tmp_path, "engine:\n  population_size: 40\n  crossover_rate: 2.5\n")
    with pytest.raises(ConfigError) as excinfo:
        parse_config(path)
    assert excinfo.value.key_path == 'engine.crossover_rate'
    assert excinfo.value.line == 3

    path = _write(tmp_path, "seeds: 4\nengine:\n  popsize: 40\n")
    with pytest.raises(ConfigError) as excinfo:
        parse_config(path)
    assert excinfo.value.key_path == 'engine.popsize'
    assert excinfo.value.line == 3

    path = _write(tmp_path, "engine: [1, 2\n")
    with pytest.raises(ConfigError) as excinfo:
        parse_config(path)
    assert excinfo.value.line is not None

    with pytest.raises(ConfigError):
        parse_config(str(tmp_path / 'missing.yaml'))


def test_unknown_strategy_diagnostic(tmp_path):
    """Test that an unknown strategy names the valid set."""
    path = _write(tmp_path, "algorithms:\n  - E4-ESD\n  - E4-PM2\n")
    with pytest.raises(ConfigError) as excinfo:
        parse_config(path)
    message = str(excinfo.value)
    assert excinfo.value.key_path == 'algorithms'
    assert 'PM2' in message
    for tag in ('ESD', 'EGSD', 'PM1', 'PM3', 'PM13', 'RQ'):
        assert tag in message


def test_invalid_values():
    """Test validation of individual settings."""
    for overrides in (
        {'dimension': 5},
        {'execution.jobs': 0},
        {'output.format': 'xml'},
        {'analysis.alpha': 0.01},
        {'seeds': 0},
        {'functions': '0,1'},
        {'algorithms': 'Gauss-ESD'},
        {'mutation.beta': float('nan')},
    ):
        with pytest.raises(ConfigError):
            parse_config(overrides=overrides)

    with pytest.raises(ConfigError):
        resolve_settings(overrides={'engine.popsize': 10})


def test_parse_functions():
    """Test the accepted function selectors."""
    assert parse_functions('smoke') == [1, 8, 12, 15, 20]
    assert parse_functions('all') == list(range(1, 25))
    assert parse_functions('MWeak') == [20, 21, 22, 23, 24]
    assert parse_functions('1, 3') == [1, 3]
    assert parse_functions([2, 9]) == [2, 9]
    with pytest.raises(ValueError):
        parse_functions('25')
    with pytest.raises(ValueError):
        parse_functions('1,1')


def test_parse_algorithm():
    """Test algorithm ids and the scale factor they receive."""
    settings, _, _ = resolve_settings(overrides={'mutation.beta': 0.25})
    spec = parse_algorithm('Polar-PM3', settings)
    assert spec.init == 'Polar'
    assert spec.mutation.strategy is Strategy.PM3
    assert spec.mutation.beta == 0.25
    assert parse_algorithm(' E4-EGSD ', settings).id == 'E4-EGSD'


def test_sample_config_matches_defaults():
    """Test that the shipped experiment.yaml describes the default plan."""
    from pathlib import Path

    plan = parse_config(str(Path(__file__).resolve().parent.parent / 'experiment.yaml'))
    defaults = default_plan()
    assert plan.algorithms == defaults.algorithms
    assert plan.functions == defaults.functions
    assert plan.engine == defaults.engine
    assert plan.provenance['engine.population_size']['source'] == 'file'
    assert 'replaced' not in plan.provenance['engine.population_size']
