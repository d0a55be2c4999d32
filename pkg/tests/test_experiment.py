"""Tests for running the experiment matrix."""

import pytest

from qde import RunRecord, parse_config, run_matrix
from qde.experiment import make_task, run_cell
from qde.utils import append_records, load_records, load_trace


def _plan(output_dir, **extra):
    overrides = {
        'functions': '1,8',
        'algorithms': 'E4-ESD,Polar-PM3,Real-DE',
        'seeds': 2,
        'engine.population_size': 6,
        'engine.max_generations': 4,
        'output.dir': str(output_dir),
    }
    overrides.update(extra)
    return parse_config(overrides=overrides)


def _by_key(records):
    return {record.key: record for record in records}


def test_make_task_seeds():
    """Test per-cell seeds and instance seeds shared across algorithms."""
    plan = _plan('unused')
    a = make_task(plan, 'E4-ESD', 1, 0)
    b = make_task(plan, 'Real-DE', 1, 0)
    assert a.instance_seed == b.instance_seed
    assert a.seed != b.seed
    assert a.config.seed == a.seed
    assert make_task(plan, 'E4-ESD', 1, 1).instance_seed != a.instance_seed
    assert make_task(plan, 'E4-ESD', 1, 0) == a


def test_run_cell():
    """Test the record built for one cell."""
    plan = _plan('unused')
    record, trace = run_cell(make_task(plan, 'Polar-PM3', 8, 1))
    assert isinstance(record, RunRecord)
    assert record.key == ('Polar-PM3', 8, 1)
    assert record.final_fitness == trace[-1]
    assert len(trace) == 5
    assert record.evaluations == 6 * 5
    assert 0 <= record.convergence_generation < len(trace)
    assert record.trace_ref == 'traces/Polar-PM3/f8_r1.csv'


def test_run_matrix_and_resume(tmp_path):
    """Test a small matrix, its files and an idempotent rerun."""
    plan = _plan(tmp_path / 'out')
    result = run_matrix(plan, progress=False)
    assert result.new_runs == 3 * 2 * 2
    assert result.skipped == 0
    assert result.failures == []
    assert {r.key for r in result.records} == set(plan.cells())
    assert (tmp_path / 'out' / 'provenance.json').exists()

    for record in result.records:
        trace = load_trace(str(tmp_path / 'out' / record.trace_ref))
        assert trace[-1] == record.final_fitness

    again = run_matrix(plan, progress=False)
    assert again.new_runs == 0
    assert again.skipped == 12
    assert _by_key(again.records) == _by_key(result.records)


def test_deleted_cell_is_regenerated(tmp_path):
    """Test that removing one record reruns exactly that cell with the same result."""
    plan = _plan(tmp_path)
    original = _by_key(run_matrix(plan, progress=False).records)

    runs_file = tmp_path / 'runs.csv'
    dropped = ('Polar-PM3', 8, 1)
    kept = [r for r in load_records(str(runs_file)) if r.key != dropped]
    runs_file.unlink()
    append_records(kept, str(runs_file))

    result = run_matrix(plan, progress=False)
    assert result.new_runs == 1
    assert _by_key(result.records)[dropped] == original[dropped]


def test_serial_and_parallel_agree(tmp_path):
    """Test that a process pool gives the same records as a serial run."""
    serial = run_matrix(_plan(tmp_path / 'serial'), progress=False)
    parallel = run_matrix(_plan(tmp_path / 'parallel', **{'execution.jobs': 2, 'execution.batch_size': 5}),
                          progress=False)
    assert parallel.new_runs == serial.new_runs
    assert _by_key(parallel.records) == _by_key(serial.records)


def test_failed_cells_are_recorded(tmp_path, monkeypatch):
    """Test that a failing cell lands in the manifest and the others still run."""
    import qde.experiment as experiment

    real_make_instance = experiment.make_instance

    def flaky(function_id, *args, **kwargs):
        if function_id == 8:
            raise RuntimeError("instance unavailable")
        return real_make_instance(function_id, *args, **kwargs)

    monkeypatch.setattr(experiment, 'make_instance', flaky)
    result = run_matrix(_plan(tmp_path), progress=False)
    assert result.new_runs == 6
    assert len(result.failures) == 6
    assert all(fid == 8 for _, fid, _, _ in result.failures)
    assert 'RuntimeError: instance unavailable' in (tmp_path / 'failures.csv').read_text()


def test_timeout(tmp_path):
    """Test that an exhausted time budget stops the matrix."""
    with pytest.raises(TimeoutError):
        run_matrix(_plan(tmp_path), progress=False, timeout=-1.0)
