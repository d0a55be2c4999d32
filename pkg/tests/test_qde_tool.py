"""Tests for the command line tool."""

import pytest

import qde_tool


def _smoke_flags(out):
    return ['--tier', 'smoke', '--seeds', '2', '--np', '6', '--generations', '2',
            '--jobs', '1', '--out', str(out)]


def test_analyze_every_on_smoke_tier(tmp_path):
    """Test that every testable hypothesis is written when one group split is impossible."""
    qde_tool.main(['run', *_smoke_flags(tmp_path), '--no-progress'])
    assert (tmp_path / 'runs.csv').exists()

    qde_tool.main(['analyze', *_smoke_flags(tmp_path), '--hypothesis', 'every'])

    written = sorted(path.name for path in tmp_path.glob('analysis_*.json'))
    assert written == [
        'analysis_all.json',
        'analysis_by-initialization.json',
        'analysis_by-mutation.json',
        'analysis_convergence.json',
    ]
    assert (tmp_path / 'cd_all.csv').exists()


def test_analyze_single_degenerate_hypothesis(tmp_path):
    """Test that a hypothesis without enough data exits with the partial-result code."""
    qde_tool.main(['run', *_smoke_flags(tmp_path), '--no-progress'])

    with pytest.raises(SystemExit) as exit_info:
        qde_tool.main(['analyze', *_smoke_flags(tmp_path), '--hypothesis', 'per-group'])
    assert exit_info.value.code == qde_tool.EXIT_PARTIAL
    assert not list(tmp_path.glob('analysis_*.json'))


def test_analyze_without_runs(tmp_path):
    """Test that analyzing an empty output directory exits with the partial-result code."""
    with pytest.raises(SystemExit) as exit_info:
        qde_tool.main(['analyze', *_smoke_flags(tmp_path)])
    assert exit_info.value.code == qde_tool.EXIT_PARTIAL
