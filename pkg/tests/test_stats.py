"""Tests for aggregation, the Friedman test and the Nemenyi post-hoc analysis."""

import math

import numpy as np
import pandas as pd
import pytest

from qde import (
    DegenerateInput,
    EmptyCell,
    KOutOfTable,
    RunRecord,
    UnsupportedAlpha,
    aggregate_cell,
    cd_diagram_data,
    convergence_generation,
    critical_difference,
    friedman,
    nemenyi,
    summarize_cell,
)
from qde.stats import FriedmanResult

EXAMPLE = [[1, 2, 3], [0.1, 0.9, 0.5], [10, 20, 30], [5, 4, 6]]


def _record(value, generation=0, replicate=0):
    return RunRecord('E4-ESD', 1, replicate, 0, 0, 3, value, generation, 10, 'traces/E4-ESD/f1_r0.csv')


def _ranks(**mean_ranks):
    k = len(mean_ranks)
    return FriedmanResult(0.0, k, 10, 1.0, dict(mean_ranks))


def test_aggregate_cell():
    """Test median and population standard deviation."""
    assert aggregate_cell([1, 2, 3])[0] == 2.0
    assert aggregate_cell([1, 1, 1, 1]) == (1.0, 0.0)
    median, sigma = aggregate_cell([_record(v) for v in (0, 0, 1, 3)])
    assert median == 0.5
    assert sigma == pytest.approx(math.sqrt(1.5))

    with pytest.raises(EmptyCell):
        aggregate_cell([])


def test_summarize_cell():
    """Test the summary columns of one cell."""
    records = [_record(v, g, i) for i, (v, g) in enumerate([(4.0, 10), (2.0, 30), (0.0, 20)])]
    summary = summarize_cell(records)
    assert summary.runs == 3
    assert summary.mean == 2.0
    assert summary.median == 2.0
    assert summary.median_convergence_generation == 20.0


def test_convergence_generation():
    """Test the first generation after which the trace stops changing."""
    assert convergence_generation([5, 3, 3, 3]) == 1
    assert convergence_generation([2, 2, 2]) == 0
    assert convergence_generation([5, 4, 3, 2, 1]) == 4
    assert convergence_generation([5, 3.0005, 3.0002, 3.0]) == 3
    assert convergence_generation([5, 3.0005, 3.0002, 3.0], tolerance=1e-3) == 1

    with pytest.raises(ValueError):
        convergence_generation([])


def test_friedman_example():
    """Test a hand-computed Friedman statistic."""
    result = friedman(EXAMPLE, labels=['a', 'b', 'c'])
    assert result.k == 3 and result.n == 4
    assert result.mean_ranks == {'a': 1.25, 'b': 2.0, 'c': 2.75}
    assert result.statistic == pytest.approx(4.5)
    assert result.p_value == pytest.approx(math.exp(-2.25))
    assert result.f_statistic is None

    refined = friedman(EXAMPLE, iman_davenport=True)
    assert refined.f_statistic == pytest.approx(3 * 4.5 / (8 - 4.5))
    assert 0.0 <= refined.f_p_value <= 1.0
    assert refined.labels == ['0', '1', '2']


def test_friedman_ties_and_direction():
    """Test complete ties, a dominant treatment and higher-is-better ranking."""
    tied = friedman(np.ones((5, 4)))
    assert tied.statistic == 0.0
    assert tied.p_value == pytest.approx(1.0)
    assert all(rank == 2.5 for rank in tied.mean_ranks.values())
    assert cd_diagram_data(tied, nemenyi(tied)).cliques == [['0', '1', '2', '3']]

    dominant = friedman([[0, 1, 2], [0, 5, 3], [0, 2, 9], [0, 8, 1]], labels=['best', 'x', 'y'])
    assert dominant.mean_ranks['best'] == 1.0

    flipped = friedman(EXAMPLE, lower_is_better=False)
    assert list(flipped.mean_ranks.values()) == [2.75, 2.0, 1.25]


def test_friedman_rank_invariants():
    """Test rank sums and invariance under monotone transforms."""
    rng = np.random.default_rng(0)
    matrix = rng.uniform(0.0, 10.0, (12, 5))
    matrix[:, 3] = matrix[:, 1]
    result = friedman(matrix)
    assert sum(result.mean_ranks.values()) == pytest.approx(5 * 6 / 2)
    assert 0.0 <= result.p_value <= 1.0

    transformed = friedman(np.log1p(matrix) ** 3)
    assert transformed.statistic == pytest.approx(result.statistic)


def test_friedman_dataframe_and_errors():
    """Test DataFrame input and degenerate matrices."""
    frame = pd.DataFrame(EXAMPLE, columns=['x', 'y', 'z'])
    assert friedman(frame).labels == ['x', 'y', 'z']

    with pytest.raises(DegenerateInput):
        friedman([[1, 2, 3]])
    with pytest.raises(DegenerateInput):
        friedman([[1], [2]])
    with pytest.raises(DegenerateInput):
        friedman([[1, float('nan')], [2, 3]])


def test_critical_difference():
    """Test the tabulated critical difference."""
    assert critical_difference(4, 14) == pytest.approx(2.569 * math.sqrt(20 / 84))
    assert critical_difference(4, 14) == pytest.approx(1.2536, abs=1e-4)
    assert critical_difference(2, 9) == pytest.approx(1.960 * math.sqrt(1 / 9))
    assert critical_difference(13, 24, alpha=0.10) < critical_difference(13, 24, alpha=0.05)
    assert critical_difference(5, 100) < critical_difference(5, 10)

    with pytest.raises(UnsupportedAlpha):
        critical_difference(4, 14, alpha=0.01)
    with pytest.raises(KOutOfTable):
        critical_difference(21, 14)
    with pytest.raises(KOutOfTable):
        critical_difference(1, 14)


def test_nemenyi():
    """Test the pairwise significance matrix."""
    fr = _ranks(a=1.0, b=1.0, c=4.0, d=4.0)
    result = nemenyi(fr)
    cd = critical_difference(4, 10)
    assert result.critical_difference == cd
    assert not result.significant('a', 'b')
    assert result.significant('a', 'c')
    assert np.array_equal(result.pairwise_significant, result.pairwise_significant.T)
    assert not result.pairwise_significant.diagonal().any()


def test_cd_diagram_data():
    """Test ranking order and cliques."""
    fr = _ranks(a=1.0, b=4.0, c=2.0, d=1.5)
    diagram = cd_diagram_data(fr, nemenyi(fr))
    assert [label for label, _ in diagram.ranking] == ['a', 'd', 'c', 'b']
    cd = critical_difference(4, 10)
    assert 1.0 < cd < 2.0
    assert diagram.cliques == [['a', 'd', 'c'], ['b']]
    assert diagram.to_dict()['ranking'][0] == {'algorithm': 'a', 'mean_rank': 1.0}

    spread = _ranks(a=1.0, b=5.0, c=9.0)
    assert cd_diagram_data(spread, nemenyi(spread)).cliques == [['a'], ['b'], ['c']]

    close = _ranks(a=1.0, b=1.1, c=1.2)
    assert cd_diagram_data(close, nemenyi(close)).cliques == [['a', 'b', 'c']]

    with pytest.raises(ValueError):
        cd_diagram_data(close, nemenyi(_ranks(x=1.0, y=2.0, z=3.0)))
