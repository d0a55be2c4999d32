"""
Statistics over experiment records: per-cell aggregation, convergence
generation, the Friedman rank test, the Nemenyi critical difference and the
data behind critical-difference diagrams.
"""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import stats as sps

from .config import DEFAULT_ALPHA, DEFAULT_CONVERGENCE_TOLERANCE
from .errors import DegenerateInput, EmptyCell, KOutOfTable, UnsupportedAlpha

logger = logging.getLogger(__name__)

# Studentized range at infinite degrees of freedom divided by sqrt(2), k = 2..20
Q_TABLE: Dict[float, Tuple[float, ...]] = {
    0.05: (
        1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164, 3.219,
        3.268, 3.313, 3.354, 3.391, 3.426, 3.458, 3.489, 3.517, 3.544,
    ),
    0.10: (
        1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920, 2.978,
        3.030, 3.077, 3.120, 3.159, 3.195, 3.230, 3.261, 3.291, 3.319,
    ),
}
MAX_TREATMENTS = 20


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one (algorithm, function, replicate) run."""

    algorithm_id: str
    function_id: int
    replicate: int
    seed: int
    instance_seed: int
    dimension: int
    final_fitness: float
    convergence_generation: int
    evaluations: int
    trace_ref: str

    @property
    def cell(self) -> Tuple[str, int]:
        return (self.algorithm_id, self.function_id)

    @property
    def key(self) -> Tuple[str, int, int]:
        return (self.algorithm_id, self.function_id, self.replicate)

    def as_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass(frozen=True)
class CellSummary:
    runs: int
    mean: float
    median: float
    sigma: float
    median_convergence_generation: float


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    k: int
    n: int
    p_value: float
    mean_ranks: Dict[str, float]
    f_statistic: Optional[float] = None
    f_p_value: Optional[float] = None

    @property
    def labels(self) -> List[str]:
        return list(self.mean_ranks)


@dataclass(frozen=True)
class NemenyiResult:
    critical_difference: float
    alpha: float
    labels: Tuple[str, ...]
    pairwise_significant: np.ndarray

    def significant(self, a: str, b: str) -> bool:
        return bool(self.pairwise_significant[self.labels.index(a), self.labels.index(b)])


@dataclass(frozen=True)
class CDDiagram:
    """Algorithms ordered by mean rank plus the bars joining indistinguishable ones."""

    ranking: List[Tuple[str, float]]
    cliques: List[List[str]]
    critical_difference: float
    alpha: float

    def to_dict(self) -> Dict[str, object]:
        return {
            'critical_difference': self.critical_difference,
            'alpha': self.alpha,
            'ranking': [{'algorithm': label, 'mean_rank': rank} for label, rank in self.ranking],
            'cliques': self.cliques,
        }


def _fitness_values(records: Iterable[Union[RunRecord, float]]) -> np.ndarray:
    return np.array([
        r.final_fitness if isinstance(r, RunRecord) else float(r) for r in records
    ], dtype=float)


def aggregate_cell(records: Iterable[Union[RunRecord, float]]) -> Tuple[float, float]:
    """
    Median and population standard deviation of final fitness.

    Raises:
        EmptyCell: If there are no records
    """
    values = _fitness_values(records)
    if values.size == 0:
        raise EmptyCell("Cannot aggregate a cell without records")
    return float(np.median(values)), float(np.std(values))


def summarize_cell(records: Sequence[RunRecord]) -> CellSummary:
    """Mean, median, sigma and median convergence generation of one cell."""
    median, sigma = aggregate_cell(records)
    values = _fitness_values(records)
    generations = [r.convergence_generation for r in records]
    return CellSummary(
        runs=len(values),
        mean=float(np.mean(values)),
        median=median,
        sigma=sigma,
        median_convergence_generation=float(np.median(generations)),
    )


def convergence_generation(trace: Sequence[float], tolerance: float = DEFAULT_CONVERGENCE_TOLERANCE) -> int:
    """
    Smallest g such that every later entry stays within tolerance of trace[g].

    For a non-increasing trace and tolerance 0 this is the first occurrence of
    the final value.
    """
    values = np.asarray(trace, dtype=float)
    if values.size == 0:
        raise ValueError("Trace must not be empty")

    suffix_max = np.maximum.accumulate(values[::-1])[::-1]
    suffix_min = np.minimum.accumulate(values[::-1])[::-1]
    settled = (suffix_max - values <= tolerance) & (values - suffix_min <= tolerance)
    return int(np.argmax(settled))


def _as_frame(matrix, labels: Optional[Sequence[str]]) -> pd.DataFrame:
    if isinstance(matrix, pd.DataFrame):
        frame = matrix.copy()
    else:
        frame = pd.DataFrame(np.asarray(matrix, dtype=float))
    if labels is not None:
        if len(labels) != frame.shape[1]:
            raise ValueError(f"Expected {frame.shape[1]} labels, got {len(labels)}")
        frame.columns = list(labels)
    frame.columns = [str(c) for c in frame.columns]
    return frame


def friedman(
    matrix,
    lower_is_better: bool = True,
    labels: Optional[Sequence[str]] = None,
    iman_davenport: bool = False
) -> FriedmanResult:
    """
    Friedman rank test over n blocks (rows) and k treatments (columns).

    Ranks are taken within each block with average ranks for ties. The
    statistic is 12n/(k(k+1)) * (sum of squared mean ranks - k(k+1)^2/4),
    compared with a chi-square distribution with k-1 degrees of freedom.

    Args:
        matrix: n x k array or DataFrame whose columns name the treatments
        lower_is_better: Rank 1 goes to the smallest value
        labels: Treatment names when matrix is a plain array
        iman_davenport: Also compute the F refinement of the statistic

    Raises:
        DegenerateInput: If n < 2, k < 2 or a cell is missing
    """
    frame = _as_frame(matrix, labels)
    n, k = frame.shape
    if n < 2 or k < 2:
        raise DegenerateInput(f"Friedman test needs at least 2 blocks and 2 treatments, got n={n}, k={k}")
    values = frame.to_numpy(dtype=float)
    if np.isnan(values).any():
        raise DegenerateInput("Friedman test needs a complete matrix")

    ranks = sps.rankdata(values if lower_is_better else -values, method='average', axis=1)
    mean_ranks = ranks.mean(axis=0)
    statistic = 12.0 * n / (k * (k + 1)) * (float(np.sum(mean_ranks ** 2)) - k * (k + 1) ** 2 / 4.0)
    statistic = max(statistic, 0.0)
    p_value = float(sps.chi2.sf(statistic, k - 1))

    f_statistic = f_p_value = None
    if iman_davenport:
        denominator = n * (k - 1) - statistic
        if denominator <= 0:
            f_statistic, f_p_value = math.inf, 0.0
        else:
            f_statistic = (n - 1) * statistic / denominator
            f_p_value = float(sps.f.sf(f_statistic, k - 1, (k - 1) * (n - 1)))

    logger.debug("Friedman n=%d k=%d chi2=%.4f p=%.4g", n, k, statistic, p_value)
    return FriedmanResult(
        statistic=statistic,
        k=k,
        n=n,
        p_value=p_value,
        mean_ranks={label: float(r) for label, r in zip(frame.columns, mean_ranks)},
        f_statistic=f_statistic,
        f_p_value=f_p_value,
    )


def _q_value(k: int, alpha: float) -> float:
    table = next((row for level, row in Q_TABLE.items() if math.isclose(level, alpha)), None)
    if table is None:
        raise UnsupportedAlpha(f"alpha must be one of {sorted(Q_TABLE)}, got {alpha}")
    if not 2 <= k <= MAX_TREATMENTS:
        raise KOutOfTable(f"Number of treatments must be in 2..{MAX_TREATMENTS}, got {k}")
    return table[k - 2]


def critical_difference(k: int, n: int, alpha: float = DEFAULT_ALPHA) -> float:
    """
    Nemenyi critical difference q_alpha * sqrt(k(k+1)/(6n)).

    Raises:
        UnsupportedAlpha: If alpha is not 0.05 or 0.10
        KOutOfTable: If k is outside 2..20
    """
    return _q_value(k, alpha) * math.sqrt(k * (k + 1) / (6.0 * n))


def nemenyi(fr: FriedmanResult, alpha: float = DEFAULT_ALPHA) -> NemenyiResult:
    """Pairs whose mean ranks differ by more than the critical difference."""
    cd = critical_difference(fr.k, fr.n, alpha)
    ranks = np.array(list(fr.mean_ranks.values()))
    significant = np.abs(ranks[:, None] - ranks[None, :]) > cd
    np.fill_diagonal(significant, False)
    return NemenyiResult(cd, alpha, tuple(fr.mean_ranks), significant)


def cd_diagram_data(fr: FriedmanResult, nem: NemenyiResult) -> CDDiagram:
    """
    Ranking by mean rank and the maximal runs of algorithms whose rank span
    is within the critical difference.

    Raises:
        ValueError: If the two results disagree on the treatments
    """
    if tuple(fr.mean_ranks) != nem.labels:
        raise ValueError("Friedman and Nemenyi results cover different treatments")

    ranking = sorted(fr.mean_ranks.items(), key=lambda item: item[1])
    ranks = [rank for _, rank in ranking]
    cliques = []
    last_end = -1
    for i in range(len(ranking)):
        end = i
        while end + 1 < len(ranking) and ranks[end + 1] - ranks[i] <= nem.critical_difference:
            end += 1
        if end > last_end:
            cliques.append([label for label, _ in ranking[i:end + 1]])
            last_end = end
    return CDDiagram(ranking, cliques, nem.critical_difference, nem.alpha)
