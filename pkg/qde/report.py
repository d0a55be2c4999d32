"""
Result export and statistical analysis of experiment records.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import pandas as pd

from .benchmarks import function_info, registry_index
from .config import (
    DEFAULT_ALPHA,
    FORMATS,
    GROUPS,
    HYPOTHESES,
    INIT_METHODS,
    METRICS,
    PROVENANCE_FILE,
    STRATEGIES,
    VERSION,
)
from .errors import DegenerateInput, IncompleteMatrix, UnknownFormat
from .plan import ExperimentPlan
from .stats import (
    CDDiagram,
    FriedmanResult,
    NemenyiResult,
    RunRecord,
    cd_diagram_data,
    friedman,
    nemenyi,
    summarize_cell,
)

logger = logging.getLogger(__name__)

REPRODUCTION_NOTE = (
    "Population size, crossover rate and the alpha/beta scale factors are "
    "reproduction assumptions, not published values."
)


def build_provenance(plan: ExperimentPlan) -> Dict[str, object]:
    """Everything needed to rerun a plan: resolved settings with sources, code version and function index."""
    return {
        'code_version': VERSION,
        'note': REPRODUCTION_NOTE,
        'plan': plan.to_dict(),
        'settings': plan.provenance,
        'functions': registry_index(plan.functions, plan.dimension, plan.master_seed),
    }


def _dump_json(data, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, sort_keys=True, default=str)
        f.write('\n')


def write_provenance(plan: ExperimentPlan, output_dir: str) -> Path:
    path = Path(output_dir) / PROVENANCE_FILE
    _dump_json(build_provenance(plan), path)
    return path


def _order(values: Iterable, preferred: Optional[Sequence] = None) -> List:
    seen = list(dict.fromkeys(values))
    if preferred is None:
        return seen
    return [v for v in preferred if v in seen] + [v for v in seen if v not in preferred]


def runs_frame(records: Sequence[RunRecord], algorithm_order: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """Long-form table with one row per run, in algorithm, function, replicate order."""
    frame = pd.DataFrame([r.as_dict() for r in records])
    if frame.empty:
        return frame
    order = {alg: i for i, alg in enumerate(_order(frame['algorithm_id'], algorithm_order))}
    frame['_order'] = frame['algorithm_id'].map(order)
    frame = frame.sort_values(['_order', 'function_id', 'replicate'], kind='mergesort')
    return frame.drop(columns='_order').reset_index(drop=True)


def summary_frame(records: Sequence[RunRecord], algorithm_order: Optional[Sequence[str]] = None) -> pd.DataFrame:
    """One row per algorithm x function cell with mean, median, sigma and median convergence generation."""
    cells: Dict[Tuple[str, int], List[RunRecord]] = {}
    for record in records:
        cells.setdefault(record.cell, []).append(record)

    algorithms = _order((alg for alg, _ in cells), algorithm_order)
    rows = []
    for alg in algorithms:
        for fid in sorted(fid for a, fid in cells if a == alg):
            summary = summarize_cell(cells[(alg, fid)])
            info = function_info(fid)
            rows.append({
                'algorithm_id': alg,
                'function_id': fid,
                'function': info.name,
                'group': info.group,
                'runs': summary.runs,
                'mean': summary.mean,
                'median': summary.median,
                'sigma': summary.sigma,
                'median_convergence_generation': summary.median_convergence_generation,
            })
    return pd.DataFrame(rows)


def _write_frame(frame: pd.DataFrame, path: Path, fmt: str, provenance: Optional[Dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == 'csv':
        with open(path, 'w', newline='') as f:
            if provenance is not None:
                f.write('# provenance: ' + json.dumps(provenance, sort_keys=True, default=str) + '\n')
            frame.to_csv(f, index=False, lineterminator='\n')
    else:
        document = {'provenance': provenance, 'rows': frame.to_dict(orient='records')}
        _dump_json(document, path)


def export_results(
    records: Sequence[RunRecord],
    fmt: str,
    output_dir: str,
    provenance: Optional[Dict[str, object]] = None,
    algorithm_order: Optional[Sequence[str]] = None
) -> Dict[str, Path]:
    """
    Writes summary.<fmt> and runs_long.<fmt> with a provenance header.

    Output is ordered deterministically, so exporting the same records twice
    gives identical files.

    Raises:
        UnknownFormat: If fmt is not csv or json
    """
    if fmt not in FORMATS:
        raise UnknownFormat(f"Format must be one of {FORMATS}, got {fmt!r}")

    out = Path(output_dir)
    paths = {
        'summary': out / f"summary.{fmt}",
        'runs_long': out / f"runs_long.{fmt}",
    }
    _write_frame(summary_frame(records, algorithm_order), paths['summary'], fmt, provenance)
    _write_frame(runs_frame(records, algorithm_order), paths['runs_long'], fmt, provenance)
    logger.info("Exported %d runs to %s", len(records), out)
    return paths


def load_table(path: str) -> pd.DataFrame:
    """Reads a summary or long-form file written by export_results."""
    table_path = Path(path)
    if table_path.suffix == '.csv':
        return pd.read_csv(table_path, comment='#')
    if table_path.suffix == '.json':
        with open(table_path) as f:
            return pd.DataFrame(json.load(f)['rows'])
    raise UnknownFormat(f"Cannot read {table_path.suffix!r} files")


def cell_values(
    records: Sequence[RunRecord],
    metric: str = 'fitness',
    algorithms: Optional[Sequence[str]] = None,
    functions: Optional[Sequence[int]] = None
) -> pd.DataFrame:
    """
    Median of the metric per cell as a functions x algorithms frame.

    Raises:
        ValueError: If metric is unknown
        IncompleteMatrix: If a requested cell has no records
    """
    if metric not in METRICS:
        raise ValueError(f"Metric must be one of {METRICS}, got {metric!r}")
    column = 'final_fitness' if metric == 'fitness' else 'convergence_generation'

    frame = pd.DataFrame([r.as_dict() for r in records])
    if frame.empty:
        raise DegenerateInput("No records to analyze")
    algorithms = list(algorithms) if algorithms is not None else _order(frame['algorithm_id'])
    functions = [int(f) for f in functions] if functions is not None else sorted(int(f) for f in frame['function_id'].unique())

    medians = frame.groupby(['function_id', 'algorithm_id'])[column].median().unstack('algorithm_id')
    medians = medians.reindex(index=functions, columns=algorithms)
    missing = [
        (alg, int(fid))
        for alg in algorithms
        for fid in functions
        if pd.isna(medians.at[fid, alg])
    ]
    if missing:
        raise IncompleteMatrix(missing)
    return medians.astype(float)


@dataclass(frozen=True)
class Analysis:
    name: str
    hypothesis: str
    metric: str
    blocks: List[str]
    friedman: FriedmanResult
    nemenyi: NemenyiResult
    diagram: CDDiagram

    def to_dict(self) -> Dict[str, object]:
        labels = list(self.nemenyi.labels)
        pairs = [
            [labels[i], labels[j]]
            for i in range(len(labels))
            for j in range(i + 1, len(labels))
            if self.nemenyi.pairwise_significant[i, j]
        ]
        return {
            'name': self.name,
            'hypothesis': self.hypothesis,
            'metric': self.metric,
            'blocks': self.blocks,
            'friedman': {
                'statistic': self.friedman.statistic,
                'k': self.friedman.k,
                'n': self.friedman.n,
                'p_value': self.friedman.p_value,
                'f_statistic': self.friedman.f_statistic,
                'f_p_value': self.friedman.f_p_value,
                'mean_ranks': self.friedman.mean_ranks,
            },
            'nemenyi': {
                'critical_difference': self.nemenyi.critical_difference,
                'alpha': self.nemenyi.alpha,
                'significant_pairs': pairs,
            },
            'cd': self.diagram.to_dict(),
        }


def _rank_test(name, hypothesis, metric, matrix: pd.DataFrame, alpha: float) -> Analysis:
    fr = friedman(matrix, iman_davenport=True)
    nem = nemenyi(fr, alpha)
    logger.info("%s: chi2=%.3f p=%.3g CD=%.3f", name, fr.statistic, fr.p_value, nem.critical_difference)
    return Analysis(name, hypothesis, metric, [str(b) for b in matrix.index], fr, nem, cd_diagram_data(fr, nem))


def _marginal_matrix(cells: pd.DataFrame, by: str) -> pd.DataFrame:
    """Reshapes an algorithm matrix so treatments are strategies (by='mutation') or inits."""
    rows = {}
    others = INIT_METHODS if by == 'mutation' else STRATEGIES
    treatments = STRATEGIES if by == 'mutation' else INIT_METHODS
    for fid in cells.index:
        for other in others:
            block = f"f{fid}/{other}"
            rows[block] = {}
            for treatment in treatments:
                init, strategy = (other, treatment) if by == 'mutation' else (treatment, other)
                rows[block][treatment] = cells.at[fid, f"{init}-{strategy}"]
    return pd.DataFrame.from_dict(rows, orient='index', columns=list(treatments))


def analyze(
    records: Sequence[RunRecord],
    hypothesis: str = 'all',
    metric: str = 'fitness',
    alpha: float = DEFAULT_ALPHA,
    algorithms: Optional[Sequence[str]] = None,
    functions: Optional[Sequence[int]] = None
) -> List[Analysis]:
    """
    Friedman + Nemenyi + CD data at the requested granularity.

    all compares every algorithm over the functions; per-group does the same
    within each function group; by-mutation compares the six strategies with
    (function, initialization) blocks; by-initialization compares E4 and Polar
    with (function, strategy) blocks; convergence is 'all' on convergence
    generations.

    Raises:
        ValueError: If hypothesis or metric is unknown
        IncompleteMatrix: If required cells are missing
    """
    if hypothesis not in HYPOTHESES:
        raise ValueError(f"Hypothesis must be one of {HYPOTHESES}, got {hypothesis!r}")
    if hypothesis == 'convergence':
        metric = 'convergence'

    if hypothesis in ('by-mutation', 'by-initialization'):
        qde_ids = [f"{init}-{strategy}" for init in INIT_METHODS for strategy in STRATEGIES]
        cells = cell_values(records, metric, qde_ids, functions)
        by = 'mutation' if hypothesis == 'by-mutation' else 'initialization'
        return [_rank_test(hypothesis, hypothesis, metric, _marginal_matrix(cells, by), alpha)]

    cells = cell_values(records, metric, algorithms, functions)
    if hypothesis != 'per-group':
        return [_rank_test(hypothesis, hypothesis, metric, cells, alpha)]

    results = []
    for group in GROUPS:
        ids = [fid for fid in cells.index if function_info(fid).group == group]
        if len(ids) < 2:
            logger.warning("Skipping group %s: %d function(s) in the matrix", group, len(ids))
            continue
        results.append(_rank_test(f"{hypothesis}_{group}", hypothesis, metric, cells.loc[ids], alpha))
    if not results:
        raise DegenerateInput("No function group has at least two functions in the matrix")
    return results


def write_analysis(analyses: Sequence[Analysis], output_dir: str) -> List[Path]:
    """Writes analysis_<hypothesis>.json and one cd_<name>.csv per dataset."""
    out = Path(output_dir)
    written = []
    by_hypothesis: Dict[str, List[Dict]] = {}
    for analysis in analyses:
        by_hypothesis.setdefault(analysis.hypothesis, []).append(analysis.to_dict())

        rows = []
        for position, (label, rank) in enumerate(analysis.diagram.ranking, start=1):
            member_of = [str(i) for i, clique in enumerate(analysis.diagram.cliques) if label in clique]
            rows.append({
                'position': position,
                'algorithm': label,
                'mean_rank': rank,
                'cliques': ';'.join(member_of),
            })
        cd_path = out / f"cd_{analysis.name}.csv"
        cd_path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows).to_csv(cd_path, index=False, lineterminator='\n')
        written.append(cd_path)

    for hypothesis, documents in by_hypothesis.items():
        path = out / f"analysis_{hypothesis}.json"
        _dump_json({'hypothesis': hypothesis, 'analyses': documents}, path)
        written.append(path)
    return written
