#quaternion_de/qde/experiment.py

"""
Module for running the algorithm x function x seed matrix in parallel,
with resumable result files and a failure manifest.
"""

import logging
import multiprocessing
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple

from tqdm import tqdm

from .benchmarks import make_instance
from .config import FAILURES_FILE, RUNS_FILE, Trace
from .engine import EngineConfig, run, run_real_de
from .plan import AlgorithmSpec, ExperimentPlan
from .report import write_provenance
from .stats import RunRecord, convergence_generation
from .utils import (
    append_failures,
    append_records,
    completed_keys,
    derive_seed,
    load_records,
    save_trace,
    trace_ref,
)

logger = logging.getLogger(__name__)


class CellTask(NamedTuple):
    algorithm: AlgorithmSpec
    function_id: int
    replicate: int
    seed: int
    instance_seed: int
    config: EngineConfig
    zero_shift: bool
    tolerance: float


class CellOutcome(NamedTuple):
    task: CellTask
    record: Optional[RunRecord]
    trace: Optional[Trace]
    error: Optional[str]


@dataclass
class MatrixResult:
    records: List[RunRecord]
    new_runs: int
    skipped: int
    failures: List[Tuple[str, int, int, str]] = field(default_factory=list)
    duration: float = 0.0


def instance_seed(master_seed: int, function_id: int, replicate: int) -> int:
    """Every algorithm sees the same instance for a given function and replicate."""
    return derive_seed(master_seed, 'instance', function_id, replicate)


def make_task(plan: ExperimentPlan, algorithm_id: str, function_id: int, replicate: int) -> CellTask:
    algorithm = plan.algorithm(algorithm_id)
    seed = derive_seed(plan.master_seed, algorithm_id, function_id, replicate)
    return CellTask(
        algorithm=algorithm,
        function_id=function_id,
        replicate=replicate,
        seed=seed,
        instance_seed=instance_seed(plan.master_seed, function_id, replicate),
        config=plan.engine_config(algorithm, seed),
        zero_shift=plan.zero_shift,
        tolerance=plan.convergence_tolerance,
    )


def run_cell(task: CellTask) -> Tuple[RunRecord, Trace]:
    """
    Runs one cell and builds its record.

    Raises:
        QDEError: If the instance or the run cannot be set up
    """
    cfg = task.config
    instance = make_instance(task.function_id, cfg.dimension, task.instance_seed, zero_shift=task.zero_shift)
    runner = run_real_de if task.algorithm.is_baseline else run
    result = runner(cfg, instance)

    trace = result.best_fitness_per_generation
    record = RunRecord(
        algorithm_id=task.algorithm.id,
        function_id=task.function_id,
        replicate=task.replicate,
        seed=task.seed,
        instance_seed=task.instance_seed,
        dimension=cfg.dimension,
        final_fitness=result.final_fitness,
        convergence_generation=convergence_generation(trace, task.tolerance),
        evaluations=result.evaluations,
        trace_ref=trace_ref(task.algorithm.id, task.function_id, task.replicate),
    )
    return record, trace


def _worker_cell(task: CellTask) -> CellOutcome:
    """
    Worker function for multiprocessing.Pool.
    Errors are returned instead of raised so one failing cell does not stop the batch.
    """
    try:
        record, trace = run_cell(task)
        return CellOutcome(task, record, trace, None)
    except Exception as e:
        return CellOutcome(task, None, None, f"{type(e).__name__}: {e}")


def _persist(outcomes: List[CellOutcome], output_dir: Path, failures: List) -> int:
    """Writes traces and records of a finished batch; the parent process is the only writer."""
    written = []
    for outcome in outcomes:
        task = outcome.task
        if outcome.error is not None:
            failures.append((task.algorithm.id, task.function_id, task.replicate, outcome.error))
            logger.warning("Cell %s/f%d/r%d failed: %s",
                           task.algorithm.id, task.function_id, task.replicate, outcome.error)
            continue
        try:
            save_trace(outcome.trace, str(output_dir / outcome.record.trace_ref))
        except OSError as e:
            failures.append((task.algorithm.id, task.function_id, task.replicate, f"OSError: {e}"))
            continue
        written.append(outcome.record)
    return append_records(written, str(output_dir / RUNS_FILE))


def run_matrix(
    plan: ExperimentPlan,
    progress: bool = True,
    timeout: Optional[float] = None
) -> MatrixResult:
    """
    Runs every (algorithm, function, replicate) cell of a plan that has no
    record yet in plan.output_dir.

    Args:
        plan: Resolved experiment plan
        progress: Show a tqdm progress bar
        timeout: Maximum time in seconds for the whole matrix

    Returns:
        MatrixResult with all records in the runs file (old and new)

    Raises:
        TimeoutError: If processing takes too long
        OSError: If the output directory is not writable
    """
    start_time = time.time()
    output_dir = Path(plan.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    write_provenance(plan, str(output_dir))

    runs_file = output_dir / RUNS_FILE
    done = completed_keys(str(runs_file))
    cells = plan.cells()
    pending = [cell for cell in cells if cell not in done]
    skipped = len(cells) - len(pending)
    logger.info("Running %d cells (%d already done) into %s", len(pending), skipped, output_dir)

    tasks = [make_task(plan, *cell) for cell in pending]
    failures: List[Tuple[str, int, int, str]] = []
    new_runs = 0

    def remaining() -> Optional[float]:
        if timeout is None:
            return None
        left = timeout - (time.time() - start_time)
        if left <= 0:
            raise TimeoutError(f"Timeout limit exceeded ({timeout} seconds)")
        return left

    with tqdm(total=len(tasks), desc="Running cells", disable=not progress) as pbar:
        if plan.jobs == 1:
            for i in range(0, len(tasks), plan.batch_size):
                remaining()
                batch = tasks[i:i + plan.batch_size]
                new_runs += _persist([_worker_cell(task) for task in batch], output_dir, failures)
                pbar.update(len(batch))
        else:
            with multiprocessing.Pool(processes=plan.jobs) as pool:
                for i in range(0, len(tasks), plan.batch_size):
                    batch = tasks[i:i + plan.batch_size]
                    try:
                        outcomes = pool.map_async(_worker_cell, batch).get(timeout=remaining())
                    except multiprocessing.TimeoutError:
                        raise TimeoutError(f"Timeout exceeded for batch {i}-{i + len(batch)}")
                    new_runs += _persist(outcomes, output_dir, failures)
                    pbar.update(len(batch))

    if failures:
        append_failures(failures, str(output_dir / FAILURES_FILE))
        logger.warning("%d cells failed, see %s", len(failures), output_dir / FAILURES_FILE)

    records = list(load_records(str(runs_file))) if runs_file.exists() else []
    duration = time.time() - start_time
    logger.info("Finished %d new runs in %.2fs", new_runs, duration)
    return MatrixResult(records, new_runs, skipped, failures, duration)
