#quaternion_de/qde/utils.py

"""
Utility module for result files: seed derivation, run records, traces and
the failure manifest.
"""

import csv
import hashlib
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Set, Tuple

from .config import (
    FAILURE_HEADERS,
    RUN_HEADERS,
    TRACE_HEADERS,
    TRACES_DIR,
    Trace,
)
from .stats import RunRecord

_INT_FIELDS = ('function_id', 'replicate', 'seed', 'instance_seed', 'dimension',
               'convergence_generation', 'evaluations')


def derive_seed(master_seed: int, *parts) -> int:
    """
    Mixes the master seed with identifiers into a 64-bit seed using SHA-256.

    The same inputs always give the same seed, independent of run order.
    """
    data = str(int(master_seed)).encode()
    for part in parts:
        data += b'\x1f' + str(part).encode()
    digest = hashlib.sha256(data).digest()
    return int.from_bytes(digest[:8], byteorder='big')


def trace_ref(algorithm_id: str, function_id: int, replicate: int) -> str:
    """Relative path of a run's trace inside the output directory."""
    return f"{TRACES_DIR}/{algorithm_id}/f{function_id}_r{replicate}.csv"


def _is_new(path: Path) -> bool:
    """Returns True when the file is new and a header must be written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    return not path.exists() or path.stat().st_size == 0


def append_records(records: Iterable[RunRecord], output_file: str) -> int:
    """
    Appends run records to the long-form runs file, writing the header once.

    Returns:
        Number of rows written
    """
    output_path = Path(output_file)
    new_file = _is_new(output_path)
    count = 0
    with open(output_path, 'a', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=RUN_HEADERS)
        if new_file:
            writer.writeheader()
        for record in records:
            row = record.as_dict()
            row['final_fitness'] = repr(float(record.final_fitness))
            writer.writerow(row)
            count += 1
    return count


def load_records(input_file: str) -> Iterator[RunRecord]:
    """
    Loads run records in streaming mode.

    Raises:
        FileNotFoundError: If the runs file does not exist
        ValueError: If the header does not match RUN_HEADERS
    """
    input_path = Path(input_file)
    if not input_path.exists():
        raise FileNotFoundError(f"Runs file not found: {input_file}")

    with open(input_path, 'r', newline='') as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or not all(h in reader.fieldnames for h in RUN_HEADERS):
            raise ValueError(f"Invalid CSV headers. Expected: {RUN_HEADERS}")
        for row in reader:
            values: Dict[str, object] = {h: row[h] for h in RUN_HEADERS}
            for name in _INT_FIELDS:
                values[name] = int(values[name])
            values['final_fitness'] = float(values['final_fitness'])
            yield RunRecord(**values)


def completed_keys(input_file: str) -> Set[Tuple[str, int, int]]:
    """(algorithm, function, replicate) triples already present in a runs file."""
    if not Path(input_file).exists():
        return set()
    return {record.key for record in load_records(input_file)}


def save_trace(trace: Trace, output_file: str) -> None:
    output_path = Path(output_file)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(TRACE_HEADERS)
        writer.writerows((g, repr(float(value))) for g, value in enumerate(trace))


def load_trace(input_file: str) -> List[float]:
    """
    Raises:
        FileNotFoundError: If the trace file does not exist
    """
    input_path = Path(input_file)
    if not input_path.exists():
        raise FileNotFoundError(f"Trace file not found: {input_file}")
    with open(input_path, 'r', newline='') as f:
        reader = csv.DictReader(f)
        return [float(row['best_fitness']) for row in reader]


def append_failures(failures: Iterable[Tuple[str, int, int, str]], output_file: str) -> int:
    """Appends (algorithm, function, replicate, error) rows to the failure manifest."""
    output_path = Path(output_file)
    new_file = _is_new(output_path)
    count = 0
    with open(output_path, 'a', newline='') as f:
        writer = csv.writer(f)
        if new_file:
            writer.writerow(FAILURE_HEADERS)
        for row in failures:
            writer.writerow(row)
            count += 1
    return count
