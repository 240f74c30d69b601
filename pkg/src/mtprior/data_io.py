"""File formats, synthetic data with known ground truth, and holdout splits.

Formats (all UTF-8, comma separators, decimal points, floats written with
``repr`` so a parse-back reproduces the exact double):

* task CSV   — header row, feature columns first, response last ("x1,..,xd,y").
* matrix CSV — dense numeric rows, no header (prior D, coefficients, true P).
* trace CSV  — columns ``k,algorithm,objective,stepsize`` exactly; the k=0 row
               of each algorithm block has an empty stepsize.
* report JSON — top-level keys ``certificates``, ``metrics``, ``config``,
               ``constants``, fixed ordering, no timestamps.

Every operation that draws randomness takes a seed and builds its own
generator; nothing touches global RNG state.
"""
import csv
import json
import math
from dataclasses import asdict, dataclass, is_dataclass

import numpy as np

from .errors import CsvParseError, TrainSizeError
from .model import (
    PriorMatrix,
    ProblemInstance,
    RegularizationParams,
    TaskData,
    validate_instance,
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Ground-truth generator settings.

    The true coefficient matrix has exactly ``active_rows`` nonzero rows whose
    columns drift as a random walk of scale ``smoothness_drift``; features are
    i.i.d. standard normal.  ``condition`` > 1 downscales the last feature
    column by 1/sqrt(condition) in every task, inflating the Gram condition
    number to roughly that value while keeping the bottom eigenvalue isolated
    (so the shifted power iteration that bounds it converges quickly).
    """

    d: int
    m: int
    n_per_task: int
    active_rows: int
    smoothness_drift: float = 0.1
    noise_std: float = 0.1
    condition: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.m < 1 or self.n_per_task < 1:
            raise ValueError("d, m and n_per_task must all be >= 1")
        if not 0 <= self.active_rows <= self.d:
            raise ValueError("active_rows must lie in [0, d]")
        if self.smoothness_drift < 0 or self.noise_std < 0:
            raise ValueError("smoothness_drift and noise_std must be >= 0")
        if self.condition < 1.0:
            raise ValueError("condition must be >= 1")


@dataclass(frozen=True)
class SyntheticData:
    instance: ProblemInstance   # empty prior; attach one via the prior builders
    true_P: np.ndarray


def generate_synthetic(spec, params=None):
    """Draw a synthetic problem instance plus the coefficients that produced it."""
    rng = np.random.default_rng(spec.seed)
    active = np.sort(rng.choice(spec.d, size=spec.active_rows, replace=False))
    true_P = np.zeros((spec.d, spec.m))
    if spec.active_rows:
        true_P[active, 0] = rng.standard_normal(spec.active_rows)
        for j in range(1, spec.m):
            true_P[active, j] = true_P[active, j - 1] + spec.smoothness_drift * rng.standard_normal(
                spec.active_rows
            )
    scales = np.ones(spec.d)
    if spec.condition > 1.0:
        scales[-1] = 1.0 / math.sqrt(spec.condition)
    tasks = []
    for i in range(spec.m):
        X = rng.standard_normal((spec.n_per_task, spec.d)) * scales
        y = X @ true_P[:, i]
        if spec.noise_std > 0.0:
            y = y + spec.noise_std * rng.standard_normal(spec.n_per_task)
        tasks.append(TaskData(features=X, responses=y, task_id=i))
    instance = ProblemInstance(
        tasks=tuple(tasks),
        prior=PriorMatrix.empty(spec.d),
        params=params if params is not None else RegularizationParams(1.0, 1.0, 1.0),
    )
    return SyntheticData(instance=validate_instance(instance), true_P=true_P)


# ---------------------------------------------------------------------------
# CSV formats


def _parse_float(text, path, line_no):
    try:
        return float(text)
    except ValueError:
        raise CsvParseError(f"{path}:{line_no}: cannot parse {text!r} as a number") from None


def load_task_csv(path, task_id=0):
    """Read one task file (header row, features then response column)."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError(f"{path}:1: file is empty") from None
        width = len(header)
        if width < 2:
            raise CsvParseError(f"{path}:1: need at least one feature column and a response")
        rows = []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != width:
                raise CsvParseError(
                    f"{path}:{line_no}: expected {width} fields, got {len(record)}"
                )
            rows.append([_parse_float(cell, path, line_no) for cell in record])
    if not rows:
        raise CsvParseError(f"{path}: no data rows after the header")
    data = np.array(rows)
    return TaskData(features=data[:, :-1], responses=data[:, -1], task_id=task_id)


def load_tasks_csv(paths):
    """Read one task per file, numbered in the given (significant) order."""
    return [load_task_csv(path, task_id=i) for i, path in enumerate(paths)]


def write_task_csv(task, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([f"x{j + 1}" for j in range(task.n_features)] + ["y"])
        for row, response in zip(task.features, task.responses):
            writer.writerow([repr(float(v)) for v in row] + [repr(float(response))])


def load_matrix_csv(path):
    """Dense numeric matrix, no header."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        rows = []
        width = None
        for line_no, record in enumerate(reader, start=1):
            if not record:
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise CsvParseError(
                    f"{path}:{line_no}: expected {width} fields, got {len(record)}"
                )
            rows.append([_parse_float(cell, path, line_no) for cell in record])
    if not rows:
        raise CsvParseError(f"{path}: no rows")
    return np.array(rows)


def write_matrix_csv(matrix, path):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        for row in matrix:
            writer.writerow([repr(float(v)) for v in row])


def load_prior_csv(path, n_features=None):
    """Read a D matrix; rows carry 'user' provenance (the file claims nothing more).

    A zero-row prior serializes to an empty file, which cannot carry its own
    column count, so ``n_features`` supplies it on the way back in.
    """
    with open(path, encoding="utf-8") as handle:
        if handle.read().strip() == "":
            if n_features is None:
                raise CsvParseError(
                    f"{path}: empty prior file needs an explicit column count"
                )
            return PriorMatrix.empty(n_features)
    return PriorMatrix(rows=load_matrix_csv(path))


def write_prior_csv(prior, path):
    write_matrix_csv(prior.rows, path)


def provenance_json_path(prior_path):
    """Sibling file recording where each D row came from."""
    text = str(prior_path)
    stem = text[: -len(".csv")] if text.endswith(".csv") else text
    return stem + ".provenance.json"


def write_provenance_json(prior, prior_path):
    records = [
        {
            "kind": record.kind,
            "feature_indices": list(record.feature_indices) if record.feature_indices else None,
            "statistic": record.statistic,
        }
        for record in prior.provenance
    ]
    path = provenance_json_path(prior_path)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(records, handle, indent=2)
        handle.write("\n")
    return path


# ---------------------------------------------------------------------------
# Holdout split


def split_holdout(tasks, train_size, seed):
    """Per-task seeded permutation split into (train_tasks, test_tasks).

    ``train_size`` is either a sample count or a fraction of each task's n_i;
    every task must keep at least one training and one test sample.
    """
    rng = np.random.default_rng(seed)
    train_tasks = []
    test_tasks = []
    for task in tasks:
        n = task.n_samples
        if isinstance(train_size, float) and 0.0 < train_size < 1.0:
            count = int(math.floor(train_size * n + 0.5))
        else:
            count = int(train_size)
        if count < 1:
            raise TrainSizeError(f"task {task.task_id}: train size {count} leaves no training data")
        if count >= n:
            raise TrainSizeError(
                f"task {task.task_id}: train size {count} must be < n_i = {n}"
            )
        order = rng.permutation(n)
        train_idx = np.sort(order[:count])
        test_idx = np.sort(order[count:])
        train_tasks.append(
            TaskData(task.features[train_idx], task.responses[train_idx], task.task_id)
        )
        test_tasks.append(
            TaskData(task.features[test_idx], task.responses[test_idx], task.task_id)
        )
    return train_tasks, test_tasks


# ---------------------------------------------------------------------------
# Trace CSV and report JSON


def write_trace_csv(results, path):
    """One block of rows per solver; row k carries F(P^k) and the eta that
    produced P^k (empty at k=0)."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["k", "algorithm", "objective", "stepsize"])
        for result in results:
            for k, objective in enumerate(result.objective_trace):
                step = "" if k == 0 else repr(float(result.stepsize_trace[k - 1]))
                writer.writerow([k, result.algorithm, repr(float(objective)), step])


def load_trace_csv(path):
    """Parse back a trace file: list of (algorithm, objectives, stepsizes)."""
    blocks = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["k", "algorithm", "objective", "stepsize"]:
            raise CsvParseError(f"{path}:1: unexpected header {header}")
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != 4:
                raise CsvParseError(f"{path}:{line_no}: expected 4 fields, got {len(record)}")
            k_text, algorithm, objective, step = record
            k = int(k_text)
            if k == 0:
                blocks.append((algorithm, [], []))
            if not blocks or blocks[-1][0] != algorithm:
                raise CsvParseError(f"{path}:{line_no}: trace block does not start at k=0")
            blocks[-1][1].append(_parse_float(objective, path, line_no))
            if step != "":
                blocks[-1][2].append(_parse_float(step, path, line_no))
    return blocks


def jsonify(value):
    """Recursively convert dataclasses / ndarrays / numpy scalars for json.dump."""
    if is_dataclass(value) and not isinstance(value, type):
        return {key: jsonify(item) for key, item in asdict(value).items()}
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {key: jsonify(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonify(item) for item in value]
    return value


def write_report_json(path, certificates=(), metrics=None, config=None, constants=None):
    """Deterministic run report; key order is fixed for byte reproducibility."""
    report = {
        "certificates": jsonify(list(certificates)),
        "metrics": jsonify(metrics if metrics is not None else {}),
        "config": jsonify(config if config is not None else {}),
        "constants": jsonify(constants if constants is not None else {}),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")
