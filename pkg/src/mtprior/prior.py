"""Constructing the prior matrix D from data.

Two protocols:

* natural    — pool all tasks' samples, compute the feature correlation matrix
               and emit one {+1, -1} row per strongly correlated pair.
* artificial — append exact copies of a random subset of feature columns to
               every task and tie each copy to its original with a {+1, -1}
               row; the known duplication makes D informative by construction.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientSamplesError
from .model import ConstraintProvenance, PriorMatrix, TaskData


@dataclass(frozen=True)
class PriorBuildConfig:
    mode: str = "natural"               # 'natural' or 'artificial'
    correlation_threshold: float = 0.9  # in (0, 1]
    max_constraints: int = None         # None means d
    include_negative: bool = False      # emit e_i + e_j rows for strong negative correlation
    duplicate_fraction: float = 0.05    # share of features to copy in artificial mode
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("natural", "artificial"):
            raise ValueError(f"mode must be 'natural' or 'artificial', got {self.mode!r}")
        if not 0.0 < self.correlation_threshold <= 1.0:
            raise ValueError("correlation_threshold must lie in (0, 1]")
        if not 0.0 <= self.duplicate_fraction <= 1.0:
            raise ValueError("duplicate_fraction must lie in [0, 1]")
        if self.max_constraints is not None and self.max_constraints < 0:
            raise ValueError("max_constraints must be >= 0")


def build_natural(tasks, config):
    """Correlation-derived prior.

    Stacks every task's samples, computes the Pearson correlation matrix, and
    keeps the pairs (i < j) with |corr| >= threshold sorted by |corr|
    descending (ties broken by index), capped at max_constraints.  Positive
    correlation gives the row e_i - e_j; negative correlation gives e_i + e_j
    and only when ``include_negative`` is set.  Constant features cannot be
    correlated and are left out of the pairing with a warning.
    """
    tasks = list(tasks)
    d = tasks[0].n_features
    stacked = np.vstack([task.features for task in tasks])
    if stacked.shape[0] < 2:
        raise InsufficientSamplesError(
            f"correlation needs at least 2 pooled samples, got {stacked.shape[0]}"
        )
    centered = stacked - stacked.mean(axis=0)
    ss = np.sqrt((centered * centered).sum(axis=0))
    constant = ss == 0.0
    if constant.any():
        warnings.warn(
            f"{int(constant.sum())} zero-variance feature(s) excluded from prior pairing: "
            f"{np.nonzero(constant)[0].tolist()}",
            RuntimeWarning,
            stacklevel=2,
        )
    denom = np.where(constant, 1.0, ss)
    corr = (centered / denom).T @ (centered / denom)

    candidates = []
    for i in range(d):
        if constant[i]:
            continue
        for j in range(i + 1, d):
            if constant[j]:
                continue
            c = float(corr[i, j])
            if abs(c) < config.correlation_threshold:
                continue
            if c < 0.0 and not config.include_negative:
                continue
            candidates.append((i, j, c))
    candidates.sort(key=lambda item: (-abs(item[2]), item[0], item[1]))
    cap = d if config.max_constraints is None else config.max_constraints
    candidates = candidates[:cap]

    rows = np.zeros((len(candidates), d))
    provenance = []
    for r, (i, j, c) in enumerate(candidates):
        rows[r, i] = 1.0
        rows[r, j] = -1.0 if c >= 0.0 else 1.0
        provenance.append(
            ConstraintProvenance(kind="natural", feature_indices=(i, j), statistic=c)
        )
    return PriorMatrix(rows=rows, provenance=tuple(provenance))


@dataclass(frozen=True)
class AugmentedTasks:
    tasks: tuple          # tasks with the duplicated columns appended (d' = d + count)
    prior: PriorMatrix    # one e_original - e_copy row per duplicate, d' columns


def build_artificial(tasks, config):
    """Feature-duplication prior.

    Picks ceil(duplicate_fraction * d) distinct feature indices with the seeded
    generator, appends an exact copy of each chosen column to every task (so
    the shared d stays consistent), and emits the row e_i - e_j tying original
    i to its copy at the new index j.
    """
    tasks = list(tasks)
    d = tasks[0].n_features
    # small backoff keeps e.g. 0.05 * 100 (= 5.000000000000001 in floats) at 5
    count = math.ceil(config.duplicate_fraction * d - 1e-9)
    rng = np.random.default_rng(config.seed)
    chosen = np.sort(rng.choice(d, size=count, replace=False)) if count else np.empty(0, int)

    augmented = []
    for task in tasks:
        features = np.hstack([task.features, task.features[:, chosen]]) if count else task.features
        augmented.append(
            TaskData(features=features, responses=task.responses, task_id=task.task_id)
        )

    rows = np.zeros((count, d + count))
    provenance = []
    for r, original in enumerate(chosen):
        copy_index = d + r
        rows[r, original] = 1.0
        rows[r, copy_index] = -1.0
        provenance.append(
            ConstraintProvenance(kind="artificial", feature_indices=(int(original), copy_index))
        )
    return AugmentedTasks(
        tasks=tuple(augmented),
        prior=PriorMatrix(rows=rows, provenance=tuple(provenance)),
    )
