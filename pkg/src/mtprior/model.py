"""Problem data model: tasks, regularization weights, prior matrix, instance.

All containers are frozen dataclasses holding read-only float64 arrays; once an
instance passes :func:`validate_instance` it can be shared freely across
threads and fed to every solver without further dimension errors.

Coefficient matrices are plain ``(d, m)`` ndarrays throughout the package
(column ``t`` holds task ``t``'s coefficients); :func:`validate_coefficients`
enforces their contract at API boundaries.
"""
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionMismatchError, NegativeParameterError, NonFiniteError
from . import kernels


def _frozen_array(values, ndim, what):
    arr = np.array(values, dtype=np.float64, order="C")
    if arr.ndim != ndim:
        raise DimensionMismatchError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TaskData:
    """One task: an (n_i, d) feature matrix and its length-n_i response vector."""

    features: np.ndarray
    responses: np.ndarray
    task_id: int = 0

    def __post_init__(self):
        object.__setattr__(self, "features", _frozen_array(self.features, 2, "features"))
        object.__setattr__(self, "responses", _frozen_array(self.responses, 1, "responses"))

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class RegularizationParams:
    """Weights of the three penalties: group lasso (lam), prior rows (theta),
    adjacent-task smoothness (eps)."""

    lam: float = 0.0
    theta: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "eps", float(self.eps))


@dataclass(frozen=True, eq=False)
class ConstraintProvenance:
    """Where one prior row came from.

    ``kind`` is ``"natural"`` (correlation-derived), ``"artificial"``
    (feature duplication) or ``"user"``; ``feature_indices`` names the tied
    pair for the first two; ``statistic`` records the correlation when known.
    """

    kind: str
    feature_indices: tuple = None
    statistic: float = None


@dataclass(frozen=True, eq=False)
class PriorMatrix:
    """The (s, d) constraint matrix; each row couples feature coefficients."""

    rows: np.ndarray
    provenance: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen_array(self.rows, 2, "prior rows"))
        object.__setattr__(self, "provenance", tuple(self.provenance))

    @classmethod
    def empty(cls, d):
        """A zero-row prior: theta > 0 with this prior contributes nothing."""
        return cls(rows=np.zeros((0, d)))

    @property
    def n_constraints(self):
        return self.rows.shape[0]

    @property
    def n_features(self):
        return self.rows.shape[1]


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """The frozen input to every solver: m tasks, a prior, and weights.

    Task order is significant: the eps term couples adjacent columns, so the
    library never reorders tasks.
    """

    tasks: tuple
    prior: PriorMatrix
    params: RegularizationParams = field(default_factory=RegularizationParams)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))

    @property
    def m(self):
        return len(self.tasks)

    @property
    def d(self):
        return self.tasks[0].n_features

    @cached_property
    def kernel_arrays(self):
        # lazily built, then shared by objective/prox/solvers
        return kernels.build_arrays(self)


def validate_instance(instance):
    """Check every structural invariant; return the same instance on success.

    Idempotent: validating a validated instance returns it unchanged.

    Raises DimensionMismatchError, NonFiniteError or NegativeParameterError
    with a message naming the offending task / prior row / parameter.
    """
    if not instance.tasks:
        raise DimensionMismatchError("instance has no tasks (m must be >= 1)")
    d = instance.tasks[0].n_features
    if d < 1:
        raise DimensionMismatchError("tasks must have at least one feature")
    for t, task in enumerate(instance.tasks):
        if task.n_samples < 1:
            raise DimensionMismatchError(f"task {t}: needs at least one sample")
        if task.n_features != d:
            raise DimensionMismatchError(
                f"task {t}: has {task.n_features} features, task 0 has {d}"
            )
        if task.responses.shape[0] != task.n_samples:
            raise DimensionMismatchError(
                f"task {t}: {task.responses.shape[0]} responses for {task.n_samples} samples"
            )
        if not np.isfinite(task.features).all():
            raise NonFiniteError(f"task {t}: features contain NaN/Inf")
        if not np.isfinite(task.responses).all():
            raise NonFiniteError(f"task {t}: responses contain NaN/Inf")

    prior = instance.prior
    if prior.n_features != d:
        raise DimensionMismatchError(
            f"prior matrix has {prior.n_features} columns, tasks have d={d}"
        )
    if not np.isfinite(prior.rows).all():
        raise NonFiniteError("prior matrix contains NaN/Inf")
    if prior.provenance and len(prior.provenance) != prior.n_constraints:
        raise DimensionMismatchError(
            f"prior provenance has {len(prior.provenance)} records for "
            f"{prior.n_constraints} rows"
        )
    for r, record in enumerate(prior.provenance):
        if record.kind in ("natural", "artificial"):
            row = prior.rows[r]
            nonzero = np.nonzero(row)[0]
            if len(nonzero) != 2 or not all(abs(row[j]) == 1.0 for j in nonzero):
                raise DimensionMismatchError(
                    f"prior row {r} ({record.kind}): must have exactly two nonzeros in {{+1, -1}}"
                )

    params = instance.params
    for name in ("lam", "theta", "eps"):
        value = getattr(params, name)
        if not np.isfinite(value):
            raise NonFiniteError(f"parameter {name} is not finite")
        if value < 0.0:
            raise NegativeParameterError(f"parameter {name} = {value} must be nonnegative")
    return instance


def validate_coefficients(instance, P, check_finite=True):
    """Coerce ``P`` to a C-contiguous float64 (d, m) array for this instance."""
    arr = np.ascontiguousarray(P, dtype=np.float64)
    expected = (instance.d, instance.m)
    if arr.shape != expected:
        raise DimensionMismatchError(
            f"coefficient matrix has shape {arr.shape}, instance needs {expected}"
        )
    if check_finite and not np.isfinite(arr).all():
        raise NonFiniteError("coefficient matrix contains NaN/Inf")
    return arr


def zero_coefficients(instance):
    """The all-zero starting point (the default initializer everywhere)."""
    return np.zeros((instance.d, instance.m))
