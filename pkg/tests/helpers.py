"""Shared test fixtures: random instances and independent oracles.

The oracles re-derive values straight from the definitions (residual sums,
dense Hessians, finite differences) so they stay independent of the package's
Gram-form evaluation path.
"""
import numpy as np

from mtprior import (
    ConstraintProvenance,
    PriorMatrix,
    ProblemInstance,
    RegularizationParams,
    TaskData,
    validate_instance,
)


def pair_prior(d, pairs):
    """Prior with one {+1, -1} row per (i, j) pair."""
    rows = np.zeros((len(pairs), d))
    for r, (i, j) in enumerate(pairs):
        rows[r, i] = 1.0
        rows[r, j] = -1.0
    return PriorMatrix(rows=rows, provenance=tuple(ConstraintProvenance("user") for _ in pairs))


def random_instance(seed=0, d=5, m=3, n=20, lam=1.0, theta=1.0, eps=1.0, s=2,
                    dense_prior=False, noise=1.0):
    """Random Gaussian tasks with a random prior of s rows."""
    rng = np.random.default_rng(seed)
    tasks = []
    for i in range(m):
        X = rng.standard_normal((n, d))
        y = rng.standard_normal(n) * noise
        tasks.append(TaskData(features=X, responses=y, task_id=i))
    if s == 0:
        prior = PriorMatrix.empty(d)
    elif dense_prior:
        prior = PriorMatrix(
            rows=rng.standard_normal((s, d)),
            provenance=tuple(ConstraintProvenance("user") for _ in range(s)),
        )
    else:
        pairs = []
        for _ in range(s):
            i, j = sorted(rng.choice(d, size=2, replace=False).tolist())
            pairs.append((i, j))
        prior = pair_prior(d, pairs)
    instance = ProblemInstance(
        tasks=tuple(tasks),
        prior=prior,
        params=RegularizationParams(lam=lam, theta=theta, eps=eps),
    )
    return validate_instance(instance)


def direct_objective(instance, P, include_nonsmooth=True):
    """Objective value straight from the definition (residuals, not Grams)."""
    P = np.asarray(P, dtype=np.float64)
    value = 0.0
    for t, task in enumerate(instance.tasks):
        r = task.features @ P[:, t] - task.responses
        value += 0.5 * float(r @ r)
    if instance.prior.n_constraints:
        DP = instance.prior.rows @ P
        value += 0.5 * instance.params.theta * float((DP * DP).sum())
    for t in range(instance.m - 1):
        diff = P[:, t] - P[:, t + 1]
        value += 0.5 * instance.params.eps * float(diff @ diff)
    if include_nonsmooth:
        value += instance.params.lam * sum(float(np.linalg.norm(row)) for row in P)
    return value


def fd_gradient(instance, P, func, step_scale=1e-5):
    """Central finite differences of ``func`` with per-matrix step scaling."""
    P = np.asarray(P, dtype=np.float64)
    h = step_scale * (1.0 + float(np.abs(P).max(initial=0.0)))
    grad = np.zeros_like(P)
    for i in range(P.shape[0]):
        for j in range(P.shape[1]):
            bump = np.zeros_like(P)
            bump[i, j] = h
            grad[i, j] = (func(instance, P + bump) - func(instance, P - bump)) / (2.0 * h)
    return grad


def dense_hessian(instance):
    """Full (d*m, d*m) Hessian of the smooth part, columns stacked task-major."""
    d, m = instance.d, instance.m
    H = np.zeros((d * m, d * m))
    DtD = instance.prior.rows.T @ instance.prior.rows
    for t, task in enumerate(instance.tasks):
        block = task.features.T @ task.features + instance.params.theta * DtD
        H[t * d:(t + 1) * d, t * d:(t + 1) * d] += block
    chain = np.zeros((m, m))
    for t in range(m - 1):
        chain[t, t] += 1.0
        chain[t + 1, t + 1] += 1.0
        chain[t, t + 1] -= 1.0
        chain[t + 1, t] -= 1.0
    H += instance.params.eps * np.kron(chain, np.eye(d))
    return H


def single_task_instance(X, y, lam=0.0, theta=0.0, eps=0.0):
    X = np.asarray(X, dtype=np.float64)
    task = TaskData(features=X, responses=y, task_id=0)
    return validate_instance(
        ProblemInstance(
            tasks=(task,),
            prior=PriorMatrix.empty(X.shape[1]),
            params=RegularizationParams(lam=lam, theta=theta, eps=eps),
        )
    )


def solve_smooth_exactly(instance):
    """Dense linear solve of the lam = 0 problem (normal equations with the
    prior and chain couplings)."""
    if instance.params.lam != 0.0:
        raise ValueError("closed form applies to lam = 0 only")
    d, m = instance.d, instance.m
    H = dense_hessian(instance)
    b = np.concatenate([task.features.T @ task.responses for task in instance.tasks])
    flat = np.linalg.solve(H, b)
    return flat.reshape(m, d).T
