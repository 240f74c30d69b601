"""Composite objective F = f + g and its curvature constants.

The smooth part, for coefficient columns p_1..p_m, is

    f(P) = 0.5 * sum_i ||X_i p_i - y_i||^2
         + 0.5 * theta * ||D P||_F^2
         + 0.5 * eps * sum_{i<m} ||p_i - p_{i+1}||^2

and the nonsmooth part is g(P) = lam * sum over rows ||p^i|| (the 2,1 norm).
f is quadratic: its Hessian is block-diagonal in the per-task Grams plus the
prior Gram plus a chain coupling, which is what the constants below bound.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import EigenConvergenceError, InvalidStepSizeError
from .model import validate_coefficients

# one-sided safety margin applied to power-iteration eigenvalue estimates so
# that L_safe stays an upper and sigma_safe a lower curvature bound even at
# residual-level estimation error
_EIG_MARGIN = 1e-8


def eval_smooth(instance, P):
    """Value of the smooth part f at P."""
    P = validate_coefficients(instance, P, check_finite=False)
    a = instance.kernel_arrays
    return kernels.smooth_value(a.gram_eff, a.xty, a.y_sqnorm, a.eps, P)


def eval_nonsmooth(params, P):
    """Value of the group-lasso part g at P (sum of Euclidean row norms, times lam)."""
    P = np.ascontiguousarray(P, dtype=np.float64)
    if params.lam == 0.0:
        return 0.0
    return params.lam * kernels.row_norm_sum(P)


def eval_full(instance, P):
    """F(P) = f(P) + g(P)."""
    return eval_smooth(instance, P) + eval_nonsmooth(instance.params, P)


def grad_smooth(instance, P):
    """Exact gradient of f.

    Column i is X_i'(X_i p_i - y_i) + theta (D'D) p_i plus the chain term:
    eps*(p_1 - p_2) at the left end, eps*(p_m - p_{m-1}) at the right end and
    eps*(2 p_i - p_{i-1} - p_{i+1}) inside.
    """
    P = validate_coefficients(instance, P, check_finite=False)
    a = instance.kernel_arrays
    return kernels.smooth_grad(a.gram_eff, a.xty, a.eps, P)


def majorization_value(instance, A, P, eta):
    """Quadratic surrogate M_{A,eta}(P) = f(A) + <grad f(A), P-A> + eta/2 ||P-A||^2 + g(P).

    Dominates F(P) whenever eta is at least the Lipschitz constant of grad f.
    """
    if eta <= 0.0:
        raise InvalidStepSizeError(f"eta must be positive, got {eta}")
    A = validate_coefficients(instance, A, check_finite=False)
    P = validate_coefficients(instance, P, check_finite=False)
    delta = P - A
    return (
        eval_smooth(instance, A)
        + float(np.vdot(grad_smooth(instance, A), delta))
        + 0.5 * eta * float(np.vdot(delta, delta))
        + eval_nonsmooth(instance.params, P)
    )


def chain_coupling_max(m):
    """Top eigenvalue of the chain (path-graph) coupling on m tasks: 4 sin^2((m-1)pi/(2m))."""
    if m <= 1:
        return 0.0
    return 4.0 * math.sin((m - 1) * math.pi / (2 * m)) ** 2


def power_extremes(S, tol=1e-10, max_iterations=10000, seed=0):
    """Extremal eigenvalues of a symmetric PSD matrix by power iteration.

    The maximum comes from plain power iteration; the minimum from iterating on
    (lam_max*I - S).  Converged when the residual ||Sv - lam v|| falls below
    tol*max(1, |lam|); deterministic seeded start vector.

    Returns (lam_min, lam_max).  Raises EigenConvergenceError with the last
    residual if either iteration fails to converge.
    """
    S = np.asarray(S, dtype=np.float64)
    lam_max = _power_top(S, tol, max_iterations, seed, what="maximum")
    shifted = lam_max * np.eye(S.shape[0]) - S
    spread = _power_top(shifted, tol, max_iterations, seed, what="minimum (shifted)")
    return lam_max - spread, lam_max


def _power_top(S, tol, max_iterations, seed, what):
    n = S.shape[0]
    if n == 0:
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    residual = np.inf
    for k in range(max_iterations):
        w = S @ v
        lam = float(v @ w)
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= tol * max(1.0, abs(lam)):
            return lam
        nrm = float(np.linalg.norm(w))
        if nrm == 0.0:
            # v lies in the null space: 0 is an exact eigenvalue
            return 0.0
        v = w / nrm
    raise EigenConvergenceError(
        f"power iteration for the {what} eigenvalue did not converge",
        iterations=max_iterations,
        residual=residual,
        tolerance=tol * max(1.0, abs(lam)),
    )


@dataclass(frozen=True)
class SmoothnessConstants:
    """Curvature bounds of f and the spectra they are built from.

    ``L_paper``/``sigma_paper`` follow the closed formulas
    max_i(s_max^i) + theta*d_max + 2*eps and min_i(s_min^i) + theta*d_min + eps.
    ``L_safe``/``sigma_safe`` replace the eps contributions with the chain
    coupling's true spectral range [0, chain_max], so L_safe upper-bounds and
    sigma_safe lower-bounds the Hessian spectrum; solvers default to these.
    """

    per_task_smax: tuple
    per_task_smin: tuple
    d_max: float
    d_min: float
    chain_max: float
    L_paper: float
    L_safe: float
    sigma_paper: float
    sigma_safe: float
    condition_c: float  # L_safe / sigma_safe, None when sigma_safe == 0

    def lipschitz(self, source="safe"):
        _check_source(source)
        return self.L_safe if source == "safe" else self.L_paper

    def strong_convexity(self, source="safe"):
        _check_source(source)
        return self.sigma_safe if source == "safe" else self.sigma_paper


def _check_source(source):
    if source not in ("safe", "paper"):
        raise ValueError(f"constants source must be 'safe' or 'paper', got {source!r}")


def compute_constants(instance, tol=1e-10, max_iterations=10000, seed=0):
    """Extremal spectra of the X_i'X_i and D'D Grams, and the derived constants."""
    theta = instance.params.theta
    eps = instance.params.eps
    smax = []
    smin = []
    for task in instance.tasks:
        X = task.features
        lo, hi = power_extremes(X.T @ X, tol=tol, max_iterations=max_iterations, seed=seed)
        margin = _EIG_MARGIN * max(1.0, hi)
        smax.append(hi + margin)
        smin.append(max(0.0, lo - margin))
    if instance.prior.n_constraints > 0:
        D = instance.prior.rows
        lo, hi = power_extremes(D.T @ D, tol=tol, max_iterations=max_iterations, seed=seed)
        margin = _EIG_MARGIN * max(1.0, hi)
        d_max = hi + margin
        d_min = max(0.0, lo - margin)
    else:
        d_max = 0.0
        d_min = 0.0

    chain_max = chain_coupling_max(instance.m)
    L_paper = max(smax) + theta * d_max + 2.0 * eps
    sigma_paper = min(smin) + theta * d_min + eps
    L_safe = max(smax) + theta * d_max + eps * chain_max
    sigma_safe = min(smin) + theta * d_min  # chain coupling's bottom eigenvalue is 0
    condition_c = L_safe / sigma_safe if sigma_safe > 0.0 else None
    return SmoothnessConstants(
        per_task_smax=tuple(smax),
        per_task_smin=tuple(smin),
        d_max=d_max,
        d_min=d_min,
        chain_max=chain_max,
        L_paper=L_paper,
        L_safe=L_safe,
        sigma_paper=sigma_paper,
        sigma_safe=sigma_safe,
        condition_c=condition_c,
    )
