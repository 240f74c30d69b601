"""The five iterative solvers and their shared trace bookkeeping.

All of them iterate the row-shrinkage proximal step; they differ in where the
gradient is taken (current iterate vs. extrapolated point) and how the step
parameter eta is chosen:

* ``gd-constant``        fixed eta = L.
* ``ista-modified``      reverse search restarted at L every iteration: shrink
                         eta by beta until the surrogate test fails, keep the
                         last passing value.
* ``ista-backtracking``  classic forward search: grow eta from a small start
                         until the surrogate dominates; eta never decreases
                         across iterations.
* ``fista-backtracking`` the forward search applied at the momentum
                         extrapolation point with the standard t-sequence.
* ``linear-momentum``    fixed eta = L with momentum weight
                         (sqrt(c)-1)/(sqrt(c)+1), c = L/sigma; linearly
                         convergent, requires sigma > 0, and its objective
                         trace may be non-monotone.

Traces record F(P^k) for k = 0..K and the eta used at each step; runs are
single-threaded and bitwise deterministic for a fixed instance and config.
"""
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import (
    InvalidStepSizeError,
    NonFiniteError,
    StepSearchError,
    StrongConvexityUnavailableError,
)
from .model import validate_coefficients, validate_instance, zero_coefficients
from .objective import compute_constants

ALGORITHMS = (
    "gd-constant",
    "ista-modified",
    "ista-backtracking",
    "fista-backtracking",
    "linear-momentum",
)


@dataclass(frozen=True)
class SolverConfig:
    algorithm: str = "ista-modified"
    max_iterations: int = 1000
    objective_tolerance: float = 1e-3
    beta_shrink: float = 0.5          # reverse-search shrink factor, in (0, 1)
    beta_grow: float = 2.0            # forward-search growth factor, > 1
    constants_source: str = "safe"    # 'safe' or 'paper'
    initial_P: np.ndarray = None      # None means the zero matrix
    search_cap: int = 60              # max shrink/grow tests per iteration
    backtracking_eta0: float = None   # forward-search start, None means L/100
    record_iterates: bool = False     # keep every P^k (needed for the Lyapunov check)
    constants: object = None          # precomputed SmoothnessConstants to reuse

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; pick one of {ALGORITHMS}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.objective_tolerance <= 0.0:
            raise ValueError("objective_tolerance must be > 0")
        if not 0.0 < self.beta_shrink < 1.0:
            raise ValueError("beta_shrink must lie in (0, 1)")
        if self.beta_grow <= 1.0:
            raise ValueError("beta_grow must be > 1")
        if self.search_cap < 1:
            raise ValueError("search_cap must be >= 1")
        if self.constants_source not in ("safe", "paper"):
            raise ValueError("constants_source must be 'safe' or 'paper'")


@dataclass(frozen=True)
class SolverResult:
    algorithm: str
    final_P: np.ndarray
    objective_trace: list        # F(P^k), k = 0..iterations
    stepsize_trace: list         # eta used at step k, k = 1..iterations
    iterations: int
    termination: str             # 'tolerance' | 'max-iterations' | 'stationary'
    min_stepsize_ratio: float    # min_k eta_k / L
    max_stepsize_ratio: float    # max_k eta_k / L
    initial_P: np.ndarray
    best_P: np.ndarray           # iterate with the lowest objective seen
    best_objective: float
    lipschitz_used: float
    strong_convexity_used: float
    iterates: list = None        # every P^k when record_iterates was set


class _Loop:
    """Shared bookkeeping: trace lists, best-seen iterate, stopping tests."""

    def __init__(self, instance, config):
        self.instance = validate_instance(instance)
        self.config = config
        self.arrays = self.instance.kernel_arrays
        consts = config.constants or compute_constants(self.instance)
        self.constants = consts
        self.L = consts.lipschitz(config.constants_source)
        self.sigma = consts.strong_convexity(config.constants_source)
        if config.initial_P is None:
            self.P0 = zero_coefficients(self.instance)
        else:
            self.P0 = validate_coefficients(self.instance, config.initial_P).copy()
        self.f0 = kernels.smooth_value(
            self.arrays.gram_eff, self.arrays.xty, self.arrays.y_sqnorm,
            self.arrays.eps, self.P0,
        )
        self.F0 = self.f0 + _g_value(self.arrays, self.P0)
        self.trace = [self.F0]
        self.steps = []
        self.best_P = self.P0
        self.best_F = self.F0
        self.iterates = [self.P0.copy()] if config.record_iterates else None

    def record(self, P, F, eta):
        self.steps.append(float(eta))
        self.trace.append(float(F))
        if F < self.best_F:
            self.best_F = float(F)
            self.best_P = P
        if self.iterates is not None:
            self.iterates.append(P.copy())

    def result(self, final_P, termination):
        trace = self.trace
        if not np.isfinite(trace).all():
            raise NonFiniteError(f"{self.config.algorithm}: objective trace left finite range")
        ratios = [eta / self.L for eta in self.steps]
        return SolverResult(
            algorithm=self.config.algorithm,
            final_P=final_P,
            objective_trace=trace,
            stepsize_trace=self.steps,
            iterations=len(self.steps),
            termination=termination,
            min_stepsize_ratio=min(ratios),
            max_stepsize_ratio=max(ratios),
            initial_P=self.P0,
            best_P=self.best_P.copy(),
            best_objective=self.best_F,
            lipschitz_used=self.L,
            strong_convexity_used=self.sigma,
            iterates=self.iterates,
        )


# rounding guard for surrogate comparisons: near machine convergence both
# sides agree to O(eps * scale) and a strict test would flip on noise
_SURROGATE_SLACK = 1e-12


def _g_value(arrays, P):
    if arrays.lam == 0.0:
        return 0.0
    return arrays.lam * kernels.row_norm_sum(P)


def _candidate(arrays, A, fA, gradA, eta):
    """Prox step from A at eta; returns (C, f(C), F(C), M_{A,eta}(C))."""
    U = A - gradA / eta
    C = kernels.shrink_rows(U, arrays.lam / eta)
    gC = _g_value(arrays, C)
    fC = kernels.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, C)
    delta = C - A
    M = fA + float(np.vdot(gradA, delta)) + 0.5 * eta * float(np.vdot(delta, delta)) + gC
    return C, fC, fC + gC, M


def _grad(arrays, P):
    return kernels.smooth_grad(arrays.gram_eff, arrays.xty, arrays.eps, P)


def solve_gd_constant(instance, config=None):
    """Proximal gradient descent with the constant step eta = L."""
    config = _with_algorithm(config, "gd-constant")
    loop = _Loop(instance, config)
    arrays = loop.arrays
    P, fP, F = loop.P0, loop.f0, loop.F0
    termination = "max-iterations"
    for _ in range(config.max_iterations):
        gradP = _grad(arrays, P)
        C, fC, FC, _ = _candidate(arrays, P, fP, gradP, loop.L)
        loop.record(C, FC, loop.L)
        stationary = np.array_equal(C, P)
        delta_F = abs(FC - F)
        P, fP, F = C, fC, FC
        if stationary:
            termination = "stationary"
            break
        if delta_F < config.objective_tolerance:
            termination = "tolerance"
            break
    return loop.result(P, termination)


def _modified_search(arrays, P, fP, gradP, eta0, beta, cap):
    """Reverse step search: shrink from eta0 until F(C) > M, keep the last pass.

    Returns (eta, candidate tuple).  The first shrink violating the surrogate
    test at i sends back beta^(i-1)*eta0; if no violation occurs within cap
    shrinks the smallest tested passing value beta^(cap-1)*eta0 is returned.
    """
    prev_eta = eta0
    prev = _candidate(arrays, P, fP, gradP, eta0)
    slack = _SURROGATE_SLACK * (1.0 + abs(fP))
    for i in range(1, cap + 1):
        eta = prev_eta * beta
        cand = _candidate(arrays, P, fP, gradP, eta)
        _, _, FC, M = cand
        if FC > M + slack:
            return prev_eta, prev
        if i == cap:
            break
        prev_eta, prev = eta, cand
    return prev_eta, prev


def search_stepsize_modified(instance, P_prev, eta0, beta, cap=60):
    """The reverse step search as a standalone operation (returns eta only)."""
    if eta0 <= 0.0:
        raise InvalidStepSizeError(f"eta0 must be positive, got {eta0}")
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    instance = validate_instance(instance)
    arrays = instance.kernel_arrays
    P = validate_coefficients(instance, P_prev)
    fP = kernels.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, P)
    eta, _ = _modified_search(arrays, P, fP, _grad(arrays, P), eta0, beta, cap)
    return eta


def solve_ista_modified(instance, config=None):
    """Proximal gradient with the reverse step search restarted at L each iteration."""
    config = _with_algorithm(config, "ista-modified")
    loop = _Loop(instance, config)
    arrays = loop.arrays
    P, fP, F = loop.P0, loop.f0, loop.F0
    termination = "max-iterations"
    for _ in range(config.max_iterations):
        gradP = _grad(arrays, P)
        eta, (C, fC, FC, _) = _modified_search(
            arrays, P, fP, gradP, loop.L, config.beta_shrink, config.search_cap
        )
        loop.record(C, FC, eta)
        stationary = np.array_equal(C, P)
        delta_F = abs(FC - F)
        P, fP, F = C, fC, FC
        if stationary:
            termination = "stationary"
            break
        if delta_F < config.objective_tolerance:
            termination = "tolerance"
            break
    return loop.result(P, termination)


def _forward_search(arrays, A, fA, gradA, eta, grow, cap, algorithm):
    """Classic back-tracking: grow eta until F(C) <= M_{A,eta}(C)."""
    slack = _SURROGATE_SLACK * (1.0 + abs(fA))
    for _ in range(cap + 1):
        cand = _candidate(arrays, A, fA, gradA, eta)
        _, _, FC, M = cand
        if FC <= M + slack:
            return eta, cand
        eta = eta * grow
    raise StepSearchError(
        f"{algorithm}: forward step search exhausted its cap",
        last_eta=eta, residual=FC - M,
    )


def solve_ista_backtracking(instance, config=None):
    """Proximal gradient with the classic forward (growing) step search."""
    config = _with_algorithm(config, "ista-backtracking")
    loop = _Loop(instance, config)
    arrays = loop.arrays
    P, fP, F = loop.P0, loop.f0, loop.F0
    eta = config.backtracking_eta0 or loop.L / 100.0
    termination = "max-iterations"
    for _ in range(config.max_iterations):
        gradP = _grad(arrays, P)
        eta, (C, fC, FC, _) = _forward_search(
            arrays, P, fP, gradP, eta, config.beta_grow, config.search_cap,
            config.algorithm,
        )
        loop.record(C, FC, eta)
        stationary = np.array_equal(C, P)
        delta_F = abs(FC - F)
        P, fP, F = C, fC, FC
        if stationary:
            termination = "stationary"
            break
        if delta_F < config.objective_tolerance:
            termination = "tolerance"
            break
    return loop.result(P, termination)


def fista_t_next(t):
    """Momentum recurrence t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2, from t_1 = 1."""
    return 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))


def solve_fista_backtracking(instance, config=None):
    """Accelerated proximal gradient with forward search at the extrapolated point.

    The trace is non-monotone, so (like the linear-momentum method) termination
    requires three consecutive sub-tolerance objective changes; a single quiet
    step can be a momentum plateau far from the optimum.
    """
    config = _with_algorithm(config, "fista-backtracking")
    loop = _Loop(instance, config)
    arrays = loop.arrays
    P_prev, F = loop.P0, loop.F0
    Y = loop.P0.copy()
    t = 1.0
    eta = config.backtracking_eta0 or loop.L / 100.0
    quiet = 0
    termination = "max-iterations"
    for _ in range(config.max_iterations):
        fY = kernels.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, Y)
        gradY = _grad(arrays, Y)
        eta, (C, _, FC, _) = _forward_search(
            arrays, Y, fY, gradY, eta, config.beta_grow, config.search_cap,
            config.algorithm,
        )
        loop.record(C, FC, eta)
        stationary = np.array_equal(C, P_prev) and np.array_equal(C, Y)
        quiet = quiet + 1 if abs(FC - F) < config.objective_tolerance else 0
        t_next = fista_t_next(t)
        Y = C + ((t - 1.0) / t_next) * (C - P_prev)
        P_prev, F, t = C, FC, t_next
        if stationary:
            termination = "stationary"
            break
        if quiet >= 3:
            termination = "tolerance"
            break
    return loop.result(P_prev, termination)


def solve_linear_momentum(instance, config=None):
    """Momentum method with fixed eta = L and weight (sqrt(c)-1)/(sqrt(c)+1).

    Needs sigma > 0 (c = L/sigma).  The objective trace may be non-monotone, so
    termination requires three consecutive sub-tolerance objective changes.
    """
    config = _with_algorithm(config, "linear-momentum")
    loop = _Loop(instance, config)
    arrays = loop.arrays
    if loop.sigma <= 0.0:
        raise StrongConvexityUnavailableError(
            f"strong convexity constant is {loop.sigma} (source "
            f"{config.constants_source!r}); the momentum method needs sigma > 0"
        )
    c = loop.L / loop.sigma
    coef = (np.sqrt(c) - 1.0) / (np.sqrt(c) + 1.0)
    P_prev, F = loop.P0, loop.F0
    A = loop.P0.copy()
    quiet = 0
    termination = "max-iterations"
    for _ in range(config.max_iterations):
        fA = kernels.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, A)
        gradA = _grad(arrays, A)
        C, _, FC, _ = _candidate(arrays, A, fA, gradA, loop.L)
        loop.record(C, FC, loop.L)
        stationary = np.array_equal(C, P_prev) and np.array_equal(C, A)
        quiet = quiet + 1 if abs(FC - F) < config.objective_tolerance else 0
        A = C + coef * (C - P_prev)
        P_prev, F = C, FC
        if stationary:
            termination = "stationary"
            break
        if quiet >= 3:
            termination = "tolerance"
            break
    return loop.result(P_prev, termination)


_SOLVERS = {
    "gd-constant": solve_gd_constant,
    "ista-modified": solve_ista_modified,
    "ista-backtracking": solve_ista_backtracking,
    "fista-backtracking": solve_fista_backtracking,
    "linear-momentum": solve_linear_momentum,
}


def solve(instance, config):
    """Dispatch on ``config.algorithm``."""
    return _SOLVERS[config.algorithm](instance, config)


def _with_algorithm(config, name):
    if config is None:
        return SolverConfig(algorithm=name)
    if config.algorithm != name:
        raise ValueError(f"config.algorithm is {config.algorithm!r}, expected {name!r}")
    return config


@dataclass(frozen=True)
class ComparisonResult:
    results: list                 # SolverResult per algorithm that finished
    errors: dict = field(default_factory=dict)  # algorithm -> error message


def run_comparison(instance, configs=None, **shared):
    """Run all five algorithms from the same starting point.

    ``shared`` keyword arguments seed every generated config (ignored when
    explicit configs are given).  Per-solver failures are collected in
    ``errors`` instead of aborting the remaining runs.
    """
    instance = validate_instance(instance)
    if configs is None:
        consts = shared.pop("constants", None) or compute_constants(instance)
        configs = [SolverConfig(algorithm=a, constants=consts, **shared) for a in ALGORITHMS]
    else:
        starts = [
            zero_coefficients(instance) if c.initial_P is None
            else validate_coefficients(instance, c.initial_P)
            for c in configs
        ]
        if any(not np.array_equal(starts[0], s) for s in starts[1:]):
            raise ValueError("run_comparison requires the same initial point for all configs")
    results = []
    errors = {}
    for config in configs:
        try:
            results.append(solve(instance, config))
        except (StrongConvexityUnavailableError, StepSearchError, NonFiniteError) as exc:
            errors[config.algorithm] = str(exc)
    return ComparisonResult(results=results, errors=errors)
