"""Executable forms of the library's convergence guarantees.

Each check evaluates one proved inequality on concrete matrices and reports
both sides.  Inequality slacks are additive: 1e-9 * scale for the pointwise
inequalities and 1e-8 * scale for the trace bounds, with scale = 1 + |F| at the
relevant base point, absorbing accumulated double-precision rounding.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    MissingReferenceError,
    PreconditionError,
    StrongConvexityUnavailableError,
)
from .model import validate_coefficients, validate_instance, zero_coefficients
from .objective import (
    compute_constants,
    eval_full,
    eval_smooth,
    grad_smooth,
    majorization_value,
)
from .prox import prox_step
from .solvers import SolverConfig, solve_fista_backtracking

LEMMA_TOL = 1e-9
BOUND_TOL = 1e-8
_PRECONDITION_SLACK = 1e-12


@dataclass(frozen=True)
class InequalityCheck:
    lhs: float
    rhs: float
    holds: bool


def _fro2(M):
    return float(np.vdot(M, M))


def check_lemma1(instance, A, P, eta, tol=LEMMA_TOL):
    """Prox-descent inequality.

    Requires F(prox_eta(P)) <= M_{P,eta}(prox_eta(P)) (else the check is
    inapplicable); then verifies, writing Q for the prox output,

        F(A) - F(Q) >= (eta/2) ||Q - P||^2 + eta <P - A, Q - P>.
    """
    instance = validate_instance(instance)
    A = validate_coefficients(instance, A)
    P = validate_coefficients(instance, P)
    Q = prox_step(instance, P, eta)
    F_Q = eval_full(instance, Q)
    F_A = eval_full(instance, A)
    F_P = eval_full(instance, P)
    scale = 1.0 + max(abs(F_A), abs(F_P))
    surrogate = majorization_value(instance, P, Q, eta)
    if F_Q > surrogate + _PRECONDITION_SLACK * scale:
        raise PreconditionError(
            f"F(prox) = {F_Q:.12g} exceeds the surrogate {surrogate:.12g} at eta={eta:.6g}; "
            "the inequality's hypothesis fails"
        )
    diff = Q - P
    lhs = F_A - F_Q
    rhs = 0.5 * eta * _fro2(diff) + eta * float(np.vdot(P - A, diff))
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - tol * scale)


def check_lemma2(instance, x, y, alpha, sigma=None, tol=LEMMA_TOL):
    """Three-point descent inequality at step alpha.

    Requires the smooth-descent condition
    f(Q) <= f(y) + <grad f(y), Q - y> + (alpha/2)||Q - y||^2 for Q = prox_alpha(y);
    then verifies

        F(x) - F(Q) >= (alpha/2)||x - Q||^2 - (alpha/2)||x - y||^2
                       + f(x) - f(y) - <grad f(y), x - y>.

    With ``sigma`` given, the trailing three terms are replaced by their
    strong-convexity lower bound (sigma/2)||x - y||^2.
    """
    instance = validate_instance(instance)
    x = validate_coefficients(instance, x)
    y = validate_coefficients(instance, y)
    Q = prox_step(instance, y, alpha)
    f_y = eval_smooth(instance, y)
    g_y = grad_smooth(instance, y)
    f_Q = eval_smooth(instance, Q)
    F_x = eval_full(instance, x)
    F_y = eval_full(instance, y)
    scale = 1.0 + max(abs(F_x), abs(F_y))
    dQ = Q - y
    descent_rhs = f_y + float(np.vdot(g_y, dQ)) + 0.5 * alpha * _fro2(dQ)
    if f_Q > descent_rhs + _PRECONDITION_SLACK * scale:
        raise PreconditionError(
            f"smooth-descent condition fails at alpha={alpha:.6g}: "
            f"f(prox) = {f_Q:.12g} > {descent_rhs:.12g}"
        )
    lhs = F_x - eval_full(instance, Q)
    rhs = 0.5 * alpha * _fro2(x - Q) - 0.5 * alpha * _fro2(x - y)
    if sigma is None:
        rhs += eval_smooth(instance, x) - f_y - float(np.vdot(g_y, x - y))
    else:
        rhs += 0.5 * sigma * _fro2(x - y)
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - tol * scale)


def check_lemma3(a, b, beta, rel_tol=1e-12):
    """Completing-the-square identity, exact for any vectors a, b and beta < 1:

        ||a + b||^2 - beta ||a||^2
            = (1 - beta) ||a + b/(1-beta)||^2 - beta/(1-beta) ||b||^2.

    Relative error is measured against the largest participating term.
    """
    if beta >= 1.0:
        raise ValueError(f"beta must be < 1, got {beta}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    t1 = _fro2(a + b)
    t2 = beta * _fro2(a)
    t3 = (1.0 - beta) * _fro2(a + b / (1.0 - beta))
    t4 = beta / (1.0 - beta) * _fro2(b)
    lhs = t1 - t2
    rhs = t3 - t4
    denom = max(1.0, abs(t1), abs(t2), abs(t3), abs(t4))
    return InequalityCheck(lhs=lhs, rhs=rhs, holds=abs(lhs - rhs) <= rel_tol * denom)


@dataclass(frozen=True)
class ReferenceSolution:
    """High-accuracy optimum estimate used as F* in the bound checks."""

    P: np.ndarray
    objective: float


def estimate_optimum(instance, iterations=100_000):
    """Accelerated solve pushed to machine tolerance, then a monotone polish.

    The polish repeats plain prox steps from the best accelerated iterate until
    the objective stops strictly decreasing, so the returned value sits at the
    solver family's numerical floor.  Deterministic: repeated calls agree.
    """
    instance = validate_instance(instance)
    consts = compute_constants(instance)
    F0 = eval_full(instance, zero_coefficients(instance))
    config = SolverConfig(
        algorithm="fista-backtracking",
        max_iterations=iterations,
        # absolute 1e-14 is below one ulp at typical objective scales
        objective_tolerance=1e-14 * (1.0 + abs(F0)),
        constants=consts,
    )
    result = solve_fista_backtracking(instance, config)
    P = result.best_P
    # near the floor, objective comparisons are rounding-dominated while the
    # prox iterate still contracts, so the polish watches the iterate instead
    for _ in range(5000):
        P_next = prox_step(instance, P, consts.L_safe)
        step = float(np.linalg.norm(P_next - P))
        P = P_next
        if step <= 1e-15 * (1.0 + float(np.linalg.norm(P))):
            break
    F = eval_full(instance, P)
    if result.best_objective < F:
        return ReferenceSolution(P=result.best_P, objective=result.best_objective)
    return ReferenceSolution(P=P, objective=F)


@dataclass(frozen=True)
class ConvergenceCertificate:
    kind: str                    # 'sublinear' or 'linear'
    reference_optimum_F: float
    reference_P: np.ndarray
    V_trace: list                # F(P^k) - F*, k = 0..K
    bound_trace: list            # theorem bound per k (inf where undefined)
    satisfied: bool
    max_violation: float         # max over k of V_k - bound_k (unslacked)
    slack: float
    lyapunov_checked: bool = False


def check_sublinear_bound(result, reference, L, tol=BOUND_TOL):
    """V_k <= beta * L * ||P* - P^0||^2 / (2k) for every k >= 1.

    ``beta`` is the run's max_stepsize_ratio (step sizes satisfied
    alpha*L <= eta_k <= beta*L); applies to the monotone prox-gradient runs.
    """
    if reference is None:
        raise MissingReferenceError("check_sublinear_bound needs a reference optimum")
    if result.algorithm not in ("ista-modified", "gd-constant"):
        raise ValueError(
            f"sublinear certificate applies to ista-modified/gd-constant runs, "
            f"got {result.algorithm!r}"
        )
    scale = 1.0 + abs(result.objective_trace[0])
    slack = tol * scale
    dist2 = _fro2(reference.P - result.initial_P)
    top = result.max_stepsize_ratio * L * dist2 / 2.0
    V = [F - reference.objective for F in result.objective_trace]
    bounds = [np.inf] + [top / k for k in range(1, len(V))]
    violations = [v - b for v, b in zip(V[1:], bounds[1:])]
    max_violation = max(violations) if violations else 0.0
    return ConvergenceCertificate(
        kind="sublinear",
        reference_optimum_F=reference.objective,
        reference_P=reference.P,
        V_trace=V,
        bound_trace=bounds,
        satisfied=max_violation <= slack,
        max_violation=max_violation,
        slack=slack,
    )


def check_linear_bound(result, reference, L, sigma, tol=BOUND_TOL):
    """Geometric decay of the momentum run:

        V_k <= (1 - 1/t)^k (V_0 + sigma/2 ||P^0 - P*||^2),   t = sqrt(L/sigma).

    When the run recorded its iterates, additionally checks the stronger
    Lyapunov decrease of V_k + sigma/2 ||t P^k - (P* + (t-1) P^{k-1})||^2
    against the same geometric envelope.
    """
    if reference is None:
        raise MissingReferenceError("check_linear_bound needs a reference optimum")
    if sigma <= 0.0:
        raise StrongConvexityUnavailableError(f"sigma must be positive, got {sigma}")
    t = np.sqrt(L / sigma)
    factor = 1.0 - 1.0 / t
    scale = 1.0 + abs(result.objective_trace[0])
    slack = tol * scale
    V = [F - reference.objective for F in result.objective_trace]
    start = V[0] + 0.5 * sigma * _fro2(result.initial_P - reference.P)
    bounds = [start]
    for _ in range(len(V) - 1):
        bounds.append(bounds[-1] * factor)
    violations = [v - b for v, b in zip(V[1:], bounds[1:])]
    lyapunov_checked = result.iterates is not None
    if lyapunov_checked:
        Pstar = reference.P
        for k in range(1, len(V)):
            Pk = result.iterates[k]
            Pk_prev = result.iterates[k - 1]
            lyap = V[k] + 0.5 * sigma * _fro2(t * Pk - (Pstar + (t - 1.0) * Pk_prev))
            violations.append(lyap - bounds[k])
    max_violation = max(violations) if violations else 0.0
    return ConvergenceCertificate(
        kind="linear",
        reference_optimum_F=reference.objective,
        reference_P=reference.P,
        V_trace=V,
        bound_trace=bounds,
        satisfied=max_violation <= slack,
        max_violation=max_violation,
        slack=slack,
        lyapunov_checked=lyapunov_checked,
    )
