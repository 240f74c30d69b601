"""Closed-form proximal step for the row-wise group-lasso term.

For U = A - (1/eta) grad f(A), each output row is

    p^i = max(0, 1 - lam / (eta * ||u^i||)) * u^i

which is the unique minimizer of (eta/2)||P - U||_F^2 + lam ||P||_{2,1}; rows
whose norm does not exceed lam/eta collapse to zero (the zero-norm limit is
taken as a zero row).
"""
import numpy as np

from . import kernels
from .errors import InvalidStepSizeError
from .model import validate_coefficients
from .objective import grad_smooth


def prox_of_point(params, U, eta):
    """Row-wise shrinkage of U alone (no gradient step)."""
    if eta <= 0.0:
        raise InvalidStepSizeError(f"eta must be positive, got {eta}")
    U = np.ascontiguousarray(U, dtype=np.float64)
    return kernels.shrink_rows(U, params.lam / eta)


def prox_step(instance, A, eta):
    """One proximal-gradient step from A with step parameter eta."""
    if eta <= 0.0:
        raise InvalidStepSizeError(f"eta must be positive, got {eta}")
    A = validate_coefficients(instance, A, check_finite=False)
    U = A - grad_smooth(instance, A) / eta
    return kernels.shrink_rows(U, instance.params.lam / eta)
