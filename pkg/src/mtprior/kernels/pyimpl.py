"""Pure-numpy kernel backend.

Mirrors the compiled ``_core`` extension one function for one function; the
dispatcher in ``__init__`` picks whichever is available.
"""
import numpy as np


def smooth_value(gram_eff, xty, y_sqnorm, eps, P):
    """0.5*sum_t p_t' G_t p_t - sum_t b_t.p_t + 0.5*||y||^2 + path term.

    ``gram_eff`` already folds the prior penalty (X_t'X_t + theta D'D), so this
    is the full smooth objective value.
    """
    gp = np.einsum("tij,jt->it", gram_eff, P)
    value = 0.5 * float((P * gp).sum()) - float((xty * P).sum()) + 0.5 * y_sqnorm
    if eps != 0.0 and P.shape[1] > 1:
        diff = P[:, :-1] - P[:, 1:]
        value += 0.5 * eps * float((diff * diff).sum())
    return value


def smooth_grad(gram_eff, xty, eps, P):
    """Column t: G_t p_t - b_t, plus the chain-difference coupling."""
    grad = np.einsum("tij,jt->it", gram_eff, P)
    grad -= xty
    if eps != 0.0 and P.shape[1] > 1:
        diff = P[:, :-1] - P[:, 1:]
        grad[:, :-1] += eps * diff
        grad[:, 1:] -= eps * diff
    return grad


def row_norm_sum(P):
    """Sum of Euclidean row norms (the 2,1 matrix norm)."""
    return float(np.sqrt((P * P).sum(axis=1)).sum())


def shrink_rows(U, thresh):
    """Row-wise shrinkage: scale each row by max(0, 1 - thresh/||row||).

    Rows with norm <= thresh (including zero rows) map to zero rows.
    """
    norms = np.sqrt((U * U).sum(axis=1))
    factors = np.zeros_like(norms)
    mask = norms > thresh
    factors[mask] = 1.0 - thresh / norms[mask]
    return U * factors[:, None]
