"""Inner-loop kernels with a compiled core and a pure-numpy fallback.

The backend is chosen once at import time: the Cython extension ``_core`` when
it built successfully, otherwise ``pyimpl``.  Set ``MTPRIOR_KERNELS=python`` or
``MTPRIOR_KERNELS=compiled`` to force one side (the latter raises if the
extension is missing).  Within a backend all kernels are single-threaded and
bitwise deterministic.
"""
import os
from dataclasses import dataclass

import numpy as np

_requested = os.environ.get("MTPRIOR_KERNELS", "auto").strip().lower()
if _requested in ("auto", ""):
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        from . import pyimpl as _impl
        BACKEND = "python"
elif _requested in ("compiled", "c"):
    from . import _core as _impl
    BACKEND = "compiled"
elif _requested in ("python", "py"):
    from . import pyimpl as _impl
    BACKEND = "python"
else:
    raise ValueError(
        f"MTPRIOR_KERNELS={_requested!r} not understood (use 'auto', 'compiled' or 'python')"
    )

smooth_value = _impl.smooth_value
smooth_grad = _impl.smooth_grad
row_norm_sum = _impl.row_norm_sum
shrink_rows = _impl.shrink_rows


@dataclass(frozen=True)
class InstanceArrays:
    """Per-instance constants consumed by the kernels.

    ``gram_eff[t] = X_t' X_t + theta * D'D`` so the prior penalty rides along in
    the quadratic term; ``xty[:, t] = X_t' y_t``; ``y_sqnorm = sum_t ||y_t||^2``.
    """

    gram_eff: np.ndarray
    xty: np.ndarray
    y_sqnorm: float
    eps: float
    lam: float


def build_arrays(instance):
    """Precompute the Gram-form arrays for one problem instance."""
    d = instance.d
    m = instance.m
    gram = np.empty((m, d, d))
    xty = np.empty((d, m))
    y_sqnorm = 0.0
    for t, task in enumerate(instance.tasks):
        X = task.features
        y = task.responses
        gram[t] = X.T @ X
        xty[:, t] = X.T @ y
        y_sqnorm += float(y @ y)
    theta = instance.params.theta
    if theta != 0.0 and instance.prior.n_constraints > 0:
        D = instance.prior.rows
        gram += theta * (D.T @ D)[None, :, :]
    return InstanceArrays(
        gram_eff=np.ascontiguousarray(gram),
        xty=np.ascontiguousarray(xty),
        y_sqnorm=y_sqnorm,
        eps=instance.params.eps,
        lam=instance.params.lam,
    )
