"""Backend equivalence: the compiled extension against the numpy fallback."""
import importlib

import numpy as np
import pytest

from mtprior.kernels import build_arrays, pyimpl

from helpers import direct_objective, random_instance

_core = None
try:
    _core = importlib.import_module("mtprior.kernels._core")
except ImportError:
    pass

needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


def _both():
    return [pyimpl] + ([_core] if _core is not None else [])


def test_smooth_value_matches_direct_definition():
    instance = random_instance(seed=0, d=6, m=4, theta=1.5, eps=0.7, lam=0.0)
    arrays = build_arrays(instance)
    rng = np.random.default_rng(0)
    for backend in _both():
        for _ in range(10):
            P = rng.standard_normal((6, 4))
            got = backend.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, P)
            want = direct_objective(instance, P, include_nonsmooth=False)
            assert got == pytest.approx(want, rel=1e-12)


@needs_core
def test_backends_agree():
    instance = random_instance(seed=1, d=8, m=5, theta=2.0, eps=1.3, lam=0.9)
    arrays = build_arrays(instance)
    rng = np.random.default_rng(1)
    for _ in range(20):
        P = rng.standard_normal((8, 5))
        U = rng.standard_normal((8, 5)) * 3
        v_py = pyimpl.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, P)
        v_c = _core.smooth_value(arrays.gram_eff, arrays.xty, arrays.y_sqnorm, arrays.eps, P)
        assert v_c == pytest.approx(v_py, rel=1e-12)
        g_py = pyimpl.smooth_grad(arrays.gram_eff, arrays.xty, arrays.eps, P)
        g_c = _core.smooth_grad(arrays.gram_eff, arrays.xty, arrays.eps, P)
        np.testing.assert_allclose(g_c, g_py, rtol=1e-11, atol=1e-12)
        assert _core.row_norm_sum(P) == pytest.approx(pyimpl.row_norm_sum(P), rel=1e-13)
        s_py = pyimpl.shrink_rows(U, 0.8)
        s_c = _core.shrink_rows(U, 0.8)
        np.testing.assert_allclose(s_c, s_py, rtol=1e-13, atol=0)


def test_shrink_rows_zero_threshold_is_identity():
    rng = np.random.default_rng(2)
    U = rng.standard_normal((5, 3))
    U[2] = 0.0
    for backend in _both():
        out = backend.shrink_rows(U, 0.0)
        assert np.array_equal(out, U)


def test_gram_folding_includes_prior():
    instance = random_instance(seed=3, d=5, m=2, theta=3.0, eps=0.0, s=3)
    arrays = build_arrays(instance)
    DtD = instance.prior.rows.T @ instance.prior.rows
    for t, task in enumerate(instance.tasks):
        expected = task.features.T @ task.features + 3.0 * DtD
        np.testing.assert_allclose(arrays.gram_eff[t], expected, rtol=1e-14)


def test_backend_name_exported():
    import mtprior

    assert mtprior.kernel_backend in ("compiled", "python")
