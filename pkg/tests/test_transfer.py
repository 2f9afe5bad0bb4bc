import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacobi_transport.models import JacobiModel
from jacobi_transport.transfer import (
    Matrix2,
    TransferOverflowError,
    eigenfunction,
    one_step_matrix,
    spectral_norm,
    transfer_log_norms,
    transfer_matrix,
)

from .conftest import explicit_models, zoo_models


def _mp_product(model, E, n):
    """Oracle: 40-digit product of the one-step matrices."""
    mp.mp.dps = 40
    T = mp.eye(2)
    for ak, bk in zip(model.offdiagonal(n), model.diagonal(n)):
        ak, bk = mp.mpf(ak), mp.mpf(bk)
        T = mp.matrix([[(E - bk) / ak, -1 / ak], [ak, 0]]) * T
    return T


def test_one_step_examples():
    np.testing.assert_array_equal(one_step_matrix(0, 1, 0).array, [[0, -1], [1, 0]])
    np.testing.assert_array_equal(one_step_matrix(2, 1, 0).array, [[2, -1], [1, 0]])
    assert abs(one_step_matrix(2.7, 0.3, -1.1).det() - 1) < 1e-12


def test_one_step_domain():
    with pytest.raises(ValueError):
        one_step_matrix(0, 0.0, 0)
    with pytest.raises(ValueError):
        one_step_matrix(0, -1.0, 0)


def test_free_products():
    free = JacobiModel.free()
    np.testing.assert_array_equal(transfer_matrix(free, 0, 2).array, [[-1, 0], [0, -1]])
    for n in range(1, 101):
        assert abs(transfer_matrix(free, 0, n).norm() - 1) < 1e-14


def test_anderson_lyapunov_growth():
    m = JacobiModel.anderson(3.0, 7)
    ns = np.array([25, 50, 100])
    logs = np.array([transfer_matrix(m, 0.0, n).log_norm() for n in ns])
    slope = np.polyfit(ns, logs, 1)[0]
    assert slope > 0
    assert logs[-1] > logs[0]


def test_spectral_norm_matches_svd(rng):
    for _ in range(200):
        M = rng.normal(size=(2, 2)) * 10 ** rng.uniform(-3, 3)
        assert abs(spectral_norm(M) - np.linalg.svd(M, compute_uv=False)[0]) <= 1e-12 * spectral_norm(M)
    C = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert abs(spectral_norm(C) - np.linalg.svd(C, compute_uv=False)[0]) < 1e-12


@given(zoo_models, st.floats(-3, 3), st.integers(1, 60))
def test_product_matches_high_precision(model, E, n):
    T = transfer_matrix(model, E, n)
    ref = _mp_product(model, E, n)
    scale = float(mp.norm(ref, 2))
    err = max(abs(float(ref[i, j]) - T.array[i, j]) for i in range(2) for j in range(2))
    assert err <= 1e-10 * max(scale, 1.0)


@given(zoo_models, st.floats(-3, 3), st.integers(1, 1000))
def test_det_one(model, E, n):
    # T = exp(s) m, so det T = 1 means det m = exp(-2 s); rounding scales with ||m||^2
    T = transfer_matrix(model, E, n)
    m = T.m
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    assert abs(det - math.exp(-2 * T.log_scale)) <= n * 1e-14 * spectral_norm(m) ** 2


@given(zoo_models, st.floats(-3, 3), st.integers(1, 500))
def test_norm_at_least_one(model, E, n):
    assert transfer_matrix(model, E, n).log_norm() >= -1e-12


@given(explicit_models(min_len=3, max_len=12), st.floats(-3, 3), st.data())
def test_cocycle(model, E, data):
    full = JacobiModel.explicit(model.offdiagonal(model.length - 1).tolist() + [1.0], model.diagonal(model.length))
    N = full.length
    n = data.draw(st.integers(1, N - 1))
    head = transfer_matrix(full, E, n).array
    tail = transfer_matrix(full.shifted(n), E, N - n).array
    whole = transfer_matrix(full, E, N).array
    np.testing.assert_allclose(tail @ head, whole, rtol=1e-12, atol=1e-12 * np.abs(whole).max())


def test_log_scaled_mode_matches_plain():
    m = JacobiModel.anderson(3.0, 7)
    plain = transfer_matrix(m, 0.3, 300, log_scaled=False)
    scaled = transfer_matrix(m, 0.3, 300, log_scaled=True)
    assert abs(plain.log_norm() - scaled.log_norm()) < 1e-10


def test_overflow_reports_last_valid_n():
    m = JacobiModel.anderson(3.0, 7)
    with pytest.raises(TransferOverflowError) as info:
        transfer_matrix(m, 0.1, 20000, log_scaled=False)
    assert 1000 < info.value.last_valid_n < 20000
    # automatic mode survives the same product
    assert transfer_matrix(m, 0.1, 20000).log_norm() > 100


def test_vectorized_log_norms_match_scalar():
    m = JacobiModel.almost_mathieu(2.0)
    E = np.linspace(-2.5, 2.5, 7)
    logs = transfer_log_norms(m, E, [5, 40, 400])
    for i, n in enumerate([5, 40, 400]):
        for j, e in enumerate(E):
            assert abs(logs[i, j] - transfer_matrix(m, e, n).log_norm()) < 1e-9


def test_eigenfunction_examples():
    free = JacobiModel.free()
    np.testing.assert_allclose(eigenfunction(free, 0.0, 8), [0, 1, 0, -1, 0, 1, 0, -1, 0], atol=0)
    np.testing.assert_allclose(eigenfunction(free, 2.0, 20), np.arange(21), atol=1e-12)


@given(zoo_models, st.floats(-3, 3), st.integers(1, 80), st.floats(-2, 2))
def test_eigenfunction_transfer_consistency(model, E, n, theta):
    u = eigenfunction(model, E, n + 1, theta)
    T = transfer_matrix(model, E, n).array
    lhs = np.array([u[n + 1], model.offdiagonal(n)[-1] * u[n]])
    rhs = T @ np.array([1.0, theta])
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs)))


def test_eigenfunction_consistency_example():
    m = JacobiModel.anderson(3.0, 7)
    u = eigenfunction(m, 1.3, 38)
    T = transfer_matrix(m, 1.3, 37).array
    lhs = np.array([u[38], m.offdiagonal(37)[-1] * u[37]])
    assert np.max(np.abs(lhs - T[:, 0])) < 1e-10 * np.max(np.abs(T))


def test_matrix2_matmul():
    A = one_step_matrix(0.5, 1.2, 0.1)
    B = Matrix2(np.eye(2) * 2.0, math.log(3.0))
    np.testing.assert_allclose((A @ B).array, A.array @ B.array)
