import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacobi_transport.errors import NumericalQualityWarning
from jacobi_transport.measures import DiscreteMeasure, measure_to_jacobi
from jacobi_transport.models import JacobiModel
from jacobi_transport.spectral import (
    EnergyGrid,
    ac_density,
    borel_transform,
    sigma_ac_probe,
    smoothed_weak_density,
    tm_inverse_square_integral,
    tm_inverse_square_integrals,
    weak_density_approx,
)

from .conftest import explicit_models, zoo_models
from .test_measures import measures

GOLDEN = (np.sqrt(5) - 1) / 2
# int_{-1}^{1} ||A_E||^{-2} dE for A_E = [[E, -1], [1, 0]], 30-digit quadrature of
# 2 / (E^2 + 2 + |E| sqrt(E^2 + 4))
TM_L1_FREE = 1.27322003750035050598471055211

upper = st.tuples(st.floats(-5, 5), st.floats(1e-3, 5)).map(lambda t: complex(t[0], t[1]))


def test_borel_examples():
    assert borel_transform(JacobiModel.explicit([], [0.0]), 1j) == pytest.approx(1j, abs=1e-15)
    assert borel_transform(JacobiModel.free(), 1j) == pytest.approx(1j * GOLDEN, abs=1e-12)
    nu = DiscreteMeasure([-1.0, 1.0], [0.5, 0.5])
    assert borel_transform(nu, 1j) == pytest.approx(0.5j, abs=1e-15)


def test_free_zero_tail_converges_to_self_similar():
    z = 0.4 + 0.05j
    exact = borel_transform(JacobiModel.free(), z, tail="self-similar")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalQualityWarning)
        cf = borel_transform(JacobiModel.free(), z, tail="zero", depth=4000)
    assert abs(cf - exact) < 1e-8


def test_depth_warning():
    with pytest.warns(NumericalQualityWarning):
        borel_transform(JacobiModel.free(), 0.1 + 1e-6j, tail="zero", depth=50)


def test_model_domain_error():
    with pytest.raises(ValueError):
        borel_transform(JacobiModel.free(), 0.5)
    with pytest.raises(ValueError):
        borel_transform(JacobiModel.free(), 0.5 - 1j)


def test_measure_off_support_real_z():
    nu = DiscreteMeasure([-1.0, 1.0], [0.5, 0.5])
    assert borel_transform(nu, 0.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        borel_transform(nu, 1.0)


@given(zoo_models, upper)
def test_herglotz_models(model, z):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalQualityWarning)
        assert borel_transform(model, z, depth=2000).imag > 0


@given(explicit_models(), upper)
def test_herglotz_finite(model, z):
    assert borel_transform(model, z).imag > 0


@given(measures())
def test_normalization_at_infinity(nu):
    z = 1e6j
    assert abs(-z * borel_transform(nu, z) - 1) < 1e-5


@given(measures(), upper)
def test_measure_and_jacobi_agree(nu, z):
    model = measure_to_jacobi(nu, len(nu))
    assert abs(borel_transform(nu, z) - borel_transform(model, z)) < 1e-9


def test_ac_density_free():
    assert abs(ac_density(JacobiModel.free(), 0.0) - 1 / np.pi) < 1e-4
    assert ac_density(JacobiModel.free(), 3.0) < 1e-4


def test_ac_density_requires_positive_eta():
    with pytest.raises(ValueError):
        ac_density(JacobiModel.free(), 0.0, eta=0.0)


def test_ac_density_anderson_decreases_with_eta():
    m = JacobiModel.anderson(3.0, 7)
    E = np.linspace(-0.5, 0.5, 41)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NumericalQualityWarning)
        rho = [np.median(ac_density(m, E, eta, depth=10_000)) for eta in (1e-2, 1e-3, 1e-4)]
    assert rho[0] > rho[1] > rho[2]
    assert rho[2] < 0.05


def test_weak_density_examples():
    free = JacobiModel.free()
    assert weak_density_approx(free, 0.0, 4) == pytest.approx(1 / np.pi, rel=1e-14)
    assert weak_density_approx(free, 2.0, 10) == pytest.approx(1 / (np.pi * 221), rel=1e-12)


def test_weak_density_converges_weakly():
    free = JacobiModel.free()
    E = np.linspace(-1, 1, 101)
    approx = smoothed_weak_density(free, E, 200, 0.05)
    exact = ac_density(free, E)
    assert np.corrcoef(approx, exact)[0, 1] > 0.99


def test_tm_integral_L1_oracle():
    val = tm_inverse_square_integral(JacobiModel.free(), (-1, 1), 1)
    assert abs(val - TM_L1_FREE) < 1e-6


def test_tm_integral_free_plateau():
    vals = tm_inverse_square_integrals(JacobiModel.free(), (-1, 1), [10, 100, 1000])
    assert np.all((vals >= 0.5) & (vals <= 2))
    assert vals.max() / vals.min() < 1.2


def test_tm_integral_anderson_decreasing():
    vals = tm_inverse_square_integrals(JacobiModel.anderson(3.0, 7), (-1, 1), [25, 50, 100, 200])
    assert np.all(np.diff(vals) < 0)
    logs = np.log(vals)
    fit = np.polyfit([25, 50, 100, 200], logs, 1)
    assert fit[0] < 0


@given(zoo_models, st.integers(1, 300), st.floats(-3, 2.5), st.floats(0.1, 2))
def test_tm_integral_bounded_by_length(model, L, a, width):
    val = tm_inverse_square_integrals(model, (a, a + width), [L], EnergyGrid(a, a + width, 200))[0]
    assert 0 <= val <= width + 1e-12


def test_tm_integral_refinement_warning():
    with pytest.warns(NumericalQualityWarning):
        tm_inverse_square_integral(JacobiModel.almost_mathieu(0.5), (-1, 1), 500, EnergyGrid(-1, 1, 20))


def test_sigma_ac_probe_examples():
    free = JacobiModel.free()
    p = sigma_ac_probe(free, EnergyGrid(-1, 1, 200), [10, 50, 100])
    assert all(v == "bounded" for v in p.verdicts)
    assert np.all(p.min_norm <= 2)
    p = sigma_ac_probe(free, EnergyGrid(3, 4, 50), [10, 50, 100])
    assert all(v == "growing" for v in p.verdicts)
    p = sigma_ac_probe(JacobiModel.anderson(3.0, 7), EnergyGrid(-1, 1, 200), [200, 400, 1000])
    assert np.mean(p.bounded) < 0.5
    E, v, verdict = next(p.rows())
    assert verdict in ("bounded", "growing")


def test_sigma_ac_probe_needs_increasing():
    with pytest.raises(ValueError):
        sigma_ac_probe(JacobiModel.free(), EnergyGrid(-1, 1, 10), [10, 5])


def test_gilbert_pearson_direction():
    free = JacobiModel.free()
    grid = EnergyGrid(-1.9, 1.9, 100)
    p = sigma_ac_probe(free, grid, [10, 100, 1000])
    rho = ac_density(free, grid.nodes)
    assert np.all(rho[p.bounded] > 0.1)


def test_energy_grid():
    g = EnergyGrid(-1, 1, 4)
    x, w = g.nodes_weights()
    np.testing.assert_allclose(x, [-0.75, -0.25, 0.25, 0.75])
    assert w.sum() == pytest.approx(2)
    x, w = EnergyGrid(-1, 1, 5, rule="gauss-legendre").nodes_weights()
    assert np.sum(w * x**8) == pytest.approx(2 / 9)
    with pytest.raises(ValueError):
        EnergyGrid(1, -1)
    with pytest.raises(ValueError):
        EnergyGrid(-1, 1, 1)
    with pytest.raises(ValueError):
        EnergyGrid(-1, 1, eta=-1)
