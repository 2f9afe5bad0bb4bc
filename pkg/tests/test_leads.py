import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jacobi_transport.errors import NumericalQualityWarning
from jacobi_transport.leads import (
    Lead,
    ac_indicator,
    ac_support_contains,
    free_half_line_borel,
    lead_borel,
    m_function,
)
from jacobi_transport.periodic import PeriodicJacobi, fixed_point_residual, mobius_coefficients
from jacobi_transport.spectral import EnergyGrid

from .conftest import periodic_cells

GOLDEN = (np.sqrt(5) - 1) / 2
FREE1 = PeriodicJacobi(np.ones(1), np.zeros(1))
P2 = PeriodicJacobi(np.array([1.0, 1.0]), np.array([1.0, -1.0]))


def test_free_boundary_values():
    assert lead_borel(Lead.free(), 0.0) == pytest.approx(1j, abs=1e-15)
    F = lead_borel(Lead.free(), 3.0)
    assert F.imag == 0
    assert F.real == pytest.approx((-3 + np.sqrt(5)) / 2, abs=1e-15)
    assert lead_borel(Lead.free(), -3.0).real == pytest.approx((3 - np.sqrt(5)) / 2, abs=1e-15)


def test_free_root_equation():
    E = np.linspace(-4, 4, 101)
    F = free_half_line_borel(E + 0j)
    np.testing.assert_allclose(F**2 + E * F + 1, 0, atol=1e-13)
    assert np.all(F.imag >= 0)


def test_wide_band():
    np.testing.assert_array_equal(lead_borel(Lead.wide_band(1.0), np.array([-5.0, 0.0, 7.0])), 1j)
    with pytest.raises(ValueError):
        Lead.wide_band(0.0)


def test_m_function_examples():
    assert m_function(FREE1, "right", 0.0, eta=1.0) == pytest.approx(1j * GOLDEN, abs=1e-12)
    half = PeriodicJacobi(np.array([0.5]), np.zeros(1))
    assert m_function(half, "right", 0.0) == pytest.approx(2j, abs=1e-12)
    m = m_function(P2, "right", 0.0)
    assert m.imag == 0
    assert abs(m.real) == pytest.approx(GOLDEN, abs=1e-12)


def test_matching_identity():
    E = np.linspace(-1.999, 1.999, 2001)
    np.testing.assert_allclose(m_function(FREE1, "right", E), lead_borel(Lead.free(), E), atol=1e-10)
    np.testing.assert_allclose(m_function(FREE1, "left", E), lead_borel(Lead.free(), E), atol=1e-10)


def _left_dense(per, z, n=3000):
    """Resolvent at site 0 of the half-line (-inf, 0] built site by site from the period rule."""
    L, a, b = per.L, per.a, per.b
    x = -np.arange(n)  # sites 0, -1, -2, ...
    diag = b[(x - 1) % L]
    off = a[(x[:-1] - 2) % L]  # coupling between x and x - 1 is a_{x-1}
    H = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    return np.linalg.solve(H - z * np.eye(n), np.eye(n)[:, 0])[0]


def test_left_m_function_dense_oracle():
    per = PeriodicJacobi(np.array([0.7, 1.3, 0.9]), np.array([0.4, -0.2, 1.0]))
    z = 0.3 + 0.05j
    assert abs(m_function(per, "left", 0.3, eta=0.05) - _left_dense(per, z)) < 1e-10


@given(periodic_cells(), st.floats(-5, 5), st.floats(0, 1))
def test_m_function_herglotz_and_residual(per, E, eta):
    with warnings.catch_warnings():
        warnings.simplefilter("error", NumericalQualityWarning)
        for side in ("left", "right"):
            m = m_function(per, side, E, eta)
            assert m.imag >= 0
            if eta > 0:
                assert m.imag > 0
            cell = per if side == "right" else per.reversed()
            if np.isfinite(m):
                assert fixed_point_residual(*mobius_coefficients(cell, E + 1j * eta), m) < 1e-10


@given(periodic_cells())
def test_periodic_ac_support_is_band_set(per):
    from jacobi_transport.periodic import discriminant

    E = np.linspace(-6, 6, 600)
    D = discriminant(per, E)
    clear = np.abs(np.abs(D) - 2) > 1e-4
    for side in ("left", "right"):
        inside = ac_indicator(Lead.periodic(per, side), E)
        assert np.all(inside[clear] == (np.abs(D) < 2)[clear])


def test_ac_support_examples():
    assert ac_support_contains(Lead.wide_band(2.0), (-10, 10))
    assert ac_support_contains(Lead.free(), (-1, 1))
    assert not ac_support_contains(Lead.free(), (3, 4))
    assert not ac_support_contains(Lead.free(), (1.5, 2.5), EnergyGrid(1.5, 2.5, 100))
    with pytest.raises(ValueError):
        ac_support_contains(Lead.free(), (1, -1))


def test_table_lead(tmp_path):
    E = np.linspace(-2.5, 2.5, 2001)
    F = free_half_line_borel(E + 0j)
    lead = Lead.table(E, F)
    x = np.linspace(-1.5, 1.5, 37)
    np.testing.assert_allclose(lead_borel(lead, x), free_half_line_borel(x + 0j), atol=1e-6)
    with pytest.raises(ValueError):
        lead_borel(lead, 3.0)
    path = tmp_path / "lead.csv"
    path.write_text("E,ReF,ImF\n" + "".join(f"{float(e)!r},{float(f.real)!r},{float(f.imag)!r}\n" for e, f in zip(E, F)))
    from_file = Lead.from_csv(path)
    np.testing.assert_allclose(lead_borel(from_file, x), lead_borel(lead, x))


def test_table_rejects_non_herglotz():
    with pytest.raises(ValueError):
        Lead.table([0.0, 1.0], [1j, -1j])


def test_finite_chain_lead_matches_continued_fraction():
    lead = Lead.truncated_free(4000)
    z = 0.3 + 0.01j
    assert abs(lead_borel(lead, 0.3, 0.01) - free_half_line_borel(z)) < 1e-8
    assert lead.truncatable and not Lead.wide_band().truncatable


def test_lead_json_round_trip():
    for lead in (Lead.free(), Lead.wide_band(0.5), Lead.periodic(P2, "left"), Lead.table([0, 1], [1j, 2j])):
        back = Lead.from_dict(lead.to_dict())
        E = np.array([0.25, 0.75])
        np.testing.assert_allclose(lead_borel(back, E), lead_borel(lead, E))
    with pytest.raises(ValueError):
        Lead("magic")
    with pytest.raises(ValueError):
        Lead.periodic(P2, "up")
