"""Reservoirs: boundary values of their Borel transforms and ac supports."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import NumericalQualityWarning
from .periodic import PeriodicJacobi, fixed_point_residual, fixed_points, mobius_coefficients
from .spectral import _continued_fraction

LEAD_KINDS = ("free-half-line", "wide-band", "periodic-half-line", "table", "finite-chain")
AC_TOL = 1e-8
BRANCH_ETA = 1e-8


@dataclass(frozen=True, eq=False)
class Lead:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    mu: float | None = None

    def __post_init__(self):
        if self.kind not in LEAD_KINDS:
            raise ValueError(f"unknown lead kind {self.kind!r}")
        if self.kind == "wide-band" and not self.params.get("gamma", 0) > 0:
            raise ValueError("wide-band lead needs gamma > 0")
        if self.kind == "periodic-half-line":
            if self.params.get("side") not in ("left", "right"):
                raise ValueError("periodic lead side must be 'left' or 'right'")
            if not isinstance(self.params.get("per"), PeriodicJacobi):
                object.__setattr__(
                    self, "params", {**self.params, "per": PeriodicJacobi.from_dict(self.params["per"])}
                )
        if self.kind == "table":
            E = np.asarray(self.params["E"], dtype=float)
            F = np.asarray(self.params["F"], dtype=complex)
            if len(E) < 2 or np.any(np.diff(E) <= 0):
                raise ValueError("table lead needs at least two strictly increasing energies")
            if np.any(F.imag < 0):
                raise ValueError("table lead has Im F < 0 (not a Herglotz boundary value)")
            object.__setattr__(self, "_re", PchipInterpolator(E, F.real, extrapolate=False))
            object.__setattr__(self, "_im", PchipInterpolator(E, F.imag, extrapolate=False))
        if self.kind == "finite-chain":
            a = np.asarray(self.params.get("a", []), dtype=float)
            b = np.asarray(self.params["b"], dtype=float)
            if len(b) == 0 or len(a) != len(b) - 1 or np.any(a <= 0):
                raise ValueError("finite-chain lead needs b (n entries) and positive a (n - 1 entries)")

    @classmethod
    def free(cls) -> Lead:
        return cls("free-half-line")

    @classmethod
    def wide_band(cls, gamma: float = 1.0) -> Lead:
        return cls("wide-band", {"gamma": float(gamma)})

    @classmethod
    def periodic(cls, per: PeriodicJacobi, side: str) -> Lead:
        return cls("periodic-half-line", {"per": per, "side": side})

    @classmethod
    def table(cls, E, F) -> Lead:
        return cls("table", {"E": list(map(float, E)), "F": [complex(x) for x in F]})

    @classmethod
    def finite_chain(cls, a, b) -> Lead:
        """Finite reservoir with sites ordered outward from the contact."""
        return cls("finite-chain", {"a": list(map(float, a)), "b": list(map(float, b))})

    @classmethod
    def truncated_free(cls, M: int) -> Lead:
        return cls.finite_chain(np.ones(M - 1), np.zeros(M))

    @classmethod
    def from_csv(cls, path) -> Lead:
        """Tabulated lead from a CSV with columns ``E, ReF, ImF``."""
        E, F = [], []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                E.append(float(row["E"]))
                F.append(complex(float(row["ReF"]), float(row["ImF"])))
        return cls.table(E, F)

    def with_mu(self, mu: float) -> Lead:
        return replace(self, mu=mu)

    @property
    def truncatable(self) -> bool:
        return self.kind in ("free-half-line", "periodic-half-line", "finite-chain")

    def to_dict(self) -> dict:
        params = dict(self.params)
        if self.kind == "periodic-half-line":
            params["per"] = params["per"].to_dict()
        if self.kind == "table":
            params = {"E": params["E"], "ReF": [f.real for f in params["F"]], "ImF": [f.imag for f in params["F"]]}
        return {"kind": self.kind, "params": params}

    @classmethod
    def from_dict(cls, d: dict) -> Lead:
        params = dict(d.get("params", {}))
        if d["kind"] == "table" and "ReF" in params:
            params = {"E": params["E"], "F": [complex(r, i) for r, i in zip(params["ReF"], params["ImF"])]}
        return cls(d["kind"], params)


def free_half_line_borel(z):
    """Herglotz root of ``F^2 + z F + 1 = 0`` (free half-line at its end site)."""
    z = np.asarray(z, dtype=complex)
    return 0.5 * (-z + np.sqrt(z - 2) * np.sqrt(z + 2))


def m_function(per: PeriodicJacobi, side: str, E, eta: float = 0.0):
    """Weyl m-function of the periodic half-line at its boundary site.

    ``side='right'`` is ``<delta_1, (J^{(r)} - z)^{-1} delta_1>`` on ``[1, inf)``;
    ``side='left'`` is ``<delta_0, (J^{(l)} - z)^{-1} delta_0>`` on ``(-inf, 0]``.
    At ``eta = 0`` the branch is fixed by continuity from ``eta = 1e-8``.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if eta < 0:
        raise ValueError("eta must be non-negative")
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    cell = per if side == "right" else per.reversed()
    coeffs = mobius_coefficients(cell, E + 1j * eta)
    r1, r2 = fixed_points(*coeffs)
    if eta > 0:
        m = np.where(r1.imag >= r2.imag, r1, r2)
    else:
        ref = np.where(*_upper(fixed_points(*mobius_coefficients(cell, E + 1j * BRANCH_ETA))))
        scale = np.maximum(np.abs(r1), 1.0)
        in_band = np.abs(r1.imag) > 1e-13 * scale
        nearest = np.where(np.abs(r1 - ref) <= np.abs(r2 - ref), r1, r2)
        m = np.where(in_band, np.where(r1.imag >= r2.imag, r1, r2), nearest.real + 0j)
    finite = np.isfinite(m)
    # an infinite m is a pole of the gap branch (Dirichlet eigenvalue), not a failure
    res = np.where(finite, fixed_point_residual(*coeffs, np.where(finite, m, 0)), 0.0)
    bad = res > 1e-10
    if np.any(bad):
        warnings.warn(
            f"m-function fixed point residual {np.max(res[bad]):.2e} exceeds 1e-10",
            NumericalQualityWarning,
            stacklevel=2,
        )
    return m[0] if scalar else m


def _upper(roots):
    r1, r2 = roots
    return r1.imag >= r2.imag, r1, r2


def lead_borel(lead: Lead, E, eta: float = 0.0):
    """``F(E + i eta)`` of the lead; ``eta = 0`` gives the boundary value ``F(E + i0)``."""
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    if lead.kind == "free-half-line":
        F = free_half_line_borel(E + 1j * eta)
    elif lead.kind == "wide-band":
        F = np.full(E.shape, 1j * lead.params["gamma"])
    elif lead.kind == "periodic-half-line":
        F = np.atleast_1d(m_function(lead.params["per"], lead.params["side"], E, eta))
    elif lead.kind == "finite-chain":
        # exact finite continued fraction; real (no ac part) at eta = 0
        a = np.append(np.asarray(lead.params["a"], dtype=float), 0.0)
        b = np.asarray(lead.params["b"], dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            F = _continued_fraction(a, b, E + 1j * eta, 0.0)
    else:
        lo, hi = lead.params["E"][0], lead.params["E"][-1]
        if np.any((E < lo) | (E > hi)):
            raise ValueError(f"table lead queried outside its tabulated range [{lo}, {hi}]")
        F = lead._re(E) + 1j * np.maximum(lead._im(E), 0.0)
    return F[0] if scalar else F


def ac_indicator(lead: Lead, E, tol: float = AC_TOL):
    return np.imag(lead_borel(lead, E)) > tol


def ac_support_contains(lead: Lead, interval, grid=None, tol: float = AC_TOL) -> bool:
    """True iff ``Im F(E + i0) > tol`` at every node of ``grid`` on ``interval``."""
    from .spectral import EnergyGrid

    lo, hi = interval
    if not lo < hi:
        raise ValueError("interval must satisfy mu_l < mu_r")
    if grid is None:
        grid = EnergyGrid(lo, hi, 500)
    nodes = grid.on(lo, hi).nodes
    return bool(np.all(ac_indicator(lead, nodes, tol)))
