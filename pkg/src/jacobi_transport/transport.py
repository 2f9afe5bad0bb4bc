"""Steady-state currents: Landauer-Buttiker, Thouless and crystalline."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalQualityWarning
from .leads import AC_TOL, Lead, ac_support_contains, lead_borel, m_function
from .models import JacobiModel
from .periodic import PeriodicJacobi, bands_in_window, discriminant, restrict_repeated, spectrum_measure
from .spectral import EnergyGrid, integrate

TWO_PI = 2.0 * np.pi
UNITARITY_TOL = 1e-8
BAND_NODES = 64


@dataclass(frozen=True, eq=False)
class EBBSpec:
    """Finite sample ``J_L`` coupled at sites 1 and L to two reservoirs."""

    sample: JacobiModel
    L: int
    leads: tuple[Lead, Lead]
    lam: float
    window: tuple[float, float]
    grid: EnergyGrid | None = None

    def __post_init__(self):
        if self.L < 1:
            raise ValueError("sample length L must be >= 1")
        mu_l, mu_r = self.window
        if not mu_r > mu_l:
            raise ValueError("window must satisfy mu_r > mu_l")
        object.__setattr__(self, "_a", self.sample.offdiagonal(self.L - 1))
        object.__setattr__(self, "_b", self.sample.diagonal(self.L))

    @property
    def a(self) -> np.ndarray:
        return self._a

    @property
    def b(self) -> np.ndarray:
        return self._b

    def energy_grid(self) -> EnergyGrid:
        lo, hi = self.window
        return (self.grid or EnergyGrid(lo, hi)).on(lo, hi)

    def to_dict(self) -> dict:
        return {
            "sample": self.sample.to_dict(),
            "L": self.L,
            "leads": [lead.to_dict() for lead in self.leads],
            "lambda": self.lam,
            "window": list(self.window),
            "grid": self.energy_grid().to_dict(),
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]

    def reversed(self) -> EBBSpec:
        """Mirror image: sample read backwards, leads swapped."""
        rev = JacobiModel.explicit(self.a[::-1], self.b[::-1])
        return EBBSpec(rev, self.L, (self.leads[1], self.leads[0]), self.lam, self.window, self.grid)


@dataclass
class TransportResult:
    energies: np.ndarray
    transmittance: np.ndarray
    current: float
    metadata: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        env = {
            "current": self.current,
            "energies": self.energies.tolist(),
            "transmittance": self.transmittance.tolist(),
            "metadata": self.metadata,
            "warnings": self.warnings,
        }
        return json.dumps(env, sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["E", "D"])
        for E, D in zip(self.energies, self.transmittance):
            w.writerow([repr(float(E)), repr(float(D))])
        return buf.getvalue()


def log_green_1L(a, b, z, sigma_l, sigma_r) -> np.ndarray:
    """``log (M^{-1})_{1L}`` for ``M = J_L - z - sigma_l P_1 - sigma_r P_L``.

    Forward elimination with pivots ``r_k = D_k / D_{k-1}`` (ratios of leading
    minors) so that ``(M^{-1})_{1L} = prod_{k<L} (-a_k / r_k) / r_L``; the
    product is accumulated as a complex logarithm to avoid underflow.
    """
    z = np.asarray(z, dtype=complex)
    L = len(b)
    d0 = b[0] - z - sigma_l
    if L == 1:
        return -np.log(d0 - sigma_r)
    r = d0
    logG = np.zeros_like(z)
    for k in range(L - 1):
        logG = logG + np.log(-a[k] / r)
        d = b[k + 1] - z
        if k + 1 == L - 1:
            d = d - sigma_r
        r = d - a[k] * a[k] / r
    return logG - np.log(r)


def effective_green(spec: EBBSpec, E, eta: float = 0.0):
    """``<delta_1, (H_lambda - E - i eta)^{-1} delta_L>`` by Schur complement onto the sample."""
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    lam2 = spec.lam**2
    sig_l = lam2 * lead_borel(spec.leads[0], E, eta)
    sig_r = lam2 * lead_borel(spec.leads[1], E, eta)
    with np.errstate(divide="ignore", invalid="ignore"):
        G = np.exp(log_green_1L(spec.a, spec.b, E + 1j * eta, sig_l, sig_r))
    if not np.all(np.isfinite(G)):
        warnings.warn(
            "effective matrix singular (energy outside both lead supports at eta = 0)",
            NumericalQualityWarning,
            stacklevel=2,
        )
    return G[0] if scalar else G


def lb_transmittance(spec: EBBSpec, E):
    """One-particle transmittance ``4 lambda^4 |G_1L|^2 Im F_l Im F_r``."""
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    D = np.zeros_like(E)
    if spec.lam == 0:
        return D[0] if scalar else D
    F_l = lead_borel(spec.leads[0], E)
    F_r = lead_borel(spec.leads[1], E)
    ok = (F_l.imag > AC_TOL) & (F_r.imag > AC_TOL)
    if np.any(ok):
        lam2 = spec.lam**2
        logG = log_green_1L(spec.a, spec.b, E[ok] + 0j, lam2 * F_l[ok], lam2 * F_r[ok])
        logD = math.log(4.0) + 4 * math.log(abs(spec.lam)) + 2 * logG.real
        D[ok] = np.exp(logD + np.log(F_l.imag[ok]) + np.log(F_r.imag[ok]))
    D = _clip_unit(D, "Landauer-Buttiker transmittance")
    return D[0] if scalar else D


def _clip_unit(D, what):
    over = D > 1 + UNITARITY_TOL
    if np.any(over):
        warnings.warn(f"{what} exceeds 1 by {np.max(D) - 1:.2e}; clipped", NumericalQualityWarning, stacklevel=3)
    return np.clip(D, 0.0, 1.0)


def steady_current(spec: EBBSpec, refine_rtol: float = 1e-3) -> TransportResult:
    """``(1/2pi) int_{mu_l}^{mu_r} D(L, E) dE`` on the spec's energy grid."""
    grid = spec.energy_grid()
    messages = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NumericalQualityWarning)
        for i, lead in enumerate(spec.leads):
            if lead.kind != "table" and not ac_support_contains(lead, spec.window):
                messages.append(f"window not inside the ac support of the {'left' if i == 0 else 'right'} lead")
        E, w = grid.nodes_weights()
        D = lb_transmittance(spec, E)
        current = integrate(D, w) / TWO_PI
        if grid.n >= 4:
            cE, cw = grid.coarsened().nodes_weights()
            coarse = integrate(lb_transmittance(spec, cE), cw) / TWO_PI
            if abs(coarse - current) > refine_rtol * max(current, 1e-300) + 1e-15:
                messages.append(
                    f"grid refinement changed the current by {abs(coarse - current):.2e} (n = {grid.n})"
                )
    messages += [str(c.message) for c in caught if issubclass(c.category, NumericalQualityWarning)]
    for msg in messages:
        warnings.warn(msg, NumericalQualityWarning, stacklevel=2)
    meta = {"spec": spec.digest(), "grid": grid.to_dict(), "eta": 0.0, "refine_rtol": refine_rtol}
    return TransportResult(E, D, float(current), meta, messages)


def linear_response(spec: EBBSpec, mu: float) -> float:
    """``D(L, mu) / 2 pi``, the zero-bias limit of the current per unit bias."""
    return float(lb_transmittance(spec, float(mu))) / TWO_PI


def thouless_current(per: PeriodicJacobi, window) -> float:
    """``|sp(J_{L,per}) cap (mu_l, mu_r)| / 2 pi``."""
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy mu_l < mu_r")
    return spectrum_measure(per, lo, hi) / TWO_PI


def fejer_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Fejer's first rule on [-1, 1]: Chebyshev nodes, positive weights, exact to degree n-1."""
    k = np.arange(1, n + 1)
    theta = (2 * k - 1) * np.pi / (2 * n)
    j = np.arange(1, n // 2 + 1)
    s = np.cos(2 * np.outer(theta, j)) / (4 * j**2 - 1)
    w = (2.0 / n) * (1 - 2 * s.sum(axis=1))
    return np.cos(theta)[::-1], w[::-1]


def crystalline_transmittance(per: PeriodicJacobi, leads: tuple[Lead, Lead], lam: float, E, _check: bool = True):
    """Transmittance of the infinitely repeated sample between the given leads.

    Zero outside ``sp(J_{L,per})`` and outside either lead's ac support.
    """
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    lam_s2 = per.coupling**2
    lam2 = lam * lam
    m_l = lam_s2 * m_function(per, "left", E)
    m_r = lam_s2 * m_function(per, "right", E)
    F_l = lam2 * lead_borel(leads[0], E)
    F_r = lam2 * lead_borel(leads[1], E)
    in_band = (m_l.imag > 0) & (m_r.imag > 0)
    if _check:
        deep = np.abs(discriminant(per, E)) < 2 - 1e-6
        if np.any(deep & ~in_band):
            raise RuntimeError("internal consistency: Im m <= 0 at an energy inside sp(J_{L,per})")
    ok = in_band & (F_l.imag > lam2 * AC_TOL) & (F_r.imag > lam2 * AC_TOL)
    D = np.zeros_like(E)
    if np.any(ok):
        ml, mr, fl, fr = m_l[ok], m_r[ok], F_l[ok], F_r[ok]
        t_r = np.abs(mr - fr) ** 2 / (mr.imag * fr.imag)
        t_l = np.abs(ml - fl) ** 2 / (ml.imag * fl.imag)
        D[ok] = 1.0 / (1.0 + 0.25 * (t_r + t_l))
    D = _clip_unit(D, "crystalline transmittance")
    return D[0] if scalar else D


def crystalline_current(
    per: PeriodicJacobi, leads: tuple[Lead, Lead], lam: float, window, nodes_per_band: int = BAND_NODES
) -> float:
    """``(1/2pi) int_{sp(J_{L,per}) cap window} D^Cr(E) dE``.

    Each band segment is integrated with Fejer's rule, which avoids the
    square-root endpoints and integrates constants exactly.
    """
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy mu_l < mu_r")
    seg = bands_in_window(per, lo, hi)
    if len(seg) == 0:
        return 0.0
    x, w = fejer_rule(nodes_per_band)
    half = 0.5 * (seg[:, 1] - seg[:, 0])
    mid = 0.5 * (seg[:, 1] + seg[:, 0])
    E = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    W = (half[:, None] * w[None, :]).ravel()
    wide = np.repeat(half > 1e-6, len(x))
    D = np.zeros_like(E)
    D[wide] = crystalline_transmittance(per, leads, lam, E[wide])
    if np.any(~wide):
        D[~wide] = crystalline_transmittance(per, leads, lam, E[~wide], _check=False)
    return integrate(D, W) / TWO_PI


def repeated_sample_current(
    per: PeriodicJacobi, leads: tuple[Lead, Lead], lam: float, N: int, window, grid: EnergyGrid | None = None
) -> TransportResult:
    """Landauer-Buttiker current through ``N`` copies of the period cell."""
    sample = restrict_repeated(per, N)
    return steady_current(EBBSpec(sample, N * per.L, leads, lam, tuple(window), grid))
