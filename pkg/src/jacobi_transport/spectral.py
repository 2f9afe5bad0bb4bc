"""Borel transforms, absolutely continuous densities and transfer-matrix probes."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalQualityWarning
from .measures import DiscreteMeasure
from .models import JacobiModel
from .periodic import PeriodicJacobi, herglotz_fixed_point
from .transfer import transfer_log_norms

DEFAULT_DEPTH = 10_000
DEFAULT_ETA = 1e-6


@dataclass(frozen=True)
class EnergyGrid:
    lo: float
    hi: float
    n: int = 2000
    rule: str = "midpoint"
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"grid interval must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        if self.n < 2:
            raise ValueError("grid needs at least 2 nodes")
        if self.rule not in ("midpoint", "gauss-legendre"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if self.eta < 0:
            raise ValueError("eta must be non-negative")

    def nodes_weights(self) -> tuple[np.ndarray, np.ndarray]:
        lo, hi, n = self.lo, self.hi, self.n
        if self.rule == "midpoint":
            h = (hi - lo) / n
            return lo + (np.arange(n) + 0.5) * h, np.full(n, h)
        x, w = np.polynomial.legendre.leggauss(n)
        half = 0.5 * (hi - lo)
        return lo + half * (x + 1), half * w

    @property
    def nodes(self) -> np.ndarray:
        return self.nodes_weights()[0]

    def on(self, lo: float, hi: float) -> EnergyGrid:
        return EnergyGrid(lo, hi, self.n, self.rule, self.eta)

    def coarsened(self) -> EnergyGrid:
        return EnergyGrid(self.lo, self.hi, max(self.n // 2, 2), self.rule, self.eta)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n, "rule": self.rule, "eta": self.eta}


def pairwise_sum(values: np.ndarray) -> float:
    return float(np.sum(values))  # numpy's sum is pairwise for contiguous float arrays


def integrate(f_values: np.ndarray, weights: np.ndarray) -> float:
    return pairwise_sum(np.asarray(f_values) * weights)


def _continued_fraction(a, b, z, tail):
    if np.ndim(z) == 1 and len(z) <= 8 and np.ndim(tail) == 0:
        # plain Python complex arithmetic is much faster than size-1 arrays
        a2 = (np.asarray(a, dtype=float) ** 2).tolist()
        bl = np.asarray(b, dtype=float).tolist()
        out = []
        try:
            for zz in z.tolist():
                m = complex(tail)
                for k in range(len(bl) - 1, -1, -1):
                    m = 1.0 / (bl[k] - zz - a2[k] * m)
                out.append(m)
            return np.array(out, dtype=complex)
        except ZeroDivisionError:
            pass  # exact pole; the array path below yields inf like numpy does
    m = tail
    for k in range(len(b) - 1, -1, -1):
        m = 1.0 / (b[k] - z - a[k] * a[k] * m)
    return m


def borel_transform(source, z, depth: int = DEFAULT_DEPTH, tail: str = "auto", tol: float = 1e-8):
    """Borel (Stieltjes) transform ``F(z) = int dnu(E) / (E - z)``.

    For a :class:`DiscreteMeasure` the sum is exact and real ``z`` off the
    support is allowed.  For a :class:`JacobiModel` the continued fraction
    ``1/(b_1 - z - a_1^2/(b_2 - z - ...))`` is evaluated backwards from
    ``depth`` with either a zero tail or, for periodic models, the exact
    periodic tail.  Accepts scalar or array ``z``.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(source, DiscreteMeasure):
        if np.any(np.isin(z, source.points)):
            raise ValueError("z lies on the support of the measure")
        F = (source.weights[None, :] / (source.points[None, :] - z[:, None])).sum(axis=1)
        return F[0] if scalar else F
    if not isinstance(source, JacobiModel):
        raise TypeError(f"cannot take the Borel transform of {type(source).__name__}")
    if np.any(z.imag <= 0):
        raise ValueError("the model Borel transform needs Im z > 0")
    model = source
    if tail == "auto":
        tail = "self-similar" if model.period else "zero"
    if tail == "self-similar":
        period = model.period
        if not period:
            raise ValueError("self-similar tail needs a periodic model")
        per = PeriodicJacobi(model.offdiagonal(period), model.diagonal(period))
        F = herglotz_fixed_point(per, z)
        return F[0] if scalar else F
    if tail != "zero":
        raise ValueError(f"unknown tail strategy {tail!r}")
    if model.is_finite:
        depth = min(depth, model.length)
    b = model.diagonal(depth)
    a = np.append(model.offdiagonal(depth - 1), 0.0)
    F = _continued_fraction(a, b, z, 0.0)
    if not model.is_finite or depth < model.length:
        half = max(depth // 2, 1)
        F_half = _continued_fraction(np.append(a[: half - 1], 0.0), b[:half], z, 0.0)
        err = np.max(np.abs(F - F_half) / np.maximum(np.abs(F), 1.0))
        if err > tol:
            warnings.warn(
                f"continued fraction not converged at depth {depth} (change {err:.2e} since depth {half})",
                NumericalQualityWarning,
                stacklevel=2,
            )
    return F[0] if scalar else F


def ac_density(model: JacobiModel, E, eta: float = DEFAULT_ETA, depth: int = DEFAULT_DEPTH):
    """``Im F(E + i eta) / pi``, the smoothed density of the spectral measure."""
    if not eta > 0:
        raise ValueError("ac_density needs eta > 0")
    F = borel_transform(model, np.asarray(E) + 1j * eta, depth=depth)
    return np.imag(F) / np.pi


def weak_density_approx(model: JacobiModel, E, n: int):
    """``1 / (pi (u(n)^2 + a_n^2 u(n+1)^2))`` with ``u`` the Dirichlet solution at E.

    Vectorized over ``E``; uses ``[u(n+1), a_n u(n)] = T_E(n) [1, 0]``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    scalar = np.ndim(E) == 0
    E = np.atleast_1d(np.asarray(E, dtype=float))
    a = model.offdiagonal(n)
    b = model.diagonal(n)
    u_next = np.ones_like(E)  # u(1)
    au_prev = np.zeros_like(E)  # a_0 u(0)
    for k in range(n):
        u_next, au_prev = ((E - b[k]) * u_next - au_prev) / a[k], a[k] * u_next
    u_n = au_prev / a[n - 1]
    val = 1.0 / (np.pi * (u_n**2 + a[n - 1] ** 2 * u_next**2))
    return val[0] if scalar else val


def smoothed_weak_density(model: JacobiModel, energies, n: int, width: float, samples: int = 257):
    """Gaussian-smoothed :func:`weak_density_approx` (standard deviation ``width``).

    The kernel is sampled on ``samples`` equispaced points over +-5 widths and
    renormalized, so the output is a deterministic weighted average.
    """
    energies = np.asarray(energies, dtype=float)
    offsets = np.linspace(-5.0, 5.0, samples)
    kernel = np.exp(-0.5 * offsets**2)
    kernel /= kernel.sum()
    pts = energies[:, None] + width * offsets[None, :]
    return weak_density_approx(model, pts.ravel(), n).reshape(pts.shape) @ kernel


def tm_inverse_square_integrals(model: JacobiModel, interval, L_list, grid: EnergyGrid | None = None) -> np.ndarray:
    """``int_a^b ||T_E(L)||^{-2} dE`` for every ``L`` in ``L_list`` (one sweep)."""
    lo, hi = interval
    grid = (grid or EnergyGrid(lo, hi)).on(lo, hi)
    x, w = grid.nodes_weights()
    logs = transfer_log_norms(model, x, L_list)
    return np.array([integrate(np.exp(-2.0 * row), w) for row in logs])


def tm_inverse_square_integral(
    model: JacobiModel, interval, L: int, grid: EnergyGrid | None = None, refine_tol: float = 1e-6
) -> float:
    """Quadrature of ``int_a^b ||T_E(L)||^{-2} dE``.

    A half-resolution recomputation is compared with the result; a change
    larger than ``refine_tol`` (relative to ``b - a``) raises a
    :class:`NumericalQualityWarning`.
    """
    lo, hi = interval
    if not lo < hi:
        raise ValueError("interval must satisfy a < b")
    if L < 1:
        raise ValueError("L must be >= 1")
    grid = (grid or EnergyGrid(lo, hi)).on(lo, hi)
    value = float(tm_inverse_square_integrals(model, interval, [L], grid)[0])
    coarse = float(tm_inverse_square_integrals(model, interval, [L], grid.coarsened())[0])
    if abs(value - coarse) > refine_tol * (hi - lo):
        warnings.warn(
            f"grid too coarse: transfer integral moved by {abs(value - coarse):.2e} under refinement",
            NumericalQualityWarning,
            stacklevel=2,
        )
    return value


@dataclass
class ProbeResult:
    """Finite-L proxy for the set where ``liminf ||T_E(n)||`` is finite.

    This is a heuristic: the liminf is replaced by a minimum over ``L_list``.
    """

    energies: np.ndarray
    min_norm: np.ndarray
    threshold: float
    L_list: tuple[int, ...]

    @property
    def bounded(self) -> np.ndarray:
        return self.min_norm < self.threshold

    @property
    def verdicts(self) -> list[str]:
        return ["bounded" if b else "growing" for b in self.bounded]

    def rows(self):
        for E, v, verdict in zip(self.energies, self.min_norm, self.verdicts):
            yield float(E), float(v), verdict


def sigma_ac_probe(model: JacobiModel, grid: EnergyGrid, L_list, threshold: float = 100.0) -> ProbeResult:
    L_list = tuple(int(L) for L in L_list)
    if any(b <= a for a, b in zip(L_list, L_list[1:])):
        raise ValueError("L_list must be strictly increasing")
    E = grid.nodes
    logs = transfer_log_norms(model, E, L_list)
    return ProbeResult(E, np.exp(np.min(logs, axis=0)), threshold, L_list)
