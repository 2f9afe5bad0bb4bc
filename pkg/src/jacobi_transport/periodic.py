"""Periodic Jacobi matrices built from a finite sample.

A sample ``(a_1..a_{L-1}, b_1..b_L)`` is closed into a period-L operator on
the whole line by an internal coupling ``a_L = lambda_S``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import JacobiModel
from .transfer import _product


@dataclass(frozen=True, eq=False)
class PeriodicJacobi:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1 or len(a) == 0:
            raise ValueError("a and b must be 1-d arrays of the same (positive) length")
        if np.any(a <= 0):
            raise ValueError("all off-diagonal entries of a periodic Jacobi matrix must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def L(self) -> int:
        return len(self.b)

    @property
    def coupling(self) -> float:
        """The internal coupling ``a_L``."""
        return float(self.a[-1])

    def as_model(self) -> JacobiModel:
        """The right half-line ``[1, inf)`` restriction as a lazy model."""
        return JacobiModel.periodic(self.a, self.b)

    def reversed(self) -> PeriodicJacobi:
        """Parameters of the left half-line read outward from site 0.

        Site 0 carries ``b_L``; the couplings met moving left are
        ``a_{L-1}, ..., a_1`` and then ``a_L`` again.
        """
        return PeriodicJacobi(np.concatenate([self.a[:-1][::-1], self.a[-1:]]), self.b[::-1].copy())

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> PeriodicJacobi:
        return cls(np.asarray(d["a"], dtype=float), np.asarray(d["b"], dtype=float))


def periodize(sample: JacobiModel, L: int, lambda_s: float) -> PeriodicJacobi:
    if L < 1:
        raise ValueError("period L must be >= 1")
    if lambda_s == 0:
        raise ValueError("internal coupling lambda_S must be non-zero")
    a = np.append(sample.offdiagonal(L - 1), abs(lambda_s))
    return PeriodicJacobi(a, sample.diagonal(L))


def restrict_repeated(per: PeriodicJacobi, N: int) -> JacobiModel:
    """``N`` copies of the period cell on ``1..NL`` with Dirichlet ends."""
    if N < 1:
        raise ValueError("N must be >= 1")
    a = np.tile(per.a, N)[: N * per.L - 1]
    return JacobiModel.explicit(a, np.tile(per.b, N))


def discriminant(per: PeriodicJacobi, E) -> float | np.ndarray:
    """Trace of the one-period transfer matrix."""
    if np.ndim(E) == 0:
        T = _product(per.a.tolist(), per.b.tolist(), float(E), None)
        return float(np.trace(T.m) * np.exp(T.log_scale))
    E = np.asarray(E, dtype=float)
    p = np.ones_like(E)
    q = np.zeros_like(E)
    r = np.zeros_like(E)
    s = np.ones_like(E)
    for ak, bk in zip(per.a, per.b):
        c = (E - bk) / ak
        p, q, r, s = c * p - r / ak, c * q - s / ak, ak * p, ak * q
    return p + s


def floquet_matrix(per: PeriodicJacobi, sign: int) -> np.ndarray:
    """L x L matrix of the Bloch problem ``u(n+L) = sign * u(n)``."""
    L, a, b = per.L, per.a, per.b
    if L == 1:
        return np.array([[b[0] + 2 * sign * a[0]]])
    H = np.diag(b) + np.diag(a[:-1], 1) + np.diag(a[:-1], -1)
    H[0, L - 1] += sign * a[-1]
    H[L - 1, 0] += sign * a[-1]
    return H


def band_edges(per: PeriodicJacobi) -> np.ndarray:
    """The L spectral bands of ``J_{L,per}`` as an ``(L, 2)`` array.

    Band edges are the periodic (discriminant = 2) and antiperiodic
    (discriminant = -2) eigenvalues; sorted together they pair up into bands.
    """
    ev = np.concatenate(
        [np.linalg.eigvalsh(floquet_matrix(per, +1)), np.linalg.eigvalsh(floquet_matrix(per, -1))]
    )
    ev.sort()
    return ev.reshape(per.L, 2)


def bands_in_window(per: PeriodicJacobi, lo: float, hi: float) -> np.ndarray:
    """Band segments intersected with ``(lo, hi)``.

    Intersections thinner than the eigenvalue roundoff are dropped, so a band
    edge sitting on a window endpoint does not leave a spurious sliver.
    """
    bands = band_edges(per)
    seg = np.column_stack([np.maximum(bands[:, 0], lo), np.minimum(bands[:, 1], hi)])
    tol = 1e-13 * max(1.0, float(np.max(np.abs(bands))))
    return seg[seg[:, 1] - seg[:, 0] > tol]


def spectrum_measure(per: PeriodicJacobi, lo: float, hi: float) -> float:
    """Lebesgue measure of ``sp(J_{L,per})`` inside ``(lo, hi)``."""
    seg = bands_in_window(per, lo, hi)
    return float(np.sum(seg[:, 1] - seg[:, 0]))


def mobius_coefficients(per: PeriodicJacobi, z) -> tuple[np.ndarray, ...]:
    """Entries of the one-period Mobius map ``m -> 1/(b_1 - z - a_1^2 / (...))``.

    The map is ``m -> (alpha m + beta) / (gamma m + delta)`` with the matrix
    ``S_1 S_2 ... S_L``, ``S_k = [[0, 1], [-a_k^2, b_k - z]]``.  The matrix is
    rescaled to unit max-entry (the map is projective).
    """
    z = np.asarray(z, dtype=complex)
    al = np.ones_like(z)
    be = np.zeros_like(z)
    ga = np.zeros_like(z)
    de = np.ones_like(z)
    # right-multiply by S_k in order k = 1..L
    for ak, bk in zip(per.a, per.b):
        c = bk - z
        a2 = ak * ak
        al, be, ga, de = -a2 * be, al + c * be, -a2 * de, ga + c * de
        big = np.maximum(np.maximum(abs(al), abs(be)), np.maximum(abs(ga), abs(de)))
        al, be, ga, de = al / big, be / big, ga / big, de / big
    return al, be, ga, de


def fixed_points(al, be, ga, de) -> tuple[np.ndarray, np.ndarray]:
    """Both roots of ``gamma m^2 + (delta - alpha) m - beta = 0``."""
    B = de - al
    disc = np.sqrt(B * B + 4 * ga * be)
    # choose the sign that avoids cancellation in -(B + s*disc)/2
    s = np.where((B.real * disc.real + B.imag * disc.imag) >= 0, 1.0, -1.0)
    q = -0.5 * (B + s * disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.where(ga != 0, q / ga, np.inf)
        r2 = np.where(q != 0, -be / q, np.inf)
    return r1, r2


def fixed_point_residual(al, be, ga, de, m) -> np.ndarray:
    """Scale-free residual of the fixed-point quadratic at ``m``."""
    m = np.asarray(m, dtype=complex)
    num = abs(ga * m * m + (de - al) * m - be)
    den = abs(ga) * abs(m) ** 2 + abs(de - al) * abs(m) + abs(be)
    return num / np.where(den > 0, den, 1.0)


def herglotz_fixed_point(per: PeriodicJacobi, z) -> np.ndarray:
    """Half-line m-function ``<delta_1, (J^{(r)} - z)^{-1} delta_1>`` for Im z > 0."""
    r1, r2 = fixed_points(*mobius_coefficients(per, z))
    return np.where(r1.imag >= r2.imag, r1, r2)
