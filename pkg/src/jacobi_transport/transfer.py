"""Transfer matrices and generalized eigenfunctions.

Conventions: ``A_E(x) = a_x^{-1} [[E - b_x, -1], [a_x^2, 0]]`` (determinant 1)
and ``T_E(n) = A_E(n) ... A_E(1)``, so that a solution of ``J u = E u`` obeys
``[u(n+1), a_n u(n)] = T_E(n) [u(1), a_0 u(0)]`` with ``a_0 = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .models import JacobiModel

RESCALE_AT = 1e150


class TransferOverflowError(ArithmeticError):
    """Raised when a plain (unscaled) product overflows.

    ``last_valid_n`` is the largest n whose product was still finite.
    """

    def __init__(self, last_valid_n: int):
        super().__init__(f"transfer matrix overflowed after n = {last_valid_n}; use log-scaled mode")
        self.last_valid_n = last_valid_n


def spectral_norm(m) -> float:
    """Largest singular value of a 2x2 matrix, in closed form."""
    (p, q), (r, s) = np.asarray(m)
    if np.iscomplexobj(m):
        fro = abs(p) ** 2 + abs(q) ** 2 + abs(r) ** 2 + abs(s) ** 2
        det = abs(p * s - q * r)
        return math.sqrt((fro + math.sqrt(max(fro * fro - 4 * det * det, 0.0))) / 2)
    return 0.5 * (math.hypot(p + s, r - q) + math.hypot(p - s, q + r))


def _norm_arrays(p, q, r, s):
    return 0.5 * (np.hypot(p + s, r - q) + np.hypot(p - s, q + r))


@dataclass(frozen=True)
class Matrix2:
    """A 2x2 matrix stored as ``exp(log_scale) * m``."""

    m: np.ndarray
    log_scale: float = 0.0

    @property
    def array(self) -> np.ndarray:
        return self.m * math.exp(self.log_scale)

    def det(self) -> float:
        (p, q), (r, s) = self.m
        return (p * s - q * r) * math.exp(2 * self.log_scale)

    def norm(self) -> float:
        return spectral_norm(self.m) * math.exp(self.log_scale)

    def log_norm(self) -> float:
        return math.log(spectral_norm(self.m)) + self.log_scale

    def __matmul__(self, other: Matrix2) -> Matrix2:
        return Matrix2(self.m @ other.m, self.log_scale + other.log_scale)

    def __getitem__(self, idx):
        return self.array[idx]


def one_step_matrix(E: float, a_x: float, b_x: float) -> Matrix2:
    if not a_x > 0:
        raise ValueError(f"one-step matrix needs a_x > 0, got {a_x}")
    return Matrix2(np.array([[(E - b_x) / a_x, -1.0 / a_x], [a_x, 0.0]]))


def _product(a, b, E, log_scaled):
    t11, t12, t21, t22 = 1.0, 0.0, 0.0, 1.0
    log_scale = 0.0
    for k, (ak, bk) in enumerate(zip(a, b)):
        c = (E - bk) / ak
        inv = 1.0 / ak
        t11, t12, t21, t22 = c * t11 - inv * t21, c * t12 - inv * t22, ak * t11, ak * t12
        big = max(abs(t11), abs(t12), abs(t21), abs(t22))
        if log_scaled is False:
            if not math.isfinite(big):
                raise TransferOverflowError(k)
        elif big > RESCALE_AT:
            t11, t12, t21, t22 = t11 / big, t12 / big, t21 / big, t22 / big
            log_scale += math.log(big)
    return Matrix2(np.array([[t11, t12], [t21, t22]]), log_scale)


def transfer_matrix(model: JacobiModel, E: float, n: int, log_scaled: bool | None = None) -> Matrix2:
    """Ordered product ``A_E(n) ... A_E(1)``.

    ``log_scaled=None`` rescales automatically once an entry exceeds 1e150;
    ``False`` forces plain doubles and raises :class:`TransferOverflowError`.
    """
    if n < 1:
        raise ValueError("transfer_matrix needs n >= 1")
    a = model.offdiagonal(n)
    b = model.diagonal(n)
    if np.any(a <= 0):
        raise ValueError("off-diagonal entries must be positive")
    return _product(a.tolist(), b.tolist(), float(E), log_scaled)


def transfer_log_norms(model: JacobiModel, energies, ns) -> np.ndarray:
    """``log ||T_E(n)||`` for every ``n`` in ``ns`` and every energy.

    Vectorized over energies; returns shape ``(len(ns), len(energies))``.
    """
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    ns = [int(n) for n in np.atleast_1d(ns)]
    if min(ns) < 1:
        raise ValueError("n must be >= 1")
    nmax = max(ns)
    wanted = {n: i for i, n in enumerate(ns)}
    a = model.offdiagonal(nmax)
    b = model.diagonal(nmax)
    p = np.ones_like(E)
    q = np.zeros_like(E)
    r = np.zeros_like(E)
    s = np.ones_like(E)
    log_scale = np.zeros_like(E)
    out = np.empty((len(ns), len(E)))
    for k in range(nmax):
        ak, c = a[k], (E - b[k]) / a[k]
        p, q, r, s = c * p - r / ak, c * q - s / ak, ak * p, ak * q
        big = np.maximum(np.maximum(np.abs(p), np.abs(q)), np.maximum(np.abs(r), np.abs(s)))
        over = big > 1e100
        if np.any(over):
            scale = np.where(over, big, 1.0)
            p, q, r, s = p / scale, q / scale, r / scale, s / scale
            log_scale += np.log(scale)
        if k + 1 in wanted:
            for i, n in enumerate(ns):
                if n == k + 1:
                    out[i] = np.log(_norm_arrays(p, q, r, s)) + log_scale
    return out


def eigenfunction(model: JacobiModel, E: float, n_max: int, theta: float = 0.0) -> np.ndarray:
    """Solution of ``J u = E u`` with ``u(0) = theta``, ``u(1) = 1``.

    Returns ``u(0), ..., u(n_max)`` so that ``u[n]`` is ``u(n)``.
    """
    if n_max < 1:
        raise ValueError("eigenfunction needs n_max >= 1")
    a = model.offdiagonal(max(n_max - 1, 0))
    b = model.diagonal(max(n_max - 1, 0))
    u = np.empty(n_max + 1)
    u[0] = theta
    u[1] = 1.0
    a_prev = 1.0
    for n in range(1, n_max):
        u[n + 1] = ((E - b[n - 1]) * u[n] - a_prev * u[n - 1]) / a[n - 1]
        a_prev = a[n - 1]
    return u
