"""Discrete probability measures and their Jacobi parameters."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .models import JacobiModel


class RankDeficiencyError(ValueError):
    pass


class BreakdownError(ArithmeticError):
    def __init__(self, index: int, value: float):
        super().__init__(f"recurrence breakdown: a_{index}^2 = {value:.3e} is not positive")
        self.index = index


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.points, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if x.shape != w.shape or x.ndim != 1 or len(x) == 0:
            raise ValueError("points and weights must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("support points must be strictly increasing")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, not 1")
        object.__setattr__(self, "points", x)
        object.__setattr__(self, "weights", w)

    @classmethod
    def normalized(cls, points, weights) -> DiscreteMeasure:
        """Sort the points and rescale the weights to total mass 1."""
        x = np.asarray(points, dtype=float)
        w = np.asarray(weights, dtype=float)
        order = np.argsort(x)
        return cls(x[order], w[order] / w.sum())

    def __len__(self):
        return len(self.points)

    def to_dict(self) -> dict:
        return {"points": self.points.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> DiscreteMeasure:
        return cls(np.asarray(d["points"], dtype=float), np.asarray(d["weights"], dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> DiscreteMeasure:
        return cls.from_dict(json.loads(text))


def stieltjes(measure: DiscreteMeasure, n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Recurrence coefficients of the orthonormal polynomials of ``measure``.

    Runs the Stieltjes procedure on the vectors ``sqrt(w) * p_n(x)``, with a
    second Gram-Schmidt pass against all previous vectors to keep them
    orthonormal in floating point.  Returns ``(a_1..a_{n_max-1}, b_1..b_{n_max})``.
    """
    x, w = measure.points, measure.weights
    k = len(x)
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > k:
        raise RankDeficiencyError(
            f"n_max = {n_max} exceeds the number of support points ({k}); "
            "the orthonormal polynomials stop at degree k - 1"
        )
    Q = np.zeros((k, n_max))
    q = np.sqrt(w)
    Q[:, 0] = q
    a = np.zeros(n_max - 1)
    b = np.zeros(n_max)
    scale = max(np.max(np.abs(x)), 1.0)
    for n in range(n_max):
        v = x * Q[:, n]
        b[n] = Q[:, n] @ v
        if n == n_max - 1:
            break
        v -= b[n] * Q[:, n]
        if n > 0:
            v -= a[n - 1] * Q[:, n - 1]
        v -= Q[:, : n + 1] @ (Q[:, : n + 1].T @ v)
        a2 = v @ v
        if not a2 > (1e-14 * scale) ** 2:
            raise BreakdownError(n + 1, a2)
        a[n] = np.sqrt(a2)
        Q[:, n + 1] = v / a[n]
    return a, b


def measure_to_jacobi(measure: DiscreteMeasure, n_max: int) -> JacobiModel:
    a, b = stieltjes(measure, n_max)
    return JacobiModel.explicit(a, b)


def jacobi_to_measure(model: JacobiModel) -> DiscreteMeasure:
    """Spectral measure of ``delta_1`` for a finite explicit Jacobi matrix."""
    from scipy.linalg import eigh_tridiagonal

    n = model.length
    vals, vecs = eigh_tridiagonal(model.diagonal(n), model.offdiagonal(n - 1))
    return DiscreteMeasure.normalized(vals, vecs[0] ** 2)
