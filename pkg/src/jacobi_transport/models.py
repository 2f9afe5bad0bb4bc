"""Jacobi parameter generators for half-line operators.

A :class:`JacobiModel` describes the sequences ``a_n > 0`` (off-diagonal) and
``b_n`` (diagonal), ``n >= 1``, of a bounded Jacobi matrix.  Infinite kinds
are generated lazily; ``explicit`` models are finite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ._rng import Xoshiro256StarStar

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
DEFAULT_BOUND = 1e3

KINDS = ("explicit", "free", "periodic", "anderson", "almost-mathieu", "fibonacci")

_uniform_cache: dict[int, np.ndarray] = {}


class ModelError(ValueError):
    pass


def uniform_stream(seed: int, n: int) -> np.ndarray:
    """First ``n`` doubles of the xoshiro256** stream for ``seed`` (cached)."""
    cached = _uniform_cache.get(seed)
    if cached is not None and len(cached) >= n:
        return cached[:n]
    gen = Xoshiro256StarStar(seed)
    out = gen.uniform(max(n, 1024))
    _uniform_cache[seed] = out
    return out[:n]


@dataclass(frozen=True, eq=False)
class JacobiModel:
    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    length: int | None = None
    bound: float = DEFAULT_BOUND

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown model kind {self.kind!r}")
        p = self.params
        if self.kind == "explicit":
            b = np.asarray(p["b"], dtype=float)
            a = np.asarray(p.get("a", []), dtype=float)
            if b.ndim != 1 or len(b) == 0:
                raise ModelError("explicit model needs a non-empty b list")
            if len(a) not in (len(b) - 1, len(b)):
                raise ModelError("explicit model needs len(a) == len(b) - 1 or len(b)")
            object.__setattr__(self, "length", len(b))
            object.__setattr__(self, "_a", a)
            object.__setattr__(self, "_b", b)
            self._check(a, b)
        elif self.kind == "periodic":
            a = np.asarray(p["a"], dtype=float)
            b = np.asarray(p["b"], dtype=float)
            if len(a) != len(b) or len(b) == 0:
                raise ModelError("periodic model needs equal-length a and b")
            self._check(a, b)
        elif self.kind == "anderson":
            if self.seed is None:
                raise ModelError("anderson model needs a seed")
            if p["W"] < 0:
                raise ModelError("disorder width W must be non-negative")
            if 1.0 + p["W"] / 2 > self.bound:
                raise ModelError("anderson parameters exceed the boundedness bound")
        elif self.kind == "almost-mathieu":
            if 1.0 + 2 * abs(p["lam"]) > self.bound:
                raise ModelError("almost-Mathieu coupling exceeds the boundedness bound")
        elif self.kind == "fibonacci":
            if 1.0 + abs(p["lam"]) > self.bound:
                raise ModelError("Fibonacci coupling exceeds the boundedness bound")

    def _check(self, a, b):
        if np.any(a <= 0):
            idx = int(np.argmax(a <= 0)) + 1
            raise ModelError(f"off-diagonal a_{idx} = {a[idx - 1]} is not positive")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ModelError("Jacobi parameters must be finite")
        aa = np.zeros(max(len(a), len(b)))
        bb = np.zeros_like(aa)
        aa[: len(a)] = a
        bb[: len(b)] = b
        if np.max(np.abs(aa) + np.abs(bb)) > self.bound:
            raise ModelError(f"Jacobi parameters exceed the boundedness bound {self.bound}")

    # constructors

    @classmethod
    def free(cls) -> JacobiModel:
        return cls("free")

    @classmethod
    def explicit(cls, a, b) -> JacobiModel:
        return cls("explicit", {"a": [float(x) for x in a], "b": [float(x) for x in b]})

    @classmethod
    def periodic(cls, a, b) -> JacobiModel:
        return cls("periodic", {"a": [float(x) for x in a], "b": [float(x) for x in b]})

    @classmethod
    def anderson(cls, W: float, seed: int) -> JacobiModel:
        return cls("anderson", {"W": float(W)}, seed=int(seed))

    @classmethod
    def almost_mathieu(cls, lam: float, alpha: float = GOLDEN, theta: float = 0.37) -> JacobiModel:
        return cls("almost-mathieu", {"lam": float(lam), "alpha": float(alpha), "theta": float(theta)})

    @classmethod
    def fibonacci(cls, lam: float) -> JacobiModel:
        return cls("fibonacci", {"lam": float(lam)})

    # parameter access

    @property
    def period(self) -> int | None:
        if self.kind == "free":
            return 1
        if self.kind == "periodic":
            return len(self.params["b"])
        return None

    @property
    def is_finite(self) -> bool:
        return self.kind == "explicit"

    def _require(self, n: int, available: int, what: str):
        if n > available:
            raise ModelError(f"{what}_{n} requested but the explicit model only has {available}")

    def diagonal(self, n: int) -> np.ndarray:
        """``b_1, ..., b_n``."""
        idx = np.arange(1, n + 1)
        k = self.kind
        if k == "explicit":
            self._require(n, len(self._b), "b")
            return self._b[:n].copy()
        if k == "free":
            return np.zeros(n)
        if k == "periodic":
            b = np.asarray(self.params["b"], dtype=float)
            return b[(idx - 1) % len(b)]
        if k == "anderson":
            W = self.params["W"]
            return W * (uniform_stream(self.seed, n) - 0.5)
        if k == "almost-mathieu":
            p = self.params
            return 2.0 * p["lam"] * np.cos(2.0 * np.pi * (p["alpha"] * idx + p["theta"]))
        if k == "fibonacci":
            frac = np.mod(idx * GOLDEN, 1.0)
            return self.params["lam"] * ((frac >= 1.0 - GOLDEN) & (frac < 1.0)).astype(float)
        raise AssertionError(k)

    def offdiagonal(self, n: int) -> np.ndarray:
        """``a_1, ..., a_n``."""
        if self.kind == "explicit":
            self._require(n, len(self._a), "a")
            return self._a[:n].copy()
        if self.kind == "periodic":
            a = np.asarray(self.params["a"], dtype=float)
            return a[np.arange(n) % len(a)]
        return np.ones(n)

    def restrict(self, L: int) -> JacobiModel:
        """Dirichlet restriction to sites ``1..L`` as an explicit model."""
        if L < 1:
            raise ModelError("restriction length must be >= 1")
        return JacobiModel.explicit(self.offdiagonal(L - 1), self.diagonal(L))

    def shifted(self, m: int) -> JacobiModel:
        """The model with parameters ``(a_{n+m}, b_{n+m})``, as an explicit list."""
        if not self.is_finite:
            raise ModelError("shifted() is only defined for explicit models")
        return JacobiModel.explicit(self._a[m:], self._b[m:])

    def matrix(self, n: int | None = None) -> np.ndarray:
        """Dense ``n x n`` Jacobi matrix (for tests and small oracles)."""
        if n is None:
            if not self.is_finite:
                raise ModelError("matrix size required for infinite models")
            n = self.length
        b = self.diagonal(n)
        a = self.offdiagonal(n - 1)
        return np.diag(b) + np.diag(a, 1) + np.diag(a, -1)

    # serialization

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "params": dict(self.params), "seed": self.seed, "length": self.length}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> JacobiModel:
        kind = d["kind"]
        if kind == "explicit-list":
            kind = "explicit"
        return cls(kind, dict(d.get("params", {})), seed=d.get("seed"), length=d.get("length"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> JacobiModel:
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, JacobiModel) and self.to_json() == other.to_json()

    def __hash__(self):
        return hash(self.to_json())

    def __repr__(self):
        return f"JacobiModel({self.kind!r}, {self.params!r}, seed={self.seed})"
