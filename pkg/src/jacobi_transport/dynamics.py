"""Time-domain check of the Landauer-Buttiker current on truncated reservoirs.

For a quasi-free initial state with one-particle density ``T`` the expected
current is the one-particle trace ``tr(T e^{itH} j e^{-itH})`` with
``j = -i lambda (|delta_L><psi_r| - |psi_r><delta_L|)``.  Both ``H`` and
``j`` live on the finite chain (left lead, sample, right lead), so the
evolution is exact given one eigendecomposition.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import eigh_tridiagonal

from .errors import NumericalQualityWarning
from .transport import EBBSpec


class UnsupportedLeadError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TruncatedEBB:
    """Finite (M + L + M)-site version of an EBB model.

    Site order: left lead from its far end inward (``psi_l`` at index
    ``M - 1``), the sample, then the right lead outward (``psi_r`` at index
    ``M + L``).  ``H`` is tridiagonal and stored as ``(diag, offdiag)``.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    M: int
    L: int
    lam: float
    T_left: np.ndarray
    T_sample: np.ndarray
    T_right: np.ndarray

    @property
    def size(self) -> int:
        return len(self.diag)

    @property
    def sample_last(self) -> int:
        return self.M + self.L - 1

    @property
    def psi_r(self) -> int:
        return self.M + self.L

    def hamiltonian(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def density(self) -> np.ndarray:
        n, M, L = self.size, self.M, self.L
        T = np.zeros((n, n))
        T[:M, :M] = self.T_left
        T[M : M + L, M : M + L] = self.T_sample
        T[M + L :, M + L :] = self.T_right
        return T

    def current_operator(self) -> np.ndarray:
        j = np.zeros((self.size, self.size), dtype=complex)
        j[self.sample_last, self.psi_r] = -1j * self.lam
        j[self.psi_r, self.sample_last] = 1j * self.lam
        return j

    def max_hopping(self) -> float:
        return float(np.max(np.abs(self.offdiag))) if len(self.offdiag) else 0.0


def _lead_chain(lead, M):
    """Outward-ordered ``(b, a)`` of a lead truncated to ``M`` sites."""
    if lead.kind == "free-half-line":
        return np.zeros(M), np.ones(M - 1)
    if lead.kind == "periodic-half-line":
        per = lead.params["per"]
        cell = per if lead.params["side"] == "right" else per.reversed()
        idx = np.arange(M)
        return cell.b[idx % cell.L], cell.a[idx[:-1] % cell.L]
    if lead.kind == "finite-chain":
        b = np.asarray(lead.params["b"], dtype=float)
        if M > len(b):
            raise ValueError(f"finite-chain lead has only {len(b)} sites, M = {M} requested")
        return b[:M].copy(), np.asarray(lead.params["a"], dtype=float)[: M - 1].copy()
    raise UnsupportedLeadError(f"lead kind {lead.kind!r} has no finite truncation")


def _fermi_projection(b, a, mu):
    if len(b) == 1:
        return np.array([[1.0 if b[0] <= mu else 0.0]])
    vals, vecs = eigh_tridiagonal(b, a)
    occ = np.ascontiguousarray(vecs[:, vals <= mu])
    return occ @ occ.T


def build_truncated(spec: EBBSpec, M: int, sample_state="uniform") -> TruncatedEBB:
    """Assemble the truncated model; leads are cut with Dirichlet ends at depth ``M``.

    ``sample_state`` is ``"uniform"`` (``1_L / L``), ``"empty"``, ``"half"``
    (``1_L / 2``) or an explicit ``L x L`` density.  Lead
    chemical potentials default to the spec window; ``Lead.mu`` overrides them
    (e.g. for equal or reversed potentials).
    """
    if M < 1:
        raise ValueError("truncation depth M must be >= 1")
    bl, al = _lead_chain(spec.leads[0], M)
    br, ar = _lead_chain(spec.leads[1], M)
    L = spec.L
    diag = np.concatenate([bl[::-1], spec.b, br])
    off = np.concatenate([al[::-1], [spec.lam], spec.a, [spec.lam], ar])
    mu_l, mu_r = spec.window
    # a chemical potential set on a lead overrides the window
    if spec.leads[0].mu is not None:
        mu_l = spec.leads[0].mu
    if spec.leads[1].mu is not None:
        mu_r = spec.leads[1].mu
    T_left = np.ascontiguousarray(_fermi_projection(bl, al, mu_l)[::-1, ::-1])
    T_right = _fermi_projection(br, ar, mu_r)
    if isinstance(sample_state, np.ndarray):
        T_sample = np.asarray(sample_state, dtype=float)
        if T_sample.shape != (L, L) or not np.allclose(T_sample, T_sample.T):
            raise ValueError("explicit sample state must be a symmetric L x L matrix")
        ev = np.linalg.eigvalsh(T_sample)
        if ev.min() < -1e-12 or ev.max() > 1 + 1e-12:
            raise ValueError("sample state must satisfy 0 <= T <= 1")
    elif sample_state == "uniform":
        T_sample = np.eye(L) / L
    elif sample_state == "empty":
        T_sample = np.zeros((L, L))
    elif sample_state == "half":
        T_sample = np.eye(L) / 2
    else:
        raise ValueError(f"unknown sample_state {sample_state!r}")
    return TruncatedEBB(diag, off, M, L, float(spec.lam), T_left, T_sample, T_right)


class _Evolution:
    """Eigenbasis data shared by all time evaluations of one system."""

    def __init__(self, sys: TruncatedEBB):
        self.sys = sys
        self.energies, U = eigh_tridiagonal(sys.diag, sys.offdiag)
        U = np.ascontiguousarray(U)
        M, L = sys.M, sys.L
        # A = U^T T U, block by block
        Ul, Us, Ur = U[:M], U[M : M + L], U[M + L :]
        self.A = Ul.T @ (sys.T_left @ Ul) + Us.T @ (sys.T_sample @ Us) + Ur.T @ (sys.T_right @ Ur)
        self.p = U[sys.psi_r].copy()
        self.q = U[sys.sample_last].copy()
        self.U = U

    def currents(self, times, chunk: int = 256) -> np.ndarray:
        """``2 lambda Im <psi_r| T(t) |delta_L>`` with ``T(t) = e^{-itH} T e^{itH}``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        out = np.empty(len(times))
        eps = self.energies
        for start in range(0, len(times), chunk):
            t = times[start : start + chunk]
            phase = np.exp(1j * np.outer(eps, t))
            Y = self.q[:, None] * phase
            AY = self.A @ np.ascontiguousarray(Y.real) + 1j * (self.A @ np.ascontiguousarray(Y.imag))
            x = np.einsum("at,at->t", np.conj(self.p[:, None] * phase), AY)
            out[start : start + chunk] = 2.0 * self.sys.lam * x.imag
        return out

    def exact_cesaro(self, T_max: float) -> float:
        """Closed-form time average of :meth:`currents` over ``[0, T_max]``."""
        eps = self.energies
        omega = eps[None, :] - eps[:, None]  # omega[a, b] = eps_b - eps_a
        x = omega * T_max
        with np.errstate(invalid="ignore", divide="ignore"):
            avg = np.where(np.abs(x) > 1e-12, np.expm1(1j * x) / (1j * x), 1.0)
        val = np.einsum("a,ab,b,ab->", self.p, self.A, self.q, avg)
        return float(2.0 * self.sys.lam * val.imag)

    def density_at(self, t: float) -> np.ndarray:
        ph = np.exp(-1j * self.energies * t)
        Ut = self.U * ph[None, :]
        return Ut @ self.A @ Ut.conj().T


def _evolution(sys: TruncatedEBB) -> _Evolution:
    ev = sys.__dict__.get("_evolution")
    if ev is None:
        ev = _Evolution(sys)
        object.__setattr__(sys, "_evolution", ev)
    return ev


def current_at_time(sys: TruncatedEBB, t):
    """Expected current ``<J_L>_t`` (scalar or array ``t``)."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    if sys.lam == 0:
        return 0.0 if np.ndim(t) == 0 else np.zeros(np.shape(t))
    out = _evolution(sys).currents(t)
    return float(out[0]) if np.ndim(t) == 0 else out


def recurrence_time(sys: TruncatedEBB) -> float:
    """Time for a ballistic front to reach the lead ends (speed <= 2 max|a|)."""
    v = 2.0 * max(sys.max_hopping(), 1e-300)
    return sys.M / v


def time_series(sys: TruncatedEBB, T_max: float, samples: int = 2000) -> tuple[np.ndarray, np.ndarray]:
    t = np.linspace(0.0, T_max, samples + 1)
    return t, np.atleast_1d(current_at_time(sys, t))


def cesaro_current(sys: TruncatedEBB, T_max: float, samples: int = 2000) -> float:
    """Trapezoid approximation of ``(1/T_max) int_0^T_max <J_L>_s ds``."""
    if not T_max > 0:
        raise ValueError("T_max must be positive")
    if T_max >= recurrence_time(sys):
        warnings.warn(
            f"T_max = {T_max} reaches the reservoir recurrence time {recurrence_time(sys):.1f}",
            NumericalQualityWarning,
            stacklevel=2,
        )
    t, J = time_series(sys, T_max, samples)
    return float(trapezoid(J, t) / T_max)
