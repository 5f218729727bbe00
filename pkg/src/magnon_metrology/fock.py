"""Single-mode Gaussian states in a truncated number basis, and SLD/RLD quantum
Fisher information by direct operator algebra.

This is an oracle for the phase-space formulas in ``metrology``: it shares no
code with them beyond numpy.
"""
from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg as sla

from .errors import RankDeficient, TruncationLeak

SPECTRUM_CUTOFF = 1e-12
LEAK_TOL = 1e-8


@dataclass(frozen=True)
class TruncatedState:
    dim: int
    rho: np.ndarray
    nbar: float
    r: float
    phi: float
    alpha: complex
    # matching phase-space moments (vacuum covariance I/2)
    C: np.ndarray
    d: np.ndarray

    @property
    def leakage(self) -> float:
        return float(1.0 - np.trace(self.rho).real)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def squeeze_symplectic(r: float, phi: float) -> np.ndarray:
    """Phase-space action of exp(r/2 (e^{i phi} a^+2 - e^{-i phi} a^2)); diag(e^r, e^-r) at phi = 0."""
    K = np.array([[math.cos(phi), math.sin(phi)], [math.sin(phi), -math.cos(phi)]])
    return math.cosh(r) * np.eye(2) + math.sinh(r) * K


def squeeze_symplectic_dr(r: float, phi: float) -> np.ndarray:
    K = np.array([[math.cos(phi), math.sin(phi)], [math.sin(phi), -math.cos(phi)]])
    return math.sinh(r) * np.eye(2) + math.cosh(r) * K


def phase_space_moments(nbar: float, r: float = 0.0, phi: float = 0.0, alpha: complex = 0j):
    S = squeeze_symplectic(r, phi)
    C = (2 * nbar + 1) / 2 * S @ S.T
    d = math.sqrt(2.0) * np.array([complex(alpha).real, complex(alpha).imag])
    return C, d


def build_gaussian_fock(nbar: float, r: float = 0.0, phi: float = 0.0, alpha: complex = 0j, dim: int = 60,
                        pad: int = 40, leak_tol: float = LEAK_TOL) -> TruncatedState:
    """rho = D(alpha) S(r, phi) rho_th(nbar) S^+ D^+, built in dim + pad levels and cropped to dim."""
    if dim < 20:
        raise ValueError("dim must be at least 20")
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    N = dim + pad
    a = annihilation(N)
    ad = a.conj().T
    n = np.arange(N)
    p = (1.0 / (1 + nbar)) * (nbar / (1 + nbar)) ** n if nbar > 0 else (n == 0).astype(float)
    alpha = complex(alpha)
    U = np.eye(N, dtype=complex)
    if r != 0:
        xi = r * np.exp(1j * phi)
        U = sla.expm(0.5 * (xi * ad @ ad - np.conj(xi) * a @ a))
    if alpha != 0:
        U = sla.expm(alpha * ad - np.conj(alpha) * a) @ U
    rho = (U * p) @ U.conj().T
    rho = rho[:dim, :dim]
    rho = 0.5 * (rho + rho.conj().T)
    C, d = phase_space_moments(nbar, r, phi, alpha)
    st = TruncatedState(dim, rho, nbar, r, phi, alpha, C, d)
    if st.leakage > leak_tol:
        raise TruncationLeak(f"1 - Tr rho = {st.leakage:.3e} exceeds {leak_tol:g} at dim {dim}")
    return st


def _as_rho(x):
    return x.rho if isinstance(x, TruncatedState) else np.asarray(x)


def central_derivative(family, eps: float, h: float = 1e-5) -> tuple[np.ndarray, np.ndarray]:
    """(rho(eps), d rho / d eps) for a callable family eps -> rho or TruncatedState."""
    rho = _as_rho(family(eps))
    drho = (_as_rho(family(eps + h)) - _as_rho(family(eps - h))) / (2 * h)
    return rho, 0.5 * (drho + drho.conj().T)


def sld_qfim_from_rho(rho: np.ndarray, drhos, cutoff: float = SPECTRUM_CUTOFF) -> np.ndarray:
    """H_ab = Tr[d_a rho L_b] with L_mn = 2 (d rho)_mn / (p_m + p_n) in the eigenbasis of rho."""
    p, V = np.linalg.eigh(rho)
    P = p[:, None] + p[None, :]
    keep = P > cutoff
    inv = np.where(keep, 2.0 / np.where(keep, P, 1.0), 0.0)
    Ds = [V.conj().T @ dr @ V for dr in drhos]
    n = len(Ds)
    H = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            H[i, j] = np.sum(Ds[i].T * (inv * Ds[j])).real
    return 0.5 * (H + H.T)


def rld_qfim_from_rho(rho: np.ndarray, drhos, cutoff: float = SPECTRUM_CUTOFF,
                      support_tol: float = 1e-6) -> np.ndarray:
    """J_ab = Tr[rho L_b L_a^+] with L = rho^+ d rho, i.e. Tr[rho^+ d_b rho d_a rho]."""
    p, V = np.linalg.eigh(rho)
    keep = p > cutoff * p.max()
    if keep.sum() <= 1:
        raise RankDeficient("rho is (numerically) pure; the RLD is undefined")
    Ds = [V.conj().T @ dr @ V for dr in drhos]
    for D in Ds:
        outside = np.linalg.norm(D[~keep][:, keep])
        if outside > support_tol * max(np.linalg.norm(D), np.finfo(float).tiny):
            raise RankDeficient(f"d rho leaves the support of rho (weight {outside:.3e})")
    pinv = np.where(keep, 1.0 / np.where(keep, p, 1.0), 0.0)
    n = len(Ds)
    J = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(n):
            J[a, b] = np.trace((pinv[:, None] * Ds[b]) @ Ds[a])
    return 0.5 * (J + J.conj().T)


def fock_sld_qfi(family, eps: float, h: float = 1e-5) -> float:
    rho, drho = central_derivative(family, eps, h)
    return float(sld_qfim_from_rho(rho, [drho])[0, 0])


def fock_rld_qfi(family, eps: float, h: float = 1e-5) -> float:
    rho, drho = central_derivative(family, eps, h)
    return float(rld_qfim_from_rho(rho, [drho])[0, 0].real)
