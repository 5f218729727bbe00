"""Phase-space SLD and RLD quantum Fisher information matrices and the scalar
Cramer-Rao bounds built from them.

Conventions: real symplectic form Omega (block [[0, 1], [-1, 0]]) and vacuum
covariance I/2. In this convention

    H_ab = 2 vec(dC_a)^T M^+ vec(dC_b) + dd_a^T C^-1 dd_b,   M = 4 C kron C - Omega kron Omega
    J_ab = 2 vec(dC_a)^+ Sigma^-1 vec(dC_b) + 2 dd_a^T Gamma^-1 dd_b,
           Gamma = 2C + i Omega,  Sigma = Gamma^+ kron Gamma

so that Sigma vec(X) = vec(Gamma X Gamma^T). Both forms are pinned against
number-basis calculations in ``fock``.
"""
from dataclasses import dataclass
import math

import numpy as np

from .dynamics import SensitivityBundle
from .errors import MagnonMetrologyError, SingularGamma, SingularQfim
from .gaussian import GaussianState, symplectic_form, vec

PINV_RCOND = 1e-12
GAMMA_SV_RTOL = 1e-10
QFIM_COND_LIMIT = 1e12
BMI_RULES = ("max", "min")


@dataclass(frozen=True)
class QfimPair:
    H: np.ndarray
    J: np.ndarray | None


@dataclass(frozen=True)
class BoundsReport:
    b_s: float
    b_r: float
    bmi: float
    ratio: float
    chosen: str
    rule: str = "max"

    def as_dict(self) -> dict:
        return {"b_s": self.b_s, "b_r": self.b_r, "bmi": self.bmi, "ratio": self.ratio,
                "chosen": self.chosen, "rule": self.rule}


def sld_superoperator(C: np.ndarray) -> np.ndarray:
    Om = symplectic_form(C.shape[0] // 2)
    return 4.0 * np.kron(C, C) - np.kron(Om, Om)


def gamma_matrix(C: np.ndarray) -> np.ndarray:
    return 2.0 * C + 1j * symplectic_form(C.shape[0] // 2)


def rld_superoperator(Gamma: np.ndarray) -> np.ndarray:
    return np.kron(Gamma.conj().T, Gamma)


def _check_real_symmetric(C):
    if np.iscomplexobj(C) or not np.allclose(C, C.T, rtol=0, atol=1e-12 * max(1.0, np.abs(C).max())):
        raise ValueError("covariance must be real symmetric")


def sld_qfim(state: GaussianState, sens: SensitivityBundle, rcond: float = PINV_RCOND) -> np.ndarray:
    """SLD quantum Fisher information matrix of a Gaussian state."""
    C = state.C
    _check_real_symmetric(C)
    state.check_physical(1e-8)
    if any(m.shape != C.shape for m in sens.dC) or any(v.shape != state.d.shape for v in sens.dd):
        raise ValueError("sensitivity dimensions do not match the state")
    Mp = np.linalg.pinv(sld_superoperator(C), rcond=rcond, hermitian=True)
    V = np.stack([vec(m) for m in sens.dC], axis=1)
    Dd = np.stack(sens.dd, axis=1)
    H = 2.0 * V.T @ Mp @ V + Dd.T @ np.linalg.solve(C, Dd)
    return 0.5 * (H + H.T)


def rld_qfim(state: GaussianState, sens: SensitivityBundle, sv_rtol: float = GAMMA_SV_RTOL) -> np.ndarray:
    """RLD quantum Fisher information matrix (complex Hermitian)."""
    C = state.C
    _check_real_symmetric(C)
    Gamma = gamma_matrix(C)
    sv = np.linalg.svd(Gamma, compute_uv=False)
    if sv[-1] < sv_rtol * sv[0]:
        raise SingularGamma(
            f"2C + i Omega is near-singular (smallest singular value {sv[-1]:.3e}, ratio {sv[-1] / sv[0]:.3e})",
            singular_value=float(sv[-1]))
    V = np.stack([vec(m) for m in sens.dC], axis=1).astype(complex)
    Dd = np.stack(sens.dd, axis=1).astype(complex)
    J = 2.0 * V.conj().T @ np.linalg.solve(rld_superoperator(Gamma), V)
    J = J + 2.0 * Dd.T @ np.linalg.solve(Gamma, Dd)
    dev = np.abs(J - J.conj().T).max()
    if dev > 1e-8 * max(np.abs(J).max(), np.finfo(float).tiny):
        raise MagnonMetrologyError(f"RLD QFIM not Hermitian (deviation {dev:.3e})")
    return 0.5 * (J + J.conj().T)


def qfim_pair(state: GaussianState, sens: SensitivityBundle) -> QfimPair:
    H = sld_qfim(state, sens)
    try:
        J = rld_qfim(state, sens)
    except SingularGamma:
        J = None
    return QfimPair(H, J)


def trace_abs(A: np.ndarray) -> float:
    """Tr|A| with |A| = sqrt(A A^+)."""
    w = np.linalg.eigvalsh(A @ A.conj().T)
    return float(np.sqrt(np.clip(w, 0.0, None)).sum())


def _inverse(Q, what):
    Q = np.asarray(Q)
    if not np.all(np.isfinite(Q)):
        raise SingularQfim(f"{what} has non-finite entries")
    cond = np.linalg.cond(Q)
    if not np.isfinite(cond) or cond > QFIM_COND_LIMIT:
        raise SingularQfim(f"{what} is numerically singular (condition number {cond:.3e})")
    return np.linalg.inv(Q)


def bounds(H, J=None, rule: str = "max") -> BoundsReport:
    """B_S = Tr[H^-1], B_R = Tr[Re J^-1] + Tr|Im J^-1| (single repetition) and their combination.

    ``rule="max"`` takes the larger (tighter) of the two lower bounds; ``rule="min"``
    takes the smaller. Without J (pure-state limit, where B_R -> 0 and the RLD bound
    carries no information) b_r is reported as +inf and the SLD bound is used.
    """
    if rule not in BMI_RULES:
        raise ValueError(f"rule must be one of {BMI_RULES}")
    H = np.atleast_2d(np.asarray(H, dtype=float))
    b_s = float(np.trace(_inverse(H, "SLD QFIM")))
    if J is None:
        return BoundsReport(b_s, math.inf, b_s, 0.0, "SLD", rule)
    Ji = _inverse(np.atleast_2d(np.asarray(J, dtype=complex)), "RLD QFIM")
    b_r = float(np.trace(Ji.real)) + trace_abs(Ji.imag)
    ratio = b_s / b_r
    if math.isclose(b_s, b_r, rel_tol=1e-12):
        chosen = "EQUAL"
    elif (b_s > b_r) == (rule == "max"):
        chosen = "SLD"
    else:
        chosen = "RLD"
    bmi = max(b_s, b_r) if rule == "max" else min(b_s, b_r)
    return BoundsReport(b_s, b_r, bmi, ratio, chosen, rule)
