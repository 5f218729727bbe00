"""Phase-space primitives shared by the dynamics and metrology code.

Quadratures are ordered (X_c, P_c, X_m, P_m) with vacuum covariance I/2.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NonPhysicalState

_OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal repetition of [[0, 1], [-1, 0]]."""
    return np.kron(np.eye(n_modes), _OMEGA_1)


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, so that vec(A X B) = (B^T kron A) vec(X)."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, n: int) -> np.ndarray:
    return np.asarray(v).reshape((n, n), order="F")


def physicality_eigenvalues(C: np.ndarray) -> np.ndarray:
    """Eigenvalues of C + (i/2) Omega; all >= 0 for a physical covariance."""
    n_modes = C.shape[0] // 2
    return np.linalg.eigvalsh(C + 0.5j * symplectic_form(n_modes))


@dataclass(frozen=True)
class GaussianState:
    d: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        C = np.asarray(self.C, dtype=float)
        if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] % 2 or d.shape != (C.shape[0],):
            raise ValueError(f"inconsistent shapes d{d.shape}, C{C.shape}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "C", C)

    @property
    def n_modes(self) -> int:
        return self.C.shape[0] // 2

    def min_physical_eigenvalue(self) -> float:
        return float(physicality_eigenvalues(self.C).min())

    def is_physical(self, tol: float = 1e-10) -> bool:
        return self.min_physical_eigenvalue() >= -tol

    def check_physical(self, tol: float = 1e-8) -> None:
        lo = self.min_physical_eigenvalue()
        if lo < -tol:
            raise NonPhysicalState(f"C + (i/2)Omega has eigenvalue {lo:.3e} < -{tol:g}")

    def reduced(self, indices) -> "GaussianState":
        """Marginal state on a subset of quadratures (e.g. [0, 1] for the cavity)."""
        idx = list(indices)
        return GaussianState(self.d[idx], self.C[np.ix_(idx, idx)])

    @property
    def amplitudes(self) -> np.ndarray:
        """Complex mode amplitudes <a_k> = (d_{2k} + i d_{2k+1}) / sqrt(2)."""
        return (self.d[0::2] + 1j * self.d[1::2]) / np.sqrt(2.0)
