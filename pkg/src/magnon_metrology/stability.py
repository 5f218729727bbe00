"""Routh-Hurwitz stability of the drift matrix, cross-checked against its spectrum."""
from dataclasses import dataclass

import numpy as np

from .errors import NotHurwitz, StabilityInconsistency

MARGINAL_RTOL = 1e-9
# Homogeneity degree of each Hurwitz quantity in the spectral scale.
_DEGREES = (1, 3, 6, 10)


@dataclass(frozen=True)
class CharPoly:
    """Coefficients of lambda^4 + f1 lambda^3 + f2 lambda^2 + f3 lambda + f4."""
    f1: float
    f2: float
    f3: float
    f4: float

    def coefficients(self) -> np.ndarray:
        return np.array([1.0, self.f1, self.f2, self.f3, self.f4])


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    hurwitz_values: tuple[float, float, float, float]
    max_real_eig: float
    eigenvalues: np.ndarray
    marginal: bool = False

    def as_dict(self) -> dict:
        return {
            "stable": self.stable,
            "marginal": self.marginal,
            "hurwitz_values": list(self.hurwitz_values),
            "max_real_eig": self.max_real_eig,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
        }


def char_poly(A) -> CharPoly:
    """Characteristic polynomial det(lambda I - A) by the Leverrier-Faddeev recursion."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (4, 4):
        raise ValueError("char_poly expects a 4x4 matrix")
    c = np.zeros(n + 1)
    c[n] = 1.0
    Mk = np.zeros_like(A)
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + c[n - k + 1] * eye
        c[n - k] = -np.trace(A @ Mk) / k
    return CharPoly(f1=c[3], f2=c[2], f3=c[1], f4=c[0])


def hurwitz_values(cp: CharPoly) -> tuple[float, float, float, float]:
    """Leading Hurwitz determinants of the quartic.

    The last one is f4 times the third; stable iff all four are positive.
    """
    f1, f2, f3, f4 = cp.f1, cp.f2, cp.f3, cp.f4
    h2 = f1 * f2 - f3
    h3 = f1 * f2 * f3 - f1**2 * f4 - f3**2
    h4 = f1 * f2 * f3 * f4 - f1**2 * f4**2 - f3**2 * f4
    return (f1, h2, h3, h4)


def routh_hurwitz(A, *, rtol: float = MARGINAL_RTOL, check: bool = True) -> StabilityVerdict:
    A = np.asarray(A, dtype=float)
    values = hurwitz_values(char_poly(A))
    eig = np.linalg.eigvals(A)
    max_re = float(eig.real.max())
    scale = float(np.abs(eig).max())
    marginal = any(abs(v) <= rtol * scale**k for v, k in zip(values, _DEGREES))
    stable = (not marginal) and all(v > 0 for v in values)
    if check and not marginal:
        norm = np.linalg.norm(A, 2)
        if stable != (max_re < 0) and abs(max_re) > rtol * norm:
            raise StabilityInconsistency(
                f"Routh-Hurwitz says stable={stable} but max Re(eig) = {max_re:.6e}")
    return StabilityVerdict(stable, tuple(float(v) for v in values), max_re, eig, marginal)


def require_hurwitz(A) -> StabilityVerdict:
    verdict = routh_hurwitz(A)
    if not verdict.stable:
        tag = "marginal" if verdict.marginal else "unstable"
        raise NotHurwitz(f"drift matrix is {tag} (max Re eig = {verdict.max_real_eig:.4e} rad/s)")
    return verdict
