"""Oracle suite: phase-space QFIs against number-basis QFIs and closed forms."""
from dataclasses import dataclass
import itertools
import math

import numpy as np

from .dynamics import SensitivityBundle
from .errors import TruncationLeak
from .fock import build_gaussian_fock, fock_rld_qfi, fock_sld_qfi, phase_space_moments, squeeze_symplectic, squeeze_symplectic_dr
from .gaussian import GaussianState
from .metrology import rld_qfim, sld_qfim

NBARS = (0.05, 0.2, 0.5, 1.0, 2.0)
SQUEEZES = (0.0, 0.3, 0.8)
ALPHAS = (0.0, 0.5)
ORACLE_PARAMS = ("nbar", "r", "alpha_re")


@dataclass(frozen=True)
class OracleCheck:
    name: str
    value: float
    expected: float
    tol: float

    @property
    def rel_err(self) -> float:
        return abs(self.value - self.expected) / max(abs(self.expected), np.finfo(float).tiny)

    @property
    def passed(self) -> bool:
        return bool(self.rel_err <= self.tol)


def phase_space_sensitivity(param: str, nbar: float, r: float, phi: float = 0.0) -> SensitivityBundle:
    """Closed-form (dC, dd) of the single-mode family with respect to nbar, r or Re(alpha)."""
    S = squeeze_symplectic(r, phi)
    if param == "nbar":
        dC, dd = S @ S.T, np.zeros(2)
    elif param == "r":
        dS = squeeze_symplectic_dr(r, phi)
        dC, dd = (2 * nbar + 1) / 2 * (dS @ S.T + S @ dS.T), np.zeros(2)
    elif param == "alpha_re":
        dC, dd = np.zeros((2, 2)), np.array([math.sqrt(2.0), 0.0])
    else:
        raise ValueError(param)
    return SensitivityBundle((param,), [dC], [dd])


def fock_family(param: str, nbar: float, r: float, alpha: float, dim: int):
    if param == "nbar":
        return lambda x: build_gaussian_fock(x, r, 0.0, alpha, dim)
    if param == "r":
        return lambda x: build_gaussian_fock(nbar, x, 0.0, alpha, dim)
    if param == "alpha_re":
        return lambda x: build_gaussian_fock(nbar, r, 0.0, x, dim)
    raise ValueError(param)


def sufficient_dim(nbar, r, alpha, start=60, step=20, limit=400) -> int:
    """Smallest dim >= start (in steps) whose truncation leakage stays below tolerance."""
    dim = start
    while True:
        try:
            # probe slightly beyond the operating point so the FD neighbours also fit
            build_gaussian_fock(nbar * 1.001 + 1e-4, r * 1.001 + 1e-4, 0.0, alpha + 1e-4, dim)
            return dim
        except TruncationLeak:
            dim += step
            if dim > limit:
                raise


def fock_values(param, nbar, r, alpha, dim, h=1e-5):
    x0 = {"nbar": nbar, "r": r, "alpha_re": alpha}[param]
    fam = fock_family(param, nbar, r, alpha, dim)
    return fock_sld_qfi(fam, x0, h), fock_rld_qfi(fam, x0, h)


def phase_space_values(param, nbar, r, alpha):
    C, d = phase_space_moments(nbar, r, 0.0, alpha)
    st = GaussianState(d, C)
    sens = phase_space_sensitivity(param, nbar, r)
    return float(sld_qfim(st, sens)[0, 0]), float(rld_qfim(st, sens)[0, 0].real)


def converged_fock_values(param, nbar, r, alpha, dim, h=1e-5, tol=1e-6, step=20, limit=400):
    """Raise dim until the dim and dim + step results agree to ``tol``.

    The QFI weights the high-n tail through 1/p_n, so a trace leakage of 1e-8 can
    still leave a ~1e-6 truncation error in the QFI itself.
    """
    cur = fock_values(param, nbar, r, alpha, dim, h)
    while True:
        nxt = fock_values(param, nbar, r, alpha, dim + step, h)
        if all(abs(b - a) <= tol * abs(a) for a, b in zip(cur, nxt)) or dim + step >= limit:
            return dim, cur, nxt
        dim, cur = dim + step, nxt


def grid_checks(tol: float = 1e-4, convergence_tol: float = 1e-6, h: float = 1e-5):
    checks = []
    for nbar, r, alpha in itertools.product(NBARS, SQUEEZES, ALPHAS):
        for param in ORACLE_PARAMS:
            H_ps, J_ps = phase_space_values(param, nbar, r, alpha)
            dim, (H_f, J_f), (H_f2, J_f2) = converged_fock_values(
                param, nbar, r, alpha, sufficient_dim(nbar, r, alpha), h, convergence_tol)
            tag = f"n={nbar} r={r} a={alpha} d/d{param} dim={dim}"
            checks += [
                OracleCheck(f"SLD {tag}", H_ps, H_f, tol),
                OracleCheck(f"RLD {tag}", J_ps, J_f, tol),
                OracleCheck(f"SLD dim-convergence {tag}", H_f2, H_f, convergence_tol),
                OracleCheck(f"RLD dim-convergence {tag}", J_f2, J_f, convergence_tol),
            ]
    return checks


def analytic_checks():
    checks = []
    for nbar in NBARS:
        C = (2 * nbar + 1) / 2 * np.eye(2)
        th = GaussianState(np.zeros(2), C)
        H = sld_qfim(th, SensitivityBundle(("nbar",), [np.eye(2)], [np.zeros(2)]))[0, 0]
        checks.append(OracleCheck(f"thermal SLD 1/(n(n+1)) n={nbar}", H, 1 / (nbar * (nbar + 1)), 1e-8))
        nu = 2 * nbar + 1
        J = rld_qfim(th, SensitivityBundle(("x",), [np.zeros((2, 2))], [np.array([1.0, 0.0])]))[0, 0].real
        checks.append(OracleCheck(f"thermal displacement RLD 2nu/(nu^2-1) n={nbar}", J, 2 * nu / (nu**2 - 1), 1e-6))
    for r in (0.0, 0.3, 0.8, 1.5):
        C = np.diag([math.exp(2 * r), math.exp(-2 * r)]) / 2
        dC = np.diag([math.exp(2 * r), -math.exp(-2 * r)])
        H = sld_qfim(GaussianState(np.zeros(2), C), SensitivityBundle(("r",), [dC], [np.zeros(2)]))[0, 0]
        checks.append(OracleCheck(f"squeezed vacuum SLD H_r=2 r={r}", H, 2.0, 1e-10))
    H = sld_qfim(GaussianState(np.zeros(2), np.eye(2) / 2),
                 SensitivityBundle(("x",), [np.zeros((2, 2))], [np.array([1.0, 0.0])]))[0, 0]
    checks.append(OracleCheck("coherent displacement SLD H=2", H, 2.0, 1e-12))
    return checks


def run_oracle_suite(tol: float = 1e-4):
    return analytic_checks() + grid_checks(tol)


def format_table(checks) -> str:
    lines = [f"{'result':6s} {'rel_err':>10s} {'tol':>8s}  check"]
    for c in checks:
        lines.append(f"{'PASS' if c.passed else 'FAIL':6s} {c.rel_err:10.3e} {c.tol:8.1e}  {c.name}")
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines)
