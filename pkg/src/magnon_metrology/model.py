"""Linearized cavity-magnon model with a degenerate OPA.

All rates and detunings are angular frequencies in rad/s.
"""
from dataclasses import dataclass, field, fields, replace
import math

import numpy as np

from .constants import HBAR, K_B, TWO_PI
from .errors import ConfigError, SingularDrift

SQRT2 = math.sqrt(2.0)

# Parameters with an analytic derivative of (A, D, b).
DIFFERENTIABLE = (
    "g_mc", "gamma_c", "gamma_m", "delta_c", "delta_m",
    "lambda_opa", "theta", "power", "temperature",
)


@dataclass(frozen=True)
class PhysicalParams:
    delta_c: float
    delta_m: float
    gamma_c: float
    gamma_m: float
    g_mc: float
    lambda_opa: float
    theta: float
    power: float
    omega_laser: float
    omega_c: float
    temperature: float
    # When set, the magnon occupancy is evaluated at omega_m instead of sharing n(omega_c).
    omega_m: float | None = None

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite, got {v!r}")
        checks = [
            ("gamma_c", self.gamma_c > 0), ("gamma_m", self.gamma_m > 0),
            ("lambda_opa", self.lambda_opa >= 0), ("power", self.power >= 0),
            ("temperature", self.temperature >= 0), ("omega_laser", self.omega_laser > 0),
            ("omega_c", self.omega_c > 0),
            ("omega_m", self.omega_m is None or self.omega_m > 0),
        ]
        for name, ok in checks:
            if not ok:
                raise ConfigError(f"invalid {name} = {getattr(self, name)!r}")

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def baseline(cls, **overrides) -> "PhysicalParams":
        """Experimental operating point: P = 500 mW, omega_L/2pi = 10 GHz, T = 10 mK,
        gamma_c/2pi = 5 MHz, gamma_m/2pi = 40 MHz, Delta_c/2pi = 40 MHz, Delta_m = 0,
        g_mc/2pi = 41 MHz, with the OPA at lambda = 0.65 gamma_c, theta = 1.65 pi.

        omega_c defaults to omega_L + Delta_c.
        """
        mhz = TWO_PI * 1e6
        values = dict(
            delta_c=40 * mhz, delta_m=0.0, gamma_c=5 * mhz, gamma_m=40 * mhz,
            g_mc=41 * mhz, lambda_opa=0.65 * 5 * mhz, theta=1.65 * math.pi,
            power=0.5, omega_laser=TWO_PI * 10e9, temperature=0.01,
        )
        values["omega_c"] = values["omega_laser"] + values["delta_c"]
        values.update(overrides)
        return cls(**values)


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupancy 1/(exp(hbar omega / k_B T) - 1); exactly 0 at T = 0."""
    if temperature == 0:
        return 0.0
    x = HBAR * omega / (K_B * temperature)
    with np.errstate(over="ignore"):
        return float(1.0 / np.expm1(x))


def thermal_occupation_dT(omega: float, temperature: float) -> float:
    if temperature == 0:
        return 0.0
    x = HBAR * omega / (K_B * temperature)
    if x > 700:
        return 0.0
    em = math.expm1(x)
    return float(x / temperature * (em + 1.0) / em**2)


def drive_rate(power: float, gamma_c: float, omega_laser: float) -> float:
    """epsilon_L = sqrt(2 P gamma_c / (hbar omega_L))."""
    return math.sqrt(2.0 * power * gamma_c / (HBAR * omega_laser))


@dataclass(frozen=True)
class LinearModel:
    drift: np.ndarray
    diffusion: np.ndarray
    drive: np.ndarray
    epsilon_l: float
    nbar: float
    nbar_m: float
    params: PhysicalParams
    drive_couples_gamma: bool = True
    meta: dict = field(default_factory=dict, compare=False)


def drift_matrix(p: PhysicalParams) -> np.ndarray:
    c2, s2 = 2 * p.lambda_opa * math.cos(p.theta), 2 * p.lambda_opa * math.sin(p.theta)
    g = p.g_mc
    return np.array([
        [-p.gamma_c + c2, p.delta_c + s2, 0.0, g],
        [-p.delta_c + s2, -p.gamma_c - c2, -g, 0.0],
        [0.0, g, -p.gamma_m, p.delta_m],
        [-g, 0.0, -p.delta_m, -p.gamma_m],
    ])


def build_model(params: PhysicalParams, *, drive_couples_gamma: bool = True,
                epsilon_l: float | None = None) -> LinearModel:
    """Drift A, diffusion D and drive b for the quadratures (X_c, P_c, X_m, P_m).

    ``epsilon_l`` overrides the drive rate (used to hold it fixed while gamma_c is
    perturbed when the drive is decoupled from gamma_c).
    """
    nbar = thermal_occupation(params.omega_c, params.temperature)
    nbar_m = nbar if params.omega_m is None else thermal_occupation(params.omega_m, params.temperature)
    eps = drive_rate(params.power, params.gamma_c, params.omega_laser) if epsilon_l is None else float(epsilon_l)
    diffusion = np.diag([
        params.gamma_c * (2 * nbar + 1), params.gamma_c * (2 * nbar + 1),
        params.gamma_m * (2 * nbar_m + 1), params.gamma_m * (2 * nbar_m + 1),
    ])
    drive = np.array([SQRT2 * eps, 0.0, 0.0, 0.0])
    return LinearModel(drift_matrix(params), diffusion, drive, eps, nbar, nbar_m, params,
                       drive_couples_gamma=drive_couples_gamma)


def steady_means(model: LinearModel, cond_limit: float = 1e12) -> np.ndarray:
    """Steady quadrature means d solving A d + b = 0."""
    A = model.drift
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cond_limit:
        raise SingularDrift(f"drift matrix condition number {cond:.3e} exceeds {cond_limit:g}")
    return np.linalg.solve(A, -model.drive)


def mean_amplitudes(d: np.ndarray) -> tuple[complex, complex]:
    """(<c>, <m>) from the quadrature means."""
    d = np.asarray(d)
    return complex(d[0], d[1]) / SQRT2, complex(d[2], d[3]) / SQRT2


def model_derivative(model: LinearModel, name: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic (dA, dD, db) with respect to one physical parameter."""
    p = model.params
    dA = np.zeros((4, 4))
    dD = np.zeros((4, 4))
    db = np.zeros(4)
    if name == "g_mc":
        dA[0, 3], dA[1, 2], dA[2, 1], dA[3, 0] = 1.0, -1.0, 1.0, -1.0
    elif name == "gamma_c":
        dA[0, 0] = dA[1, 1] = -1.0
        dD[0, 0] = dD[1, 1] = 2 * model.nbar + 1
        if model.drive_couples_gamma:
            # d epsilon_L / d gamma_c = epsilon_L / (2 gamma_c)
            db[0] = SQRT2 * model.epsilon_l / (2 * p.gamma_c)
    elif name == "gamma_m":
        dA[2, 2] = dA[3, 3] = -1.0
        dD[2, 2] = dD[3, 3] = 2 * model.nbar_m + 1
    elif name == "delta_c":
        dA[0, 1], dA[1, 0] = 1.0, -1.0
    elif name == "delta_m":
        dA[2, 3], dA[3, 2] = 1.0, -1.0
    elif name == "lambda_opa":
        c, s = 2 * math.cos(p.theta), 2 * math.sin(p.theta)
        dA[0, 0], dA[0, 1], dA[1, 0], dA[1, 1] = c, s, s, -c
    elif name == "theta":
        c, s = 2 * p.lambda_opa * math.cos(p.theta), 2 * p.lambda_opa * math.sin(p.theta)
        dA[0, 0], dA[0, 1], dA[1, 0], dA[1, 1] = -s, c, c, s
    elif name == "power":
        if p.power <= 0:
            raise ConfigError("derivative with respect to power is singular at P = 0")
        db[0] = SQRT2 * model.epsilon_l / (2 * p.power)
    elif name == "temperature":
        dn = thermal_occupation_dT(p.omega_c, p.temperature)
        dn_m = dn if p.omega_m is None else thermal_occupation_dT(p.omega_m, p.temperature)
        dD[0, 0] = dD[1, 1] = 2 * p.gamma_c * dn
        dD[2, 2] = dD[3, 3] = 2 * p.gamma_m * dn_m
    else:
        raise ConfigError(f"no analytic derivative for parameter {name!r}; choose from {DIFFERENTIABLE}")
    return dA, dD, db
