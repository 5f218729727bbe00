"""Steady-state and time-dependent Gaussian moments, plus parameter sensitivities.

Two independent routes to dC/de and dd/de are provided: the analytic one
(Sylvester solves in steady state, forward-sensitivity ODEs in time) and central
finite differences, which serve as the oracle for the first.
"""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from .errors import ConfigError, IllConditioned, NonPhysicalState, StepFailure, UnstablePerturbation
from .gaussian import GaussianState
from .model import DIFFERENTIABLE, LinearModel, build_model, model_derivative, steady_means
from .stability import require_hurwitz, routh_hurwitz

DEFAULT_PARAMS = ("g_mc", "gamma_c")
LYAP_COND_LIMIT = 1e12


@dataclass(frozen=True)
class SensitivityBundle:
    params: tuple[str, ...]
    dC: tuple[np.ndarray, ...]
    dd: tuple[np.ndarray, ...]

    def __post_init__(self):
        if not (len(self.params) == len(self.dC) == len(self.dd)):
            raise ValueError("params, dC and dd must have equal length")
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "dC", tuple(0.5 * (np.asarray(m) + np.asarray(m).T) for m in self.dC))
        object.__setattr__(self, "dd", tuple(np.asarray(v, dtype=float) for v in self.dd))

    def __len__(self):
        return len(self.params)

    def index(self, name: str) -> int:
        return self.params.index(name)

    def reduced(self, indices) -> "SensitivityBundle":
        idx = list(indices)
        return SensitivityBundle(self.params, [m[np.ix_(idx, idx)] for m in self.dC], [v[idx] for v in self.dd])


def _lyapunov_operator(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    eye = np.eye(n)
    # vec(A X) = (I kron A) vec X,  vec(X A^T) = (A kron I) vec X
    return np.kron(eye, A) + np.kron(A, eye)


class _LyapunovSolver:
    """Factorized solver for A X + X A^T = -Q, reused across right-hand sides."""

    def __init__(self, A: np.ndarray, cond_limit: float = LYAP_COND_LIMIT):
        self.n = A.shape[0]
        L = _lyapunov_operator(A)
        cond = np.linalg.cond(L)
        if not np.isfinite(cond) or cond > cond_limit:
            raise IllConditioned(f"Lyapunov operator condition number {cond:.3e} exceeds {cond_limit:g}")
        self._lu = sla.lu_factor(L)

    def solve(self, Q: np.ndarray) -> np.ndarray:
        x = sla.lu_solve(self._lu, -np.asarray(Q, dtype=float).reshape(-1, order="F"))
        X = x.reshape((self.n, self.n), order="F")
        return 0.5 * (X + X.T)


def lyapunov_steady(A, D, *, check_stability: bool = True) -> np.ndarray:
    """Symmetric C solving A C + C A^T + D = 0 via the vectorized 16x16 system."""
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    if check_stability:
        require_hurwitz(A)
    return _LyapunovSolver(A).solve(D)


def lyapunov_residual(A, C, D) -> float:
    return float(np.linalg.norm(A @ C + C @ A.T + D))


def steady_state(model: LinearModel) -> GaussianState:
    require_hurwitz(model.drift)
    C = lyapunov_steady(model.drift, model.diffusion, check_stability=False)
    return GaussianState(steady_means(model), C)


def steady_sensitivities(model: LinearModel, params_list=DEFAULT_PARAMS,
                         state: GaussianState | None = None) -> SensitivityBundle:
    """Differentiate A C + C A^T + D = 0 and A d + b = 0 analytically."""
    A = model.drift
    require_hurwitz(A)
    solver = _LyapunovSolver(A)
    if state is None:
        state = GaussianState(steady_means(model), solver.solve(model.diffusion))
    C, d = state.C, state.d
    lu_A = sla.lu_factor(A)
    dCs, dds = [], []
    for name in params_list:
        dA, dD, db = model_derivative(model, name)
        dCs.append(solver.solve(dA @ C + C @ dA.T + dD))
        dds.append(-sla.lu_solve(lu_A, dA @ d + db))
    return SensitivityBundle(tuple(params_list), dCs, dds)


def _fd_step(model: LinearModel, name: str, rel_step: float) -> float:
    p = model.params
    value = getattr(p, name)
    if name in ("power", "temperature"):
        if value <= 0:
            raise ConfigError(f"central difference in {name} needs a positive value, got {value}")
        ref = abs(value)
    elif name == "theta":
        ref = max(abs(value), 1.0)
    else:
        ref = max(abs(value), p.gamma_c)
    return rel_step * ref


def fd_sensitivities(model: LinearModel, params_list=DEFAULT_PARAMS, rel_step: float = 1e-6) -> SensitivityBundle:
    """Central differences of the steady (d, C), used to validate the analytic route."""
    p = model.params
    dCs, dds = [], []
    for name in params_list:
        if name not in DIFFERENTIABLE:
            raise ConfigError(f"unknown parameter {name!r}")
        h = _fd_step(model, name, rel_step)
        freeze = name == "gamma_c" and not model.drive_couples_gamma
        states = []
        for sign in (+1, -1):
            pp = p.replace(**{name: getattr(p, name) + sign * h})
            m = build_model(pp, drive_couples_gamma=model.drive_couples_gamma,
                            epsilon_l=model.epsilon_l if freeze else None)
            if not routh_hurwitz(m.drift).stable:
                raise UnstablePerturbation(f"model unstable after perturbing {name} by {sign * h:+.3e}")
            states.append((steady_means(m), lyapunov_steady(m.drift, m.diffusion, check_stability=False)))
        (dp, Cp), (dm, Cm) = states
        dCs.append((Cp - Cm) / (2 * h))
        dds.append((dp - dm) / (2 * h))
    return SensitivityBundle(tuple(params_list), dCs, dds)


@dataclass(frozen=True)
class Trajectory:
    """Moments on a time grid. Arrays: d (n, 4), C (n, 4, 4); dd (n, p, 4), dC (n, p, 4, 4) if present."""
    times: np.ndarray
    d: np.ndarray
    C: np.ndarray
    params: tuple[str, ...] = ()
    dd: np.ndarray | None = None
    dC: np.ndarray | None = None

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> GaussianState:
        return GaussianState(self.d[i], self.C[i])

    @property
    def states(self) -> list[GaussianState]:
        return [self.state(i) for i in range(len(self))]

    def sensitivity(self, i: int) -> SensitivityBundle:
        if self.dd is None:
            raise ValueError("trajectory was integrated without sensitivities")
        return SensitivityBundle(self.params, list(self.dC[i]), list(self.dd[i]))

    @property
    def sensitivities(self) -> list[SensitivityBundle] | None:
        if self.dd is None:
            return None
        return [self.sensitivity(i) for i in range(len(self))]


def vacuum_initial(n_modes: int = 2) -> GaussianState:
    return GaussianState(np.zeros(2 * n_modes), 0.5 * np.eye(2 * n_modes))


def thermal_initial(model: LinearModel) -> GaussianState:
    return GaussianState(np.zeros(4), np.diag([(2 * model.nbar + 1) / 2] * 2 + [(2 * model.nbar_m + 1) / 2] * 2))


def integrate(model: LinearModel, t_grid, with_sensitivities: bool = False, params_list=DEFAULT_PARAMS,
              initial: GaussianState | None = None, rtol: float = 1e-9, atol: float = 1e-12,
              method: str = "DOP853", physical_tol: float = 1e-8) -> Trajectory:
    """Integrate d' = A d + b and C' = A C + C A^T + D from the vacuum (by default).

    With sensitivities, the forward-sensitivity equations for each parameter are
    co-integrated from zero. Time is rescaled by the spectral radius of A and each
    block by its natural magnitude, so rtol/atol act on O(1) quantities.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 1 or t[0] != 0 or np.any(np.diff(t) <= 0):
        raise ConfigError("t_grid must start at 0 and be strictly increasing")
    A, D, b = model.drift, model.diffusion, model.drive
    init = vacuum_initial() if initial is None else initial
    params_list = tuple(params_list) if with_sensitivities else ()
    ders = [model_derivative(model, name) for name in params_list]
    n_p = len(ders)

    rate = float(np.abs(np.linalg.eigvals(A)).max()) or 1.0
    d_scale = max(np.linalg.norm(b) / rate, np.linalg.norm(init.d), 1.0)
    c_scale = max(np.abs(D).max() / rate, np.abs(init.C).max(), 0.5)
    scales = [np.full(4, d_scale), np.full(16, c_scale)]
    for dA, dD, db in ders:
        s_dd = (np.abs(dA).max() * d_scale + np.abs(db).max()) / rate
        s_dc = (2 * np.abs(dA).max() * c_scale + np.abs(dD).max()) / rate
        scales += [np.full(4, s_dd or 1.0), np.full(16, s_dc or 1.0)]
    scale = np.concatenate(scales)

    def rhs(tau, y):
        x = y * scale
        d = x[:4]
        C = x[4:20].reshape(4, 4)
        out = np.empty_like(x)
        out[:4] = A @ d + b
        AC = A @ C
        out[4:20] = (AC + AC.T + D).ravel()
        for k, (dA, dD, db) in enumerate(ders):
            o = 20 + 20 * k
            dd = x[o:o + 4]
            dC = x[o + 4:o + 20].reshape(4, 4)
            out[o:o + 4] = dA @ d + A @ dd + db
            S = dA @ C + A @ dC
            out[o + 4:o + 20] = (S + S.T + dD).ravel()
        return out / (scale * rate)

    y0 = np.zeros(20 + 20 * n_p)
    y0[:4] = init.d
    y0[4:20] = init.C.ravel()
    y0 = y0 / scale
    tau = t * rate
    if len(t) == 1:
        Y = y0[:, None]
    else:
        sol = solve_ivp(rhs, (0.0, tau[-1]), y0, method=method, t_eval=tau, rtol=rtol, atol=atol)
        if sol.status != 0:
            raise StepFailure(f"integrator failed: {sol.message}")
        Y = sol.y
    X = (Y * scale[:, None]).T
    n = len(t)
    d = X[:, :4].copy()
    C = X[:, 4:20].reshape(n, 4, 4)
    C = 0.5 * (C + C.transpose(0, 2, 1))
    dd = dC = None
    if n_p:
        blocks = X[:, 20:].reshape(n, n_p, 20)
        dd = blocks[:, :, :4].copy()
        dC = blocks[:, :, 4:].reshape(n, n_p, 4, 4)
        dC = 0.5 * (dC + dC.transpose(0, 1, 3, 2))
    traj = Trajectory(t, d, C, params_list, dd, dC)
    for i in range(n):
        lo = traj.state(i).min_physical_eigenvalue()
        if lo < -physical_tol:
            raise NonPhysicalState(f"covariance lost physicality at t = {t[i]:.3e} s (min eig {lo:.3e})")
    return traj
