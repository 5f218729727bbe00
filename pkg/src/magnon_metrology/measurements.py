"""Classical Fisher information of Gaussian (heterodyne / homodyne) measurements."""
from dataclasses import dataclass

import numpy as np

from .dynamics import DEFAULT_PARAMS, SensitivityBundle, integrate
from .gaussian import GaussianState
from .metrology import sld_qfim
from .model import PhysicalParams, build_model

CAVITY = (0, 1)
QUADRATURE_NAMES = {1: "X_c", 2: "Y_c", 3: "X_m", 4: "Y_m"}
# Heterodyne adds half a vacuum unit per quadrature in the C(vacuum) = I/2 convention.
HETERODYNE_NOISE = 0.5
UNIT_HETERODYNE_NOISE = 1.0


@dataclass(frozen=True)
class CfiReport:
    parameter: str
    scheme: str
    value: float
    quadrature: int | None = None


def _param_index(sens: SensitivityBundle, param) -> int:
    return sens.index(param) if isinstance(param, str) else int(param)


def heterodyne_cfi(state: GaussianState, sens: SensitivityBundle, param, noise: float = HETERODYNE_NOISE,
                   quadratures=None) -> float:
    """F = 1/2 Tr(s^-1 dC s^-1 dC) + dd^T s^-1 dd with outcome covariance s = C + noise * I.

    ``quadratures`` restricts the measurement to a subsystem, e.g. ``CAVITY``.
    """
    k = _param_index(sens, param)
    C, dC, dd = state.C, sens.dC[k], sens.dd[k]
    if quadratures is not None:
        idx = list(quadratures)
        C, dC, dd = C[np.ix_(idx, idx)], dC[np.ix_(idx, idx)], dd[idx]
    sigma = C + noise * np.eye(len(C))
    X = np.linalg.solve(sigma, dC)
    return float(0.5 * np.trace(X @ X) + dd @ np.linalg.solve(sigma, dd))


def homodyne_cfi(state: GaussianState, sens: SensitivityBundle, param, quadrature: int) -> float:
    """Single-quadrature homodyne CFI; ``quadrature`` is 1-based (1 = X_c, 2 = Y_c, 3 = X_m, 4 = Y_m)."""
    k = _param_index(sens, param)
    j = int(quadrature) - 1
    if not 0 <= j < len(state.d):
        raise ValueError(f"quadrature index must be in 1..{len(state.d)}")
    cjj = state.C[j, j]
    if cjj <= 0:
        raise ValueError("homodyne CFI needs C_jj > 0")
    ddj = sens.dd[k][j]
    dcjj = sens.dC[k][j, j]
    return float((2 * cjj * ddj**2 + dcjj**2) / (2 * cjj**2))


def cavity_homodyne_cfis(state: GaussianState, sens: SensitivityBundle) -> dict:
    """Homodyne CFIs on X_c and Y_c for every parameter in the bundle."""
    out = {}
    for name in sens.params:
        for j in (1, 2):
            out[(QUADRATURE_NAMES[j], name)] = homodyne_cfi(state, sens, name, j)
    return out


PROFILE_COLUMNS = ("t_us", "H_g", "H_gamma", "F_het_g", "F_het_gamma",
                   "F_homX_g", "F_homY_g", "F_homX_gamma", "F_homY_gamma")


def cfi_vs_qfi_profile(params: PhysicalParams, t_grid, *, subsystem: str = "full",
                       noise: float = HETERODYNE_NOISE, drive_couples_gamma: bool = True) -> dict:
    """Per-time single-parameter SLD QFI and heterodyne/homodyne CFIs for (g_mc, gamma_c).

    ``subsystem="cavity"`` evaluates the SLD QFI and heterodyne CFI on the reduced
    cavity state; ``"full"`` uses the bipartite state. Returns ordered columns.
    """
    if subsystem not in ("full", "cavity"):
        raise ValueError("subsystem must be 'full' or 'cavity'")
    model = build_model(params, drive_couples_gamma=drive_couples_gamma)
    traj = integrate(model, t_grid, with_sensitivities=True, params_list=DEFAULT_PARAMS)
    cols = {name: np.zeros(len(traj)) for name in PROFILE_COLUMNS}
    cols["t_us"] = traj.times * 1e6
    quads = CAVITY if subsystem == "cavity" else None
    for i in range(len(traj)):
        st, se = traj.state(i), traj.sensitivity(i)
        if quads is not None:
            H = sld_qfim(st.reduced(quads), se.reduced(quads))
        else:
            H = sld_qfim(st, se)
        for k, tag in enumerate(("g", "gamma")):
            cols[f"H_{tag}"][i] = H[k, k]
            cols[f"F_het_{tag}"][i] = heterodyne_cfi(st, se, k, noise, quads)
            cols[f"F_homX_{tag}"][i] = homodyne_cfi(st, se, k, 1)
            cols[f"F_homY_{tag}"][i] = homodyne_cfi(st, se, k, 2)
    return cols
