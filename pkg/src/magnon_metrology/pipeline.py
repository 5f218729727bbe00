"""End-to-end evaluation: parameters -> Gaussian state + sensitivities -> bounds and CFIs."""
from dataclasses import asdict, dataclass, field
import math

import numpy as np

from .dynamics import DEFAULT_PARAMS, SensitivityBundle, integrate, steady_sensitivities, steady_state
from .errors import NotHurwitz, SingularQfim
from .gaussian import GaussianState
from .measurements import CAVITY, HETERODYNE_NOISE, UNIT_HETERODYNE_NOISE, heterodyne_cfi, homodyne_cfi
from .metrology import BoundsReport, bounds, qfim_pair, sld_qfim
from .model import PhysicalParams, build_model
from .stability import routh_hurwitz

QUANTITIES = (
    "BMI", "B_S", "B_R", "ratio",
    "H_g", "H_gamma", "J_g", "J_gamma",
    "F_het_g", "F_het_gamma", "F_homX_g", "F_homY_g", "F_homX_gamma", "F_homY_gamma",
)
BOUND_QUANTITIES = ("BMI", "B_S", "B_R", "ratio")


@dataclass(frozen=True)
class Conventions:
    """Switches for the choices the model leaves open.

    het_noise: heterodyne added noise per quadrature (0.5 physical, 1.0 literal C + I).
    drive_couples_gamma: whether d epsilon_L / d gamma_c enters the gamma_c sensitivity.
    bmi_rule: "max" (tighter of B_S, B_R) or "min".
    subsystem: "full" or "cavity" for the single-parameter SLD QFIs and heterodyne CFIs.
    """
    het_noise: float = HETERODYNE_NOISE
    drive_couples_gamma: bool = True
    bmi_rule: str = "max"
    subsystem: str = "full"

    @classmethod
    def unit_noise_het(cls, **kw):
        return cls(het_noise=UNIT_HETERODYNE_NOISE, **kw)

    def as_dict(self):
        return asdict(self)


@dataclass
class EstimationReport:
    params: PhysicalParams
    state: GaussianState
    sens: SensitivityBundle
    H: np.ndarray
    J: np.ndarray | None
    bounds: BoundsReport | None
    cfis: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        J = None if self.J is None else {"real": self.J.real.tolist(), "imag": self.J.imag.tolist()}
        return {
            "params": self.params.as_dict(),
            "estimated": list(self.sens.params),
            "d": self.state.d.tolist(),
            "C": self.state.C.tolist(),
            "H": self.H.tolist(),
            "J": J,
            "bounds": None if self.bounds is None else self.bounds.as_dict(),
            "cfi": dict(self.cfis),
        }


def state_and_sensitivities(params: PhysicalParams, t: float | None = None, conv: Conventions = Conventions(),
                            params_list=DEFAULT_PARAMS):
    """Steady state (t is None) or the vacuum-started state at time t [s]."""
    model = build_model(params, drive_couples_gamma=conv.drive_couples_gamma)
    if t is None:
        state = steady_state(model)
        return state, steady_sensitivities(model, params_list, state=state)
    grid = [0.0] if t == 0 else [0.0, float(t)]
    traj = integrate(model, grid, with_sensitivities=True, params_list=params_list)
    return traj.state(-1), traj.sensitivity(-1)


def point_quantities(state: GaussianState, sens: SensitivityBundle, conv: Conventions,
                     quantities=QUANTITIES) -> tuple[dict, str, str]:
    """Evaluate the requested quantities at one (state, sensitivities) pair for (g_mc, gamma_c).

    Returns (values, chosen-bound tag, status); undefined values are NaN.
    """
    values = {}
    chosen, status = "", "ok"
    wanted = set(quantities)
    if wanted & {"BMI", "B_S", "B_R", "ratio", "J_g", "J_gamma"}:
        pair = qfim_pair(state, sens)
        if pair.J is not None:
            values["J_g"], values["J_gamma"] = float(pair.J[0, 0].real), float(pair.J[1, 1].real)
        else:
            values["J_g"] = values["J_gamma"] = math.nan
        if wanted & set(BOUND_QUANTITIES):
            try:
                rep = bounds(pair.H, pair.J, rule=conv.bmi_rule)
                values.update(BMI=rep.bmi, B_S=rep.b_s, B_R=rep.b_r, ratio=rep.ratio)
                chosen = rep.chosen
            except SingularQfim:
                status = "singular_qfim"
                values.update({q: math.nan for q in BOUND_QUANTITIES})
    quads = CAVITY if conv.subsystem == "cavity" else None
    if wanted & {"H_g", "H_gamma"}:
        if quads is None:
            H = sld_qfim(state, sens)
        else:
            H = sld_qfim(state.reduced(quads), sens.reduced(quads))
        values["H_g"], values["H_gamma"] = float(H[0, 0]), float(H[1, 1])
    for k, tag in enumerate(("g", "gamma")):
        if f"F_het_{tag}" in wanted:
            values[f"F_het_{tag}"] = heterodyne_cfi(state, sens, k, conv.het_noise, quads)
        if f"F_homX_{tag}" in wanted:
            values[f"F_homX_{tag}"] = homodyne_cfi(state, sens, k, 1)
        if f"F_homY_{tag}" in wanted:
            values[f"F_homY_{tag}"] = homodyne_cfi(state, sens, k, 2)
    return {q: values.get(q, math.nan) for q in quantities}, chosen, status


def estimate(params: PhysicalParams, t: float | None = None, conv: Conventions = Conventions()) -> EstimationReport:
    """Full report for estimating (g_mc, gamma_c) in steady state or at time t."""
    if t is None:
        verdict = routh_hurwitz(build_model(params).drift)
        if not verdict.stable:
            raise NotHurwitz(f"operating point is unstable (max Re eig = {verdict.max_real_eig:.4e} rad/s)")
    state, sens = state_and_sensitivities(params, t, conv)
    pair = qfim_pair(state, sens)
    try:
        rep = bounds(pair.H, pair.J, rule=conv.bmi_rule)
    except SingularQfim:
        rep = None
    values, _, _ = point_quantities(state, sens, conv, [q for q in QUANTITIES if q.startswith("F_")])
    return EstimationReport(params, state, sens, pair.H, pair.J, rep, values)


def bmi_at(params: PhysicalParams, regime="steady", conv: Conventions = Conventions()) -> BoundsReport:
    """Bounds for (g_mc, gamma_c); ``regime`` is "steady" or a time in seconds."""
    t = None if regime == "steady" else float(regime)
    state, sens = state_and_sensitivities(params, t, conv)
    pair = qfim_pair(state, sens)
    return bounds(pair.H, pair.J, rule=conv.bmi_rule)
