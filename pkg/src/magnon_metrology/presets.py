"""Named sweeps reproducing each figure panel of the steady-state and dynamical scans.

The operating point is ``PhysicalParams.baseline()``; each preset applies the
panel's stated overrides. Axis ranges and family values that are only shown
graphically are marked ``inferred`` in the preset metadata and are editable via
``SweepSpec.with_``.
"""
import math

from .errors import ConfigError
from .model import PhysicalParams
from .sweep import Grid, SweepSpec

MHZ = 2 * math.pi * 1e6
BMI_ONLY = ("BMI", "B_S", "B_R", "ratio")
FIG6_QUANTITIES = ("H_g", "H_gamma", "F_het_g", "F_het_gamma")
FIG7_QUANTITIES = ("H_g", "H_gamma", "F_het_g", "F_het_gamma",
                   "F_homX_g", "F_homY_g", "F_homX_gamma", "F_homY_gamma")


def _base(**kw) -> PhysicalParams:
    return PhysicalParams.baseline(**kw)


def figure_presets(n: int = 400, n_time: int = 1000) -> dict:
    """{name: SweepSpec}; ``n`` points per steady curve, ``n_time`` per time curve."""
    g_family = (31.0, 41.0, 51.0)
    presets = [
        SweepSpec(
            "fig2", _base(), "temperature", Grid(0.01, 0.4, n),
            family="lambda_over_gamma_c", family_values=(0.0, 0.25, 0.5, 0.65), quantities=BMI_ONLY,
            meta={"inferred": ["temperature range", "lambda family values"]}),
        SweepSpec(
            "fig3a", _base(), "lambda_over_gamma_c", Grid(0.0, 1.2, n),
            family="g_mc_MHz", family_values=g_family, quantities=BMI_ONLY,
            meta={"inferred": ["lambda range", "g_mc family values"]}),
        SweepSpec(
            "fig3b", _base(lambda_opa=0.75 * 5 * MHZ), "theta_over_pi", Grid(0.0, 4.0, 801),
            family="g_mc_MHz", family_values=g_family, quantities=BMI_ONLY,
            meta={"inferred": ["g_mc family values"], "note": "grid step 0.005 pi so theta + 2 pi lands on a grid point"}),
        SweepSpec(
            "fig4a", _base(lambda_opa=0.67 * 5 * MHZ), "delta_c_over_gamma_m", Grid(0.0, 2.0, n),
            family="g_mc_MHz", family_values=g_family, quantities=BMI_ONLY,
            meta={"inferred": ["detuning range", "g_mc family values"]}),
        SweepSpec(
            "fig4b", _base(lambda_opa=0.67 * 5 * MHZ), "delta_m_over_gamma_m", Grid(0.0, 1.0, n),
            family="power", family_values=(0.3, 0.5, 0.8), quantities=BMI_ONLY,
            meta={"inferred": ["detuning range", "power family values"]}),
        SweepSpec(
            "fig5a", _base(), "t_us", Grid(0.0, 0.05, n), family="gamma_c_MHz", family_values=(5.0, 15.0, 25.0),
            quantities=BMI_ONLY, regime="dynamics", lambda_ratio=0.65,
            meta={"inferred": ["gamma_c family values"], "note": "lambda follows 0.65 gamma_c on every curve"}),
        SweepSpec(
            "fig5b", _base(), "t_us", Grid(0.0, 0.05, n), family="gamma_m_over_g_mc",
            family_values=(0.5, 1.0, 1.5), quantities=BMI_ONLY, regime="dynamics",
            meta={"inferred": ["gamma_m / g_mc family values"]}),
        SweepSpec(
            "fig6", _base(), "t_us", Grid(0.0, 0.05, n_time), quantities=FIG6_QUANTITIES, regime="dynamics",
            subsystem="full", meta={"inferred": ["time range"]}),
        SweepSpec(
            "fig7", _base(), "t_us", Grid(0.0, 0.05, n_time), quantities=FIG7_QUANTITIES, regime="dynamics",
            subsystem="cavity", meta={"inferred": ["time range"], "note": "QFI and heterodyne CFI of the cavity mode"}),
    ]
    return {p.name: p for p in presets}


def preset(name: str, **kw) -> SweepSpec:
    presets = figure_presets(**kw)
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(presets)}")
    return presets[name]
