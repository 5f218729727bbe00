"""Gaussian multiparameter quantum estimation for a driven cavity-magnon system
with a degenerate optical parametric amplifier."""

__version__ = "0.1.0"

from .model import PhysicalParams, LinearModel, build_model, steady_means, thermal_occupation, drive_rate
from .stability import char_poly, routh_hurwitz
from .gaussian import GaussianState, symplectic_form, vec
from .dynamics import (
    SensitivityBundle,
    Trajectory,
    lyapunov_steady,
    steady_state,
    integrate,
    steady_sensitivities,
    fd_sensitivities,
)
from .metrology import sld_qfim, rld_qfim, bounds, BoundsReport, QfimPair
from .measurements import heterodyne_cfi, homodyne_cfi
from .pipeline import Conventions, estimate, bmi_at

__all__ = [
    "PhysicalParams", "LinearModel", "build_model", "steady_means", "thermal_occupation", "drive_rate",
    "char_poly", "routh_hurwitz",
    "GaussianState", "symplectic_form", "vec",
    "SensitivityBundle", "Trajectory", "lyapunov_steady", "steady_state", "integrate",
    "steady_sensitivities", "fd_sensitivities",
    "sld_qfim", "rld_qfim", "bounds", "BoundsReport", "QfimPair",
    "heterodyne_cfi", "homodyne_cfi",
    "Conventions", "estimate", "bmi_at",
]
