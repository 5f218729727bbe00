import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_stable_params
from magnon_metrology.dynamics import SensitivityBundle, steady_sensitivities, steady_state
from magnon_metrology.gaussian import GaussianState
from magnon_metrology.measurements import (
    CAVITY, UNIT_HETERODYNE_NOISE, PROFILE_COLUMNS, cavity_homodyne_cfis, cfi_vs_qfi_profile,
    heterodyne_cfi, homodyne_cfi,
)
from magnon_metrology.metrology import sld_qfim
from magnon_metrology.model import PhysicalParams, build_model


def coherent(dd=(1.0, 0.0), dC=None):
    C = np.eye(2) / 2
    return GaussianState(np.zeros(2), C), SensitivityBundle(("x",), [np.zeros((2, 2)) if dC is None else dC],
                                                             [np.asarray(dd, float)])


def test_heterodyne_coherent_displacement():
    s, b = coherent()
    assert heterodyne_cfi(s, b, 0) == pytest.approx(1.0)
    assert heterodyne_cfi(s, b, "x", UNIT_HETERODYNE_NOISE) == pytest.approx(2 / 3)
    s, b = coherent(dd=(0, 0))
    assert heterodyne_cfi(s, b, 0) == 0.0


def test_homodyne_examples():
    s, b = coherent()
    assert homodyne_cfi(s, b, 0, 1) == pytest.approx(2.0)
    assert homodyne_cfi(s, b, 0, 2) == 0.0
    for nbar in (0.1, 0.5, 2.0):
        nu = 2 * nbar + 1
        st_ = GaussianState(np.zeros(2), nu / 2 * np.eye(2))
        b = SensitivityBundle(("n",), [np.eye(2)], [np.zeros(2)])
        F = homodyne_cfi(st_, b, 0, 1)
        assert F == pytest.approx(2 / nu**2)
        assert F < sld_qfim(st_, b)[0, 0]
    with pytest.raises(ValueError):
        homodyne_cfi(s, b, 0, 5)


def _steady(seed):
    m = build_model(random_stable_params(np.random.default_rng(seed)))
    return steady_state(m), steady_sensitivities(m)


@given(seed=st.integers(0, 2**32 - 1))
def test_cfis_bounded_by_sld(seed):
    s, sens = _steady(seed)
    H = sld_qfim(s, sens)
    Hc = sld_qfim(s.reduced(CAVITY), sens.reduced(CAVITY))
    for k in range(2):
        tol = 1e-8 + 1e-9 * H[k, k]
        for j in (1, 2, 3, 4):
            assert homodyne_cfi(s, sens, k, j) <= H[k, k] + tol
        assert heterodyne_cfi(s, sens, k) <= H[k, k] + tol
        assert heterodyne_cfi(s, sens, k, quadratures=CAVITY) <= Hc[k, k] + tol
        assert Hc[k, k] <= H[k, k] + tol


def test_literal_heterodyne_noise_is_lossier():
    s, sens = _steady(3)
    for k in range(2):
        assert heterodyne_cfi(s, sens, k, UNIT_HETERODYNE_NOISE) < heterodyne_cfi(s, sens, k)


def test_cavity_homodyne_keys():
    s, sens = _steady(5)
    out = cavity_homodyne_cfis(s, sens)
    assert set(out) == {(q, p) for q in ("X_c", "Y_c") for p in ("g_mc", "gamma_c")}


def test_profile_starts_at_zero_and_respects_ordering():
    t = np.linspace(0, 5e-8, 60)
    for sub in ("full", "cavity"):
        cols = cfi_vs_qfi_profile(PhysicalParams.baseline(), t, subsystem=sub)
        assert tuple(cols) == PROFILE_COLUMNS
        for name in PROFILE_COLUMNS[1:]:
            assert cols[name][0] == 0.0
        for tag in ("g", "gamma"):
            H = cols[f"H_{tag}"]
            for f in ("F_het", "F_homX", "F_homY"):
                assert np.all(cols[f"{f}_{tag}"] <= H + 1e-8)
    with pytest.raises(ValueError):
        cfi_vs_qfi_profile(PhysicalParams.baseline(), t, subsystem="magnon")


def test_profile_gamma_plateau_positive():
    cols = cfi_vs_qfi_profile(PhysicalParams.baseline(), np.linspace(0, 1e-7, 40))
    assert cols["H_gamma"][-1] > 0
    assert cols["H_gamma"][-1] == pytest.approx(cols["H_gamma"][-2], rel=1e-3)
