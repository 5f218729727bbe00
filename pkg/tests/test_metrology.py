import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import random_stable_params
from magnon_metrology.dynamics import SensitivityBundle, steady_sensitivities, steady_state
from magnon_metrology.errors import NonPhysicalState, SingularGamma, SingularQfim
from magnon_metrology.fock import phase_space_moments, squeeze_symplectic
from magnon_metrology.gaussian import GaussianState, symplectic_form, unvec, vec
from magnon_metrology.metrology import bounds, qfim_pair, rld_qfim, sld_qfim, trace_abs
from magnon_metrology.model import PhysicalParams, build_model
from magnon_metrology.pipeline import bmi_at

nbars = st.floats(0.05, 3.0)


def single(C, dC=None, dd=None, name="x"):
    C = np.asarray(C, float)
    dC = np.zeros_like(C) if dC is None else np.asarray(dC, float)
    dd = np.zeros(len(C)) if dd is None else np.asarray(dd, float)
    return GaussianState(np.zeros(len(C)), C), SensitivityBundle((name,), [dC], [dd])


def test_vec_is_column_major():
    np.testing.assert_array_equal(vec(np.array([[1, 2], [3, 4]])), [1, 3, 2, 4])
    M = np.arange(9.0).reshape(3, 3)
    np.testing.assert_array_equal(unvec(vec(M), 3), M)


@given(nbar=nbars)
def test_thermal_sld(nbar):
    s, b = single((2 * nbar + 1) / 2 * np.eye(2), dC=np.eye(2))
    assert sld_qfim(s, b)[0, 0] == pytest.approx(1 / (nbar * (nbar + 1)), rel=1e-8)


def test_coherent_displacement_sld():
    s, b = single(np.eye(2) / 2, dd=[1, 0])
    assert sld_qfim(s, b)[0, 0] == pytest.approx(2.0, rel=1e-12)


@given(r=st.floats(0.0, 2.0))
def test_squeezed_vacuum_sld(r):
    C = np.diag([math.exp(2 * r), math.exp(-2 * r)]) / 2
    s, b = single(C, dC=np.diag([math.exp(2 * r), -math.exp(-2 * r)]))
    assert sld_qfim(s, b)[0, 0] == pytest.approx(2.0, rel=1e-10)


@given(nbar=nbars)
def test_thermal_displacement_rld(nbar):
    nu = 2 * nbar + 1
    s, b = single(nu / 2 * np.eye(2), dd=[1, 0])
    J = rld_qfim(s, b)
    assert J[0, 0].real == pytest.approx(2 * nu / (nu**2 - 1), rel=1e-6)


def test_vacuum_rld_is_singular():
    s, b = single(np.eye(2) / 2, dd=[1, 0])
    with pytest.raises(SingularGamma):
        rld_qfim(s, b)
    assert qfim_pair(s, b).J is None


def test_nonphysical_state_rejected():
    s, b = single(np.eye(2) / 4, dd=[1, 0])
    with pytest.raises(NonPhysicalState):
        sld_qfim(s, b)


@given(nbar=nbars, r=st.floats(0.0, 1.0))
def test_single_parameter_rld_dominates_sld(nbar, r):
    # J >= H for one parameter, i.e. the scalar RLD bound 1/J is never tighter than 1/H
    for family in ("nbar", "r", "alpha"):
        C, _ = phase_space_moments(nbar, r)
        S = squeeze_symplectic(r, 0.0)
        if family == "nbar":
            s, b = single(C, dC=S @ S.T)
        elif family == "r":
            s, b = single(C, dC=np.diag([math.exp(2 * r), -math.exp(-2 * r)]) * (2 * nbar + 1))
        else:
            s, b = single(C, dd=[math.sqrt(2), 0])
        H = sld_qfim(s, b)[0, 0]
        J = rld_qfim(s, b)[0, 0].real
        assert J >= H * (1 - 1e-9)


def test_bounds_diagonal_example():
    H, J = np.diag([4.0, 5.0]), np.diag([2.0, 2.0])
    rep = bounds(H, J, rule="min")
    assert (rep.b_s, rep.b_r, rep.bmi, rep.chosen) == pytest.approx((0.45, 1.0, 0.45, "SLD"))
    rep = bounds(H, J)  # default: the larger, i.e. tighter, of the two lower bounds
    assert rep.bmi == pytest.approx(1.0) and rep.chosen == "RLD"
    assert rep.ratio == pytest.approx(0.45)


def test_bounds_scalar_reduction():
    for h, j in [(2.0, 3.0), (5.0, 1.0)]:
        assert bounds([[h]], [[j]], rule="min").bmi == pytest.approx(min(1 / h, 1 / j))
        assert bounds([[h]], [[j]], rule="max").bmi == pytest.approx(max(1 / h, 1 / j))


def test_imaginary_part_enters_bound():
    J = np.array([[2.0, 0.5j], [-0.5j, 2.0]])
    Ji = np.linalg.inv(J)
    rep = bounds(np.eye(2), J)
    assert rep.b_r == pytest.approx(np.trace(Ji.real) + trace_abs(Ji.imag))
    assert trace_abs(Ji.imag) > 0
    assert trace_abs(np.linalg.inv(np.diag([2.0, 3.0])).imag) == 0.0


def test_bounds_without_rld_and_singular():
    rep = bounds(np.diag([4.0, 5.0]), None)
    assert rep.b_r == math.inf and rep.bmi == rep.b_s and rep.chosen == "SLD"
    with pytest.raises(SingularQfim):
        bounds(np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        bounds(np.eye(2), rule="mean")


def test_equal_bounds_tag():
    assert bounds(np.eye(2), np.eye(2)).chosen == "EQUAL"


@given(seed=st.integers(0, 2**32 - 1))
def test_qfims_psd_and_hermitian(seed):
    m = build_model(random_stable_params(np.random.default_rng(seed)))
    s = steady_state(m)
    pair = qfim_pair(s, steady_sensitivities(m))
    lam = np.linalg.eigvalsh(pair.H)
    assert lam.min() >= -1e-9 * max(lam.max(), 1e-300)
    if pair.J is not None:
        np.testing.assert_allclose(pair.J, pair.J.conj().T, atol=0)
        lr = np.linalg.eigvalsh(pair.J.real)
        assert lr.min() >= -1e-9 * max(lr.max(), 1e-300)


@given(nbar=nbars, r=st.floats(0, 1), phi=st.floats(0, 2 * math.pi), seed=st.integers(0, 2**32 - 1))
def test_symplectic_invariance(nbar, r, phi, seed):
    # a parameter-independent Gaussian unitary leaves H and J unchanged
    rng = np.random.default_rng(seed)
    C, d = phase_space_moments(nbar, 0.3, 0.0, 0.2)
    dC, dd = rng.normal(size=(2, 2)), rng.normal(size=2)
    dC = dC + dC.T
    S = squeeze_symplectic(r, phi)
    assert np.allclose(S @ symplectic_form(1) @ S.T, symplectic_form(1))
    a = GaussianState(d, C), SensitivityBundle(("x",), [dC], [dd])
    b = GaussianState(S @ d, S @ C @ S.T), SensitivityBundle(("x",), [S @ dC @ S.T], [S @ dd])
    assert sld_qfim(*b)[0, 0] == pytest.approx(sld_qfim(*a)[0, 0], rel=1e-8)
    assert rld_qfim(*b)[0, 0].real == pytest.approx(rld_qfim(*a)[0, 0].real, rel=1e-8)


def test_reparameterisation_covariance():
    m = build_model(PhysicalParams.baseline())
    s = steady_state(m)
    sens = steady_sensitivities(m)
    k = 10.0
    # epsilon -> k epsilon scales the derivative by 1/k
    scaled = SensitivityBundle(sens.params, [sens.dC[0] / k, sens.dC[1]], [sens.dd[0] / k, sens.dd[1]])
    H, Hk = sld_qfim(s, sens), sld_qfim(s, scaled)
    assert Hk[0, 0] == pytest.approx(H[0, 0] / k**2, rel=1e-10)
    assert np.linalg.inv(Hk)[0, 0] == pytest.approx(k**2 * np.linalg.inv(H)[0, 0], rel=1e-8)


def test_theta_periodicity_of_bmi():
    p = PhysicalParams.baseline()
    a = bmi_at(p).bmi
    b = bmi_at(p.replace(theta=p.theta + 2 * math.pi)).bmi
    assert b == pytest.approx(a, rel=1e-9)


def test_baseline_regression_values():
    # pinned after the first validated run
    rep = bmi_at(PhysicalParams.baseline())
    assert rep.b_s == pytest.approx(210.52578295, rel=1e-8)
    assert rep.b_r == pytest.approx(11.4692293729, rel=1e-8)
    assert rep.bmi == rep.b_s and rep.chosen == "SLD"
