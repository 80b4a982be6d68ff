import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from heatfcs import (
    Channel,
    DegenerateGeneratorError,
    InitialState,
    NearDefectiveWarning,
    RateTable,
    aggregate_nu,
    characteristic_function,
    dss,
    eigenvalues,
    propagate_populations,
    spectral_decompose,
    tilted_generator,
)
from heatfcs.rates import upsilon
from heatfcs.tilted import expm2, generator_matrix

from conftest import random_system

seeds = st.integers(0, 2**31)


def _ode_cf(table, init, nu, t):
    M = generator_matrix(table, nu)
    res = solve_ivp(lambda s, y: M @ y, (0, t), init.vector.astype(complex), method="RK45", rtol=1e-10, atol=1e-13)
    return res.y[:, -1].sum()


def _defective_table():
    # at nu = pi the generator is a Jordan block: upper triangular with equal diagonal
    r = 0.01
    chans = (Channel(0, 1, 0, -0.2, 1.0, r), Channel(0, 0, 1, 1.0, 1.0, r / 2))
    return RateTable(chans, -0.1, 0.1, 1.0)


def test_generator_at_zero(transverse):
    _, table, _ = transverse
    M = tilted_generator(table, 0.0)
    assert np.max(np.abs(M.column_sums())) <= 1e-14
    assert M.matrix[0, 1].real >= 0 and M.matrix[1, 0].real >= 0
    assert M.matrix[0, 1].imag == 0 and M.matrix[1, 0].imag == 0


def test_generator_entries(transverse):
    _, table, _ = transverse
    for nu in (0.37, -5.0, 22.0):
        A = aggregate_nu(table, nu)
        M = np.asarray(tilted_generator(table, nu))
        assert M[0, 0] == pytest.approx(A[0, 0] - table.A11 - table.A21, abs=1e-15)
        assert M[1, 1] == pytest.approx(A[1, 1] - table.A22 - table.A12, abs=1e-15)
        assert M[0, 1] == pytest.approx(A[0, 1], abs=1e-15)
        assert M[1, 0] == pytest.approx(A[1, 0], abs=1e-15)


def test_zero_coupling_generator():
    table = RateTable((), -0.1, 0.1, 1.0)
    assert np.all(np.asarray(tilted_generator(table, 1.3)) == 0)


def test_sigma_z_generator(longitudinal):
    sol, table, _ = longitudinal
    Gp, Gm = table.A21, table.A12
    for nu in (0.5, 3.3):
        ph = np.exp(1j * sol.OmegaR * nu)
        expected = np.array([[-Gp, Gm * ph], [Gp / ph, -Gm]])
        assert np.allclose(np.asarray(tilted_generator(table, nu)), expected, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_eigenvalues_match_quadratic_oracle(seed):
    rng = np.random.default_rng(seed)
    sol, table = random_system(rng)
    nu = rng.uniform(-3, 3, size=8) * sol.tau
    xm, xp = eigenvalues(table, nu)
    for i, n in enumerate(nu):
        M = generator_matrix(table, n)
        tr, det = np.trace(M), np.linalg.det(M)
        disc = np.sqrt(tr**2 - 4 * det + 0j)
        roots = np.array([(tr + disc) / 2, (tr - disc) / 2])
        scale = table.relaxation_rate + abs(table.A11)
        got = np.array([xp[i], xm[i]])
        err = min(np.max(np.abs(got - roots)), np.max(np.abs(got - roots[::-1])))
        assert err <= 1e-12 * scale


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_spectral_decomposition_matches_closed_form_projections(seed):
    rng = np.random.default_rng(seed)
    sol, table = random_system(rng)
    init = InitialState(rng.uniform())
    for nu in rng.uniform(-0.5, 0.5, 4) * sol.tau:
        sd = spectral_decompose(table, nu, init)
        assert np.allclose(sd.reconstruct(), init.vector, atol=1e-12)
        assert sd.c_minus + sd.c_plus == pytest.approx(1.0, abs=1e-12)
        A, Y, h, z = aggregate_nu(table, nu), upsilon(table, nu), sd.h, init.z
        cm = ((h - A[0, 1] - A[1, 0]) + (Y[1, 0] - Y[0, 1]) * z) / (2 * h)
        cp = ((h + A[0, 1] + A[1, 0]) + (Y[0, 1] - Y[1, 0]) * z) / (2 * h)
        assert sd.c_minus == pytest.approx(cm, abs=1e-10)
        assert sd.c_plus == pytest.approx(cp, abs=1e-10)
        M = generator_matrix(table, nu)
        for xi, v in ((sd.xi_plus, sd.v_plus), (sd.xi_minus, sd.v_minus)):
            assert np.allclose(M @ v, xi * v, atol=1e-12 * table.relaxation_rate * np.abs(v).max())


def test_stationary_eigenpair(transverse):
    _, table, st_ = transverse
    sd = spectral_decompose(table, 0.0, InitialState(0.2))
    assert abs(sd.xi_plus) <= 1e-12 * table.relaxation_rate
    assert sd.xi_minus == pytest.approx(-table.relaxation_rate, rel=1e-12)
    assert np.allclose(sd.v_plus, st_.vector, atol=1e-14)
    assert sd.c_plus == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(sd.reconstruct(), [0.2, 0.8], atol=1e-14)
    assert sd.cf(np.array([0.0, 10.0, 1e3])) == pytest.approx(np.ones(3), abs=1e-14)


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_eigenvalue_periodicity_and_sign(seed):
    rng = np.random.default_rng(seed)
    sol, table = random_system(rng)
    nu = rng.uniform(-2, 2, size=20) * sol.tau
    for a, b in zip(eigenvalues(table, nu), eigenvalues(table, nu + sol.tau)):
        assert np.max(np.abs(a - b) / np.maximum(np.abs(a), table.relaxation_rate)) <= 1e-10
    xm, xp = eigenvalues(table, np.linspace(-2, 2, 801) * sol.tau)
    assert np.all(xm.real < 0)
    assert np.all(xp.real <= 1e-15 * table.relaxation_rate)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_cf_matches_ode_oracle(seed):
    rng = np.random.default_rng(seed)
    sol, table = random_system(rng)
    init = InitialState(rng.uniform())
    nu = rng.uniform(-2, 2) * sol.tau
    t = rng.uniform(0, 5) / table.relaxation_rate
    assert abs(characteristic_function(table, init, nu, t) - _ode_cf(table, init, nu, t)) <= 1e-8


def test_cf_reference_point_matches_ode_oracle(transverse):
    sol, table, st_ = transverse
    rng = np.random.default_rng(3)
    for _ in range(10):
        nu, t = rng.uniform(-1, 1) * sol.tau, rng.uniform(0, 100) * sol.tau
        for init in (st_, InitialState(1.0), InitialState(0.0)):
            assert abs(characteristic_function(table, init, nu, t) - _ode_cf(table, init, nu, t)) <= 1e-8


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_cf_structure(seed):
    rng = np.random.default_rng(seed)
    sol, table = random_system(rng)
    init = InitialState(rng.uniform())
    t = np.array([0, 1, 10, 700]) * sol.tau
    assert np.max(np.abs(characteristic_function(table, init, 0.0, t) - 1)) <= 1e-12
    nu = rng.uniform(-3, 3, 10) * sol.tau
    for tt in t:
        G = characteristic_function(table, init, nu, tt)
        assert np.all(np.abs(G) <= 1 + 1e-10)
        assert np.allclose(characteristic_function(table, init, -nu, tt), np.conj(G), atol=1e-12)
    assert characteristic_function(table, init, 0.0, 3.0) == pytest.approx(propagate_populations(table, init, 3.0).vector.sum())


def test_cf_broadcasts(transverse):
    sol, table, st_ = transverse
    G = characteristic_function(table, st_, np.linspace(0, 1, 5)[:, None], np.array([0.0, 10.0, 100.0]))
    assert G.shape == (5, 3)
    assert isinstance(characteristic_function(table, st_, 0.1, 1.0), complex)
    with pytest.raises(ValueError):
        characteristic_function(table, st_, 0.1, -1.0)


def test_near_defective_generator():
    table = _defective_table()
    init = InitialState(0.4)
    with pytest.warns(NearDefectiveWarning):
        spectral_decompose(table, np.pi, init)
    M = generator_matrix(table, np.pi)
    for t in (0.0, 1.0, 50.0):
        expected = expm(M * t) @ init.vector
        assert characteristic_function(table, init, np.pi, t) == pytest.approx(expected.sum(), abs=1e-12)


def test_degenerate_generator():
    table = RateTable((Channel(0, 0, 1, 1.0, 1.0, 0.1),), -0.1, 0.1, 1.0)
    with pytest.raises(DegenerateGeneratorError):
        spectral_decompose(table, 0.3, InitialState(0.5))
    with pytest.raises(DegenerateGeneratorError):
        dss(table)


@settings(max_examples=100, deadline=None)
@given(seed=seeds, t=st.floats(0, 50))
def test_expm2_matches_scipy(seed, t):
    rng = np.random.default_rng(seed)
    M = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) * 0.3
    assert np.allclose(expm2(M, t), expm(M * t), rtol=1e-11, atol=1e-12 * np.abs(expm(M * t)).max())
    J = np.array([[-0.2, 0.0], [0.7, -0.2]])
    assert np.allclose(expm2(J, t), expm(J * t), atol=1e-14)


def test_dss_and_propagation(transverse):
    _, table, st_ = transverse
    assert st_.p1 == pytest.approx(table.A12 / table.relaxation_rate)
    assert st_.z == pytest.approx((table.A21 - table.A12) / table.relaxation_rate)
    init = InitialState(1.0)
    assert propagate_populations(table, init, 0.0) == init
    for t in (1.0, 30.0, 300.0):
        z = propagate_populations(table, init, t).z
        assert z - st_.z == pytest.approx((init.z - st_.z) * np.exp(-table.relaxation_rate * t), abs=1e-15)
    far = propagate_populations(table, init, 5000.0)
    assert abs(far.p1 - st_.p1) <= np.exp(-table.relaxation_rate * 5000.0) + 1e-15


def test_symmetric_rates_dss():
    chans = (Channel(0, 1, 0, -0.2, 1.0, 0.3), Channel(1, 0, 0, 0.2, 1.0, 0.3))
    assert dss(RateTable(chans, -0.1, 0.1, 1.0)).p1 == pytest.approx(0.5)
