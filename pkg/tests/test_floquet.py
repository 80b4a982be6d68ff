import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatfcs import (
    FloquetSolution,
    InitialState,
    QuasienergyCrossingError,
    RabiParameters,
    bare_to_floquet_populations,
    monodromy_floquet,
    rabi_floquet,
    rabi_hamiltonian,
)

angles = st.floats(0, 2 * np.pi, allow_nan=False)


def _fold(x, Om):
    return (x + Om / 2) % Om - Om / 2


def test_resonant_mixing_angle():
    sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.07, 0.0))
    assert sol.theta == pytest.approx(np.pi / 4)
    assert sol.OmegaR == pytest.approx(0.14, abs=1e-15)


def test_reference_rabi_frequency():
    sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.02))
    assert sol.OmegaR == pytest.approx(np.sqrt(0.02**2 + 0.04), rel=1e-15)
    assert round(sol.OmegaR, 4) == 0.2010
    assert sol.eps2 - sol.eps1 == pytest.approx(sol.OmegaR)


def test_undriven_modes_are_bare_states():
    sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.0, 0.05))
    assert sol.theta == 0
    assert sol.OmegaR == pytest.approx(0.05)
    assert np.allclose(np.abs(sol.mode_samples[0]), [1, 0])
    assert np.allclose(np.abs(sol.mode_samples[1]), [0, 1])


@settings(max_examples=40, deadline=None)
@given(
    g=st.floats(0.0, 0.4),
    detuning=st.floats(-0.5, 0.5),
    phi=angles,
)
def test_modes_orthonormal_and_periodic(g, detuning, phi):
    sol = rabi_floquet(RabiParameters.from_detuning(1.0, g, detuning, phi), grid_points=128)
    m = sol.mode_samples
    gram = np.einsum("atx,btx->tab", m.conj(), m)
    assert np.max(np.abs(gram - np.eye(2))) < 1e-12
    assert np.max(np.abs(m[:, 0] - m[:, -1])) < 1e-10
    assert sol.OmegaR >= 0


@settings(max_examples=40, deadline=None)
@given(g=st.floats(0.0, 0.4), detuning=st.floats(-0.5, 0.5), phi=angles)
def test_modes_solve_floquet_equation(g, detuning, phi):
    # (H(t) - eps) phi(t) = i d/dt phi(t), checked spectrally on the grid
    p = RabiParameters.from_detuning(1.0, g, detuning, phi)
    sol = rabi_floquet(p, grid_points=64)
    H = rabi_hamiltonian(p)
    M = sol.grid_points
    k = np.fft.fftfreq(M, d=1.0 / M)
    for a, eps in enumerate(sol.quasienergies):
        f = sol.mode_samples[a, :M]
        deriv = np.fft.ifft(1j * k[:, None] * p.Omega * np.fft.fft(f, axis=0), axis=0)
        lhs = np.array([H(t) @ v for t, v in zip(sol.times[:M], f)]) - eps * f
        assert np.max(np.abs(lhs - 1j * deriv)) < 1e-10


@pytest.mark.parametrize("g,detuning,phi", [(0.1, 0.02, 0.0), (0.05, -0.2, 1.3), (0.2, 0.0, 2.5)])
def test_monodromy_matches_closed_form(g, detuning, phi):
    p = RabiParameters.from_detuning(1.0, g, detuning, phi)
    ana = rabi_floquet(p)
    num = monodromy_floquet(rabi_hamiltonian(p), p.Omega)
    e_ana = np.sort(_fold(ana.quasienergies, p.Omega))
    assert np.allclose(num.quasienergies, e_ana, atol=1e-9)
    for a in range(2):
        b = int(np.argmin(np.abs(_fold(ana.quasienergies - num.quasienergies[a], p.Omega))))
        overlap = np.abs(np.einsum("tx,tx->t", ana.mode_samples[b].conj(), num.mode_samples[a]))
        assert np.min(overlap) >= 1 - 1e-9


def test_monodromy_grid_refinement():
    p = RabiParameters.from_detuning(1.0, 0.1, 0.02)
    a = monodromy_floquet(rabi_hamiltonian(p), p.Omega, grid_points=256)
    b = monodromy_floquet(rabi_hamiltonian(p), p.Omega, grid_points=512)
    assert np.max(np.abs(a.quasienergies - b.quasienergies)) < 1e-10


def test_monodromy_static_hamiltonian():
    Om = 0.7
    H = lambda t: np.diag([-0.5, 0.5]).astype(complex)
    sol = monodromy_floquet(H, Om)
    expected = np.sort(_fold(np.array([-0.5, 0.5]), Om))
    assert np.allclose(sol.quasienergies, expected, atol=1e-10)


def test_monodromy_gauge():
    p = RabiParameters.from_detuning(1.0, 0.1, 0.02, 0.4)
    sol = monodromy_floquet(rabi_hamiltonian(p), p.Omega)
    for a in range(2):
        v = sol.mode_samples[a, 0]
        big = v[np.argmax(np.abs(v))]
        assert abs(big.imag) < 1e-14 and big.real > 0


def test_monodromy_crossing_detected():
    H = lambda t: np.diag([0.0, 1.0]).astype(complex)
    with pytest.raises(QuasienergyCrossingError):
        monodromy_floquet(H, 1.0)


def test_monodromy_rejects_coarse_grid():
    with pytest.raises(ValueError):
        monodromy_floquet(lambda t: np.eye(2, dtype=complex), 1.0, grid_points=32)


def test_parameter_validation():
    with pytest.raises(ValueError):
        RabiParameters(1.0, -0.1, 1.0)
    with pytest.raises(ValueError):
        RabiParameters(1.0, 0.1, 0.0)
    with pytest.raises(ValueError):
        RabiParameters(0.0, 0.1, 1.0)
    with pytest.raises(ValueError):
        InitialState(0.7, 0.7)
    with pytest.raises(ValueError):
        InitialState(-0.1)


def test_populations_resonant_examples():
    sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.0))
    for phi in np.linspace(0, 2 * np.pi, 7):
        p = bare_to_floquet_populations(np.pi / 4, 0.0, sol, phi)
        assert p.p1 == pytest.approx(0.5 * (1 - np.cos(phi)), abs=1e-15)
    assert bare_to_floquet_populations(np.pi / 4, 0.0, sol, np.pi).p1 == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(g=st.floats(0.0, 0.4), detuning=st.floats(-0.5, 0.5), phi=angles, delta=angles, gamma=angles)
def test_populations_match_projection(g, detuning, phi, delta, gamma):
    p = RabiParameters.from_detuning(1.0, g, detuning, phi)
    sol = rabi_floquet(p, grid_points=64)
    pop = bare_to_floquet_populations(delta, gamma, sol, phi)
    psi = np.array([np.cos(delta), -np.exp(1j * gamma) * np.sin(delta)])
    direct = abs(np.vdot(sol.mode_samples[0, 0], psi)) ** 2
    assert pop.p1 == pytest.approx(direct, abs=1e-12)
    assert pop.p1 >= 0 and pop.p2 >= 0 and pop.p1 + pop.p2 == pytest.approx(1.0)


def test_ground_state_populations():
    sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.1))
    assert bare_to_floquet_populations(0.0, 0.3, sol, 0.2).p1 == pytest.approx(0.5 * (1 + np.cos(2 * sol.theta)))


def test_solution_arrays_are_read_only():
    sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.0))
    assert isinstance(sol, FloquetSolution)
    with pytest.raises(ValueError):
        sol.mode_samples[0, 0, 0] = 1
