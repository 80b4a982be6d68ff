"""Floquet solutions of a periodically driven two-level system.

Conventions (hbar = 1):

* The bare basis is ``(|0>, |1>)`` with ``|0>`` the ground state and ``|1>``
  at energy ``omega`` above it.
* The detuning is stored as ``omega - Omega`` (bare gap minus drive frequency).
  Sources that quote ``Omega - omega`` differ only by a sign; every observable
  computed here depends on it through ``detuning**2`` or through the mixing
  angle together with the state labels.
* The two Floquet states are labelled so that ``eps2 - eps1 = +OmegaR``.
  Index 0 of every array is state 1 (the lower quasienergy).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import QuasienergyCrossingError

__all__ = [
    "RabiParameters",
    "FloquetSolution",
    "InitialState",
    "rabi_hamiltonian",
    "rabi_floquet",
    "monodromy_floquet",
    "bare_to_floquet_populations",
]


@dataclass(frozen=True)
class RabiParameters:
    """Monochromatically driven two-level system.

    Attributes:
        omega: bare gap.
        g: drive amplitude.
        Omega: drive angular frequency.
        phi: drive phase in radians.
    """

    omega: float
    g: float
    Omega: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.Omega > 0:
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        if not self.g >= 0:
            raise ValueError(f"g must be non-negative, got {self.g}")

    @classmethod
    def from_detuning(cls, omega: float, g: float, detuning: float, phi: float = 0.0):
        """Build parameters from ``detuning = omega - Omega``."""
        return cls(omega=omega, g=g, Omega=omega - detuning, phi=phi)

    @property
    def detuning(self) -> float:
        return self.omega - self.Omega

    @property
    def rabi_frequency(self) -> float:
        return float(np.hypot(self.detuning, 2.0 * self.g))

    @property
    def tau(self) -> float:
        return 2.0 * np.pi / self.Omega


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FloquetSolution:
    """Quasienergies and periodic modes sampled over one drive period.

    ``mode_samples[alpha, j]`` is the mode of state ``alpha`` at ``times[j]``.
    The grid ``times`` has ``M + 1`` points including both ``t = 0`` and
    ``t = tau``; quadratures use the first ``M``.
    """

    eps1: float
    eps2: float
    Omega: float
    times: np.ndarray
    mode_samples: np.ndarray
    theta: float = float("nan")

    def __post_init__(self):
        object.__setattr__(self, "times", _readonly(self.times))
        object.__setattr__(self, "mode_samples", _readonly(self.mode_samples))

    @property
    def tau(self) -> float:
        return 2.0 * np.pi / self.Omega

    @property
    def OmegaR(self) -> float:
        return self.eps2 - self.eps1

    @property
    def quasienergies(self) -> np.ndarray:
        return np.array([self.eps1, self.eps2])

    @property
    def grid_points(self) -> int:
        return len(self.times) - 1


@dataclass(frozen=True)
class InitialState:
    """Floquet-basis populations ``rho11(0)`` and ``rho22(0)``."""

    p1: float
    p2: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        p2 = 1.0 - self.p1 if self.p2 is None else self.p2
        object.__setattr__(self, "p2", float(p2))
        object.__setattr__(self, "p1", float(self.p1))
        if self.p1 < -1e-12 or self.p2 < -1e-12:
            raise ValueError(f"populations must be non-negative, got ({self.p1}, {self.p2})")
        if abs(self.p1 + self.p2 - 1.0) > 1e-10:
            raise ValueError(f"populations must sum to 1, got {self.p1 + self.p2}")

    @property
    def z(self) -> float:
        """Population imbalance ``rho22(0) - rho11(0)``."""
        return self.p2 - self.p1

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.p1, self.p2])


def rabi_hamiltonian(params: RabiParameters) -> Callable[[float], np.ndarray]:
    """Return ``t -> H(t)`` for the Rabi model in the ``(|0>, |1>)`` basis.

    ``H(t) = omega |1><1| - g [exp(-i(Omega t + phi)) |1><0| + h.c.]``.
    With this phase convention the lower Floquet mode at ``t = 0`` is
    ``cos(theta)|0> + exp(-i phi) sin(theta)|1>``.
    """
    omega, g, Om, phi = params.omega, params.g, params.Omega, params.phi

    def H(t: float) -> np.ndarray:
        c = -g * np.exp(-1j * (Om * t + phi))
        return np.array([[0.0, np.conj(c)], [c, omega]], dtype=complex)

    return H


def _mixing_angle(detuning: float, g: float) -> float:
    # tan(2 theta) = 2g / detuning with theta in [0, pi/2]; detuning = 0 gives pi/4.
    return 0.5 * float(np.arctan2(2.0 * g, detuning))


def rabi_floquet(params: RabiParameters, grid_points: int = 512) -> FloquetSolution:
    """Closed-form Floquet solution of the Rabi model.

    The modes are

        phi_1(t) = cos(theta)|0> + exp(-i(Omega t + phi)) sin(theta)|1>
        phi_2(t) = -exp(i phi) sin(theta)|0> + exp(-i Omega t) cos(theta)|1>

    with quasienergies ``(detuning -/+ OmegaR) / 2``.
    """
    theta = _mixing_angle(params.detuning, params.g)
    OR = params.rabi_frequency
    times = np.linspace(0.0, params.tau, grid_points + 1)
    ph = np.exp(-1j * (params.Omega * times + params.phi))
    rot = np.exp(-1j * params.Omega * times)
    c, s = np.cos(theta), np.sin(theta)
    modes = np.empty((2, grid_points + 1, 2), dtype=complex)
    modes[0, :, 0] = c
    modes[0, :, 1] = s * ph
    modes[1, :, 0] = -s * np.exp(1j * params.phi)
    modes[1, :, 1] = c * rot
    return FloquetSolution(
        eps1=0.5 * (params.detuning - OR),
        eps2=0.5 * (params.detuning + OR),
        Omega=params.Omega,
        times=times,
        mode_samples=modes,
        theta=theta,
    )


def _fold(eps: np.ndarray, Omega: float) -> np.ndarray:
    # into (-Omega/2, Omega/2]
    return Omega / 2 - np.mod(Omega / 2 - eps, Omega)


def monodromy_floquet(
    hamiltonian: Callable[[float], np.ndarray],
    Omega: float,
    grid_points: int = 512,
    rtol: float = 1e-12,
) -> FloquetSolution:
    """Numerical Floquet solution from the one-period propagator.

    The propagator is integrated with an adaptive 8th-order Runge-Kutta scheme and
    sampled on ``grid_points + 1`` equally spaced times. Quasienergies are folded
    into ``(-Omega/2, Omega/2]`` and sorted ascending; each mode is gauge-fixed so
    that its largest component at ``t = 0`` is real and positive.

    Raises:
        QuasienergyCrossingError: if the two quasienergies coincide modulo
            ``Omega`` to within ``1e-10 * Omega``.
    """
    if grid_points < 64:
        raise ValueError(f"grid_points must be at least 64, got {grid_points}")
    tau = 2.0 * np.pi / Omega
    times = np.linspace(0.0, tau, grid_points + 1)

    def rhs(t, y):
        return (-1j * (hamiltonian(t) @ y.reshape(2, 2))).ravel()

    res = solve_ivp(
        rhs,
        (0.0, tau),
        np.eye(2, dtype=complex).ravel(),
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=rtol,
    )
    if not res.success:
        raise RuntimeError(f"propagator integration failed: {res.message}")
    U = res.y.T.reshape(-1, 2, 2)

    lam, vecs = np.linalg.eig(U[-1])
    eps = _fold(-np.angle(lam) / tau, Omega)
    gap = abs(eps[1] - eps[0]) % Omega
    if min(gap, Omega - gap) < 1e-10 * Omega:
        raise QuasienergyCrossingError(
            f"quasienergies {eps[0]:.12g} and {eps[1]:.12g} cross modulo Omega={Omega:.12g}"
        )
    order = np.argsort(eps)
    eps = eps[order]
    vecs = vecs[:, order]

    modes = np.empty((2, grid_points + 1, 2), dtype=complex)
    for a in range(2):
        v = vecs[:, a] / np.linalg.norm(vecs[:, a])
        big = np.argmax(np.abs(v))
        v = v * np.conj(v[big]) / abs(v[big])
        modes[a] = np.exp(1j * eps[a] * times)[:, None] * (U @ v)
    return FloquetSolution(
        eps1=float(eps[0]), eps2=float(eps[1]), Omega=Omega, times=times, mode_samples=modes
    )


def bare_to_floquet_populations(
    delta: float, gamma: float, sol: FloquetSolution, phi: float
) -> InitialState:
    """Floquet populations of ``cos(delta)|0> - exp(i gamma) sin(delta)|1>``.

    Uses the mixing angle of ``sol``, which must come from :func:`rabi_floquet`.
    """
    theta = sol.theta
    if np.isnan(theta):
        raise ValueError("bare_to_floquet_populations needs an analytic Rabi solution")
    p1 = 0.5 * (
        1.0
        + np.cos(2 * delta) * np.cos(2 * theta)
        - np.sin(2 * delta) * np.sin(2 * theta) * np.cos(gamma + phi)
    )
    p1 = float(np.clip(p1, 0.0, 1.0))
    return InitialState(p1, 1.0 - p1)
