"""Exact results for the longitudinal (sigma_z) coupling and for the undriven qubit.

With a longitudinal coupling only the two k = 0 channels between the Floquet
states carry heat, so the populations perform a two-state telegraph process and
the net number of dressed quanta exchanged is always -1, 0 or +1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bath import BathParameters, bose_occupation, spectral_s
from .floquet import InitialState
from .statistics import HeatDistribution
from .tilted import GeneralizedRateMatrix

__all__ = [
    "LongitudinalRates",
    "sigma_z_cf",
    "sigma_z_pdf",
    "sigma_z_moment",
    "undriven_generator",
]


@dataclass(frozen=True)
class LongitudinalRates:
    """Up (``Gamma_plus``) and down (``Gamma_minus``) rates between the Floquet states.

    ``Omega`` is optional and only used to label atoms of the distributions.
    """

    Gamma_plus: float
    Gamma_minus: float
    OmegaR: float
    Omega: float = float("nan")

    def __post_init__(self):
        if self.Gamma_plus < 0 or self.Gamma_minus < 0:
            raise ValueError("rates must be non-negative")
        if not self.Gamma_plus + self.Gamma_minus > 0:
            raise ValueError("at least one rate must be positive")

    @property
    def Gamma(self) -> float:
        return self.Gamma_plus + self.Gamma_minus

    @classmethod
    def from_bath(cls, S12: float, OmegaR: float, bath: BathParameters, Omega: float = float("nan")):
        """``Gamma_pm = 2 pi |S12|^2 s(+-OmegaR)``."""
        w = 2.0 * np.pi * abs(S12) ** 2
        return cls(w * spectral_s(OmegaR, bath), w * spectral_s(-OmegaR, bath), OmegaR, Omega)

    def transfer_probabilities(self, init: InitialState, t) -> tuple:
        """``(p_up, p_down)``: net absorption from / emission into the bath by time ``t``."""
        grow = -np.expm1(-self.Gamma * np.asarray(t, dtype=float))
        p_up = self.Gamma_plus / self.Gamma * init.p1 * grow
        p_down = self.Gamma_minus / self.Gamma * init.p2 * grow
        return p_up, p_down


def sigma_z_cf(rates: LongitudinalRates, init: InitialState, nu, t):
    """Characteristic function of the heat for the longitudinal coupling."""
    nu = np.asarray(nu, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    p_up, p_down = rates.transfer_probabilities(init, t)
    x = rates.OmegaR * nu
    out = (1.0 - p_up - p_down) + p_up * np.exp(-1j * x) + p_down * np.exp(1j * x)
    return out if np.ndim(out) else complex(out)


def sigma_z_pdf(rates: LongitudinalRates, init: InitialState, t: float) -> HeatDistribution:
    """Three atoms at ``-OmegaR``, ``0`` and ``+OmegaR``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    p_up, p_down = rates.transfer_probabilities(init, t)
    w = np.array([p_up, 1.0 - p_up - p_down, p_down], dtype=float)
    return HeatDistribution(
        n=np.zeros(3, dtype=np.int64),
        m=np.array([-1, 0, 1]),
        weight=w,
        Omega=rates.Omega,
        OmegaR=rates.OmegaR,
        t=float(t),
    )


def sigma_z_moment(rates: LongitudinalRates, init: InitialState, k: int, t):
    """Raw moment ``<Q^k> = OmegaR^k (p_down + (-1)^k p_up)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    p_up, p_down = rates.transfer_probabilities(init, t)
    return rates.OmegaR**k * (p_down + (-1) ** k * p_up)


def undriven_generator(omega: float, bath: BathParameters, nu: float) -> GeneralizedRateMatrix:
    """Tilted population generator of a static qubit with transverse coupling.

    Index 0 is the ground state. ``d = pi J(omega) (n_B + 1)`` is the decay rate
    scale and ``u = pi J(omega) n_B`` the excitation one.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    J = bath.eta * omega
    n = bose_occupation(omega, bath)
    d = np.pi * J * (n + 1.0)
    u = np.pi * J * n
    ph = np.exp(1j * omega * nu)
    M = np.array([[-2 * u, 2 * d * ph], [2 * u * np.conj(ph), -2 * d]], dtype=complex)
    return GeneralizedRateMatrix(M, float(nu))
