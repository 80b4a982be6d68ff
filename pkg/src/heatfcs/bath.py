"""Thermal Ohmic bath with spectral density ``J(E) = eta * E``.

No high-frequency cutoff is modelled, so all transition energies must lie far
below the physical cutoff of the environment. Lamb-shift (principal value)
contributions are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["BathParameters", "bose_occupation", "spectral_s", "correlation_integral"]


@dataclass(frozen=True)
class BathParameters:
    eta: float
    beta: float

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @classmethod
    def from_temperature(cls, eta: float, kT: float) -> "BathParameters":
        if np.isinf(kT) or not kT > 0:
            raise ValueError(f"temperature must be positive and finite, got {kT}")
        return cls(eta=eta, beta=1.0 / kT)

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta


def bose_occupation(E, bath: BathParameters):
    """Bose factor ``1 / (exp(beta E) - 1)`` for ``E > 0``."""
    E = np.asarray(E, dtype=float)
    if np.any(E <= 0):
        raise ValueError("Bose occupation requires E > 0")
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(bath.beta * E)
    return out if out.ndim else float(out)


def spectral_s(E, bath: BathParameters):
    """Absorption (E > 0) / emission (E < 0) spectrum of the bath.

    ``s(E) = eta E n_B(E)`` for ``E > 0`` and ``eta |E| (n_B(|E|) + 1)`` for
    ``E < 0``; both branches equal ``eta |E| / (1 - exp(-beta |E|)) * exp(-beta E
    theta(E))``. At ``E = 0`` the two-sided limit ``eta / beta`` is returned.
    """
    E = np.asarray(E, dtype=float)
    x = bath.beta * np.abs(E)
    with np.errstate(divide="ignore", invalid="ignore"):
        # x / (1 - e^-x) -> 1 as x -> 0
        emission = np.where(x > 0, x / -np.expm1(-x), 1.0) / bath.beta
    out = bath.eta * np.where(E > 0, emission * np.exp(-x), emission)
    return out if out.ndim else float(out)


def correlation_integral(side: str, nu, E, bath: BathParameters):
    """Half-range Fourier transform ``I_side(nu, E) = pi exp(side i E nu) s(side E)``."""
    if side in ("+", "plus", +1):
        sgn = 1.0
    elif side in ("-", "minus", -1):
        sgn = -1.0
    else:
        raise ValueError(f"side must be '+' or '-', got {side!r}")
    E = np.asarray(E, dtype=float)
    nu = np.asarray(nu, dtype=float)
    out = np.pi * np.exp(1j * sgn * E * nu) * spectral_s(sgn * E, bath)
    return out if np.ndim(out) else complex(out)
