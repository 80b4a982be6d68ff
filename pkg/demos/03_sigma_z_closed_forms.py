"""Longitudinal coupling: a three-atom heat distribution and its phase dependence.

Run with ``python3 demos/03_sigma_z_closed_forms.py``.
"""

import numpy as np

from heatfcs import (
    SIGMA_Z,
    BathParameters,
    LongitudinalRates,
    RabiParameters,
    bare_to_floquet_populations,
    characteristic_function,
    coupling_fourier,
    dss,
    mean_heat_power,
    partial_rates,
    rabi_floquet,
    sigma_z_cf,
    sigma_z_pdf,
)
from heatfcs.rates import sigma_z_elements

bath = BathParameters.from_temperature(0.01, 0.5)
sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.02))
table = partial_rates(coupling_fourier(SIGMA_Z, sol), sol, bath)
rates = LongitudinalRates.from_bath(sigma_z_elements(sol.theta)[0, 1, 0], sol.OmegaR, bath, sol.Omega)
print(f"Gamma+ = {rates.Gamma_plus:.6e}, Gamma- = {rates.Gamma_minus:.6e}")

# no heat flows once the Floquet populations are stationary
print(f"stationary power {mean_heat_power(table, dss(table)):.3e}")

# the general machinery reproduces the closed form
init = bare_to_floquet_populations(np.pi / 4, 0.0, sol, 0.0)
t = 50 * sol.tau
for nu in (0.5, 3.0, 20.0):
    print(f"nu = {nu:5.1f}: pipeline {characteristic_function(table, init, nu, t):.12f}  closed form {sigma_z_cf(rates, init, nu, t):.12f}")

d = sigma_z_pdf(rates, init, t)
for q, w in zip(d.Q, d.weight):
    print(f"Q = {q:+.4f}: {w:.6f}")

# starting from an equal bare superposition, the drive phase steers the sign of the heat
print("\n phi/pi   <Q>/OmegaR")
for phi in np.linspace(0, 2 * np.pi, 9):
    s = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.02, phi))
    r = LongitudinalRates.from_bath(sigma_z_elements(s.theta)[0, 1, 0], s.OmegaR, bath, s.Omega)
    q = sigma_z_pdf(r, bare_to_floquet_populations(np.pi / 4, 0.0, s, phi), 1e5).mean()
    print(f"  {phi / np.pi:4.2f}    {q / s.OmegaR:+.4f}")
