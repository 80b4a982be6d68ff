"""Dress a driven qubit, couple it to an Ohmic bath and look at the jump channels.

Run with ``python3 demos/01_floquet_and_rates.py``.
"""

import numpy as np

from heatfcs import (
    SIGMA_X,
    BathParameters,
    RabiParameters,
    coupling_fourier,
    dss,
    mean_heat_power,
    monodromy_floquet,
    rabi_hamiltonian,
    partial_rates,
    rabi_floquet,
)

# qubit splitting 1, drive strength 0.1, drive slightly below resonance
params = RabiParameters.from_detuning(omega=1.0, g=0.1, detuning=0.02)
sol = rabi_floquet(params)
print(f"Rabi frequency {sol.OmegaR:.6f}, drive period {sol.tau:.6f}, mixing angle {sol.theta:.6f}")

# the analytic quasienergies agree with a brute-force one-period propagator
check = monodromy_floquet(rabi_hamiltonian(params), params.Omega)
print(f"quasienergies (analytic)  {sol.quasienergies}")
print(f"quasienergies (monodromy) {check.quasienergies}")

# every bath transition is labelled by (final, initial, drive quanta k)
bath = BathParameters.from_temperature(eta=0.01, kT=0.1)
table = partial_rates(coupling_fourier(SIGMA_X, sol), sol, bath)
print("\n alpha beta   k      energy          rate")
for ch in sorted(table, key=lambda c: -c.rate)[:8]:
    print(f"   {ch.alpha}    {ch.beta}  {ch.k:+d}  {ch.delta:+.6f}  {ch.rate:.6e}")

# the two aggregate rates fix the stationary Floquet populations
st = dss(table)
print(f"\nA12 = {table.A12:.6e}, A21 = {table.A21:.6e}")
print(f"stationary populations p1 = {st.p1:.6f}, p2 = {st.p2:.6f}")
print(f"mean heat power into the bath {mean_heat_power(table, st):.6e}")

# the power stays positive across the resonance
for det in np.linspace(-0.2, 0.2, 5):
    s = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, det))
    t = partial_rates(coupling_fourier(SIGMA_X, s), s, bath)
    print(f"detuning {det:+.2f}: power {mean_heat_power(t, dss(t)):.6e}")
