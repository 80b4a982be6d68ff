"""Heat cumulants and the full heat distribution for a transversely coupled qubit.

Run with ``python3 demos/02_cumulants_and_pdf.py``.
"""

import numpy as np

from heatfcs import (
    SIGMA_X,
    BathParameters,
    RabiParameters,
    coupling_fourier,
    dss,
    finite_time_pdf,
    longtime_cumulants,
    longtime_pdf,
    partial_rates,
    rabi_floquet,
)

sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.02))
table = partial_rates(coupling_fourier(SIGMA_X, sol), sol, BathParameters.from_temperature(0.01, 0.1))
st = dss(table)

# cumulants grow linearly once the populations have relaxed
for n in (80, 200, 700):
    c = longtime_cumulants(table, n * sol.tau)
    print(f"t = {n:4d} tau: mean {c.mean:10.4f}  variance {c.variance:9.4f}  skewness {c.skewness:9.4f}")

# the exact distribution is a comb on n*Omega + m*OmegaR
for n in (80, 700):
    t = n * sol.tau
    exact = finite_time_pdf(table, st, t)
    approx = longtime_pdf(table, st, t)
    tv = exact.total_variation(approx)
    print(f"\nt = {n} tau: {len(exact)} atoms, mass {exact.total():.12f}")
    print(f"  exact mean {exact.mean():.4f}, variance {exact.variance():.4f}")
    print(f"  total variation to the Gaussian comb {tv:.4f}")

    # the heaviest atoms, grouped by their dressed-quantum label m
    top = np.argsort(exact.weight)[-5:][::-1]
    for i in top:
        print(f"  Q = {exact.Q[i]:9.4f}  (n = {exact.n[i]:4d}, m = {exact.m[i]:+d})  weight {exact.weight[i]:.5f}")
