"""Check the analytic heat distribution against quantum-jump trajectories.

Run with ``python3 demos/04_monte_carlo_check.py``.
"""

import numpy as np

from heatfcs import (
    SIGMA_X,
    BathParameters,
    RabiParameters,
    coupling_fourier,
    dss,
    empirical_distribution,
    finite_time_pdf,
    partial_rates,
    rabi_floquet,
    sample_heat,
)

sol = rabi_floquet(RabiParameters.from_detuning(1.0, 0.1, 0.02))
table = partial_rates(coupling_fourier(SIGMA_X, sol), sol, BathParameters.from_temperature(0.01, 0.1))
st = dss(table)
t = 80 * sol.tau

exact = finite_time_pdf(table, st, t)
ens = sample_heat(table, st, t, N=100_000, seed=11, threads=4)
emp = empirical_distribution(ens)

se = np.sqrt(exact.variance() / ens.N)
print(f"mean:     exact {exact.mean():.4f}  sampled {ens.mean():.4f}  ({(ens.mean() - exact.mean()) / se:+.2f} standard errors)")
print(f"variance: exact {exact.variance():.4f}  sampled {ens.variance():.4f}")
print(f"total variation between sampled and exact combs: {emp.total_variation(exact):.4f}")

# dropping the diagonal channels that carry drive quanta changes the answer
partial = sample_heat(table, st, t, N=20_000, seed=7, include_self=False)
print(f"without diagonal channels the sampled mean is {partial.mean():.4f}")
