import numpy as np
import pytest

from heatfcs import (
    SIGMA_X,
    SIGMA_Z,
    BathParameters,
    RabiParameters,
    coupling_fourier,
    dss,
    partial_rates,
    rabi_floquet,
)

TRANSVERSE = dict(omega=1.0, g=0.1, detuning=0.02, phi=0.0, eta=0.01, kT=0.1)


def build(operator=SIGMA_X, omega=1.0, g=0.1, detuning=0.02, phi=0.0, eta=0.01, kT=0.1):
    sol = rabi_floquet(RabiParameters.from_detuning(omega, g, detuning, phi))
    bath = BathParameters.from_temperature(eta, kT)
    table = partial_rates(coupling_fourier(operator, sol), sol, bath)
    return sol, table


def random_system(rng, operator=None):
    """A Rabi system with parameters drawn from a physically sensible box."""
    if operator is None:
        operator = SIGMA_X if rng.random() < 0.7 else SIGMA_Z
    return build(
        operator,
        g=rng.uniform(0.02, 0.25),
        detuning=rng.uniform(-0.3, 0.3),
        phi=rng.uniform(0, 2 * np.pi),
        eta=rng.uniform(0.002, 0.03),
        kT=rng.uniform(0.05, 2.0),
    )


@pytest.fixture(scope="session")
def transverse():
    sol, table = build(SIGMA_X)
    return sol, table, dss(table)


@pytest.fixture(scope="session")
def longitudinal():
    sol, table = build(SIGMA_Z)
    return sol, table, dss(table)
