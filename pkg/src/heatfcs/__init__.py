"""Full counting statistics of the heat exchanged by a driven qubit and a thermal Ohmic bath."""

from .bath import BathParameters, bose_occupation, correlation_integral, spectral_s
from .closed_forms import (
    LongitudinalRates,
    sigma_z_cf,
    sigma_z_moment,
    sigma_z_pdf,
    undriven_generator,
)
from .errors import *  # noqa: F401,F403
from .floquet import (
    FloquetSolution,
    InitialState,
    RabiParameters,
    bare_to_floquet_populations,
    monodromy_floquet,
    rabi_floquet,
    rabi_hamiltonian,
)
from .mc import TrajectoryEnsemble, empirical_distribution, sample_heat
from .rates import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    Channel,
    CouplingMatrixElements,
    RateTable,
    aggregate_nu,
    coupling_fourier,
    partial_rates,
    sigma_x_elements,
    sigma_z_elements,
)
from .statistics import (
    CumulantSet,
    HeatDistribution,
    envelope_coefficients,
    finite_time_pdf,
    gaussian_envelope,
    longtime_cumulants,
    longtime_pdf,
    mean_heat,
    mean_heat_power,
)
from .tilted import (
    GeneralizedRateMatrix,
    SpectralDecomposition,
    characteristic_function,
    dss,
    eigenvalues,
    propagate_populations,
    spectral_decompose,
    tilted_generator,
)

__version__ = "0.1.0"
