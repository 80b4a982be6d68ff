"""Exception and warning types raised by heatfcs."""


class HeatFCSError(Exception):
    """Base class for all numerical failures raised by this package."""


class QuasienergyCrossingError(HeatFCSError):
    """Two quasienergies coincide modulo the drive frequency."""


class TruncationError(HeatFCSError):
    """The harmonic cutoff discards more coupling weight than allowed."""

    def __init__(self, message: str, required_k_max: int):
        super().__init__(message)
        self.required_k_max = required_k_max


class DegenerateGeneratorError(HeatFCSError):
    """A12 + A21 vanishes, so the relaxation gap and the DSS are undefined."""


class DifferentiationError(HeatFCSError):
    """The Richardson ladder for an eigenvalue derivative did not converge."""


class InvalidExpansionError(HeatFCSError):
    """The quadratic expansion of the dominant eigenvalue has no positive curvature."""


class MassDeficitError(HeatFCSError):
    """An atom window misses more probability than tolerated."""


class DecompositionError(HeatFCSError):
    """Comb-resolved Fourier inversion produced complex atom weights."""


class ResolutionError(HeatFCSError):
    """A distribution could not be normalized at the requested resolution."""


class LatticeViolationError(HeatFCSError):
    """A sampled heat value lies off the n*Omega + m*OmegaR lattice."""


class EventCapError(HeatFCSError):
    """A stochastic trajectory exceeded the per-trajectory jump budget."""


class NearDefectiveWarning(RuntimeWarning):
    """The tilted generator is close to a Jordan block."""


class LongTimeWarning(RuntimeWarning):
    """A long-time formula was evaluated outside its regime of validity."""
