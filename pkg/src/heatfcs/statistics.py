"""Heat power, cumulants and probability distributions of the exchanged heat.

Positive heat ``Q`` is energy delivered to the bath. Distributions live on the
lattice ``Q = n * Omega + m * OmegaR`` with ``m`` in ``{-1, 0, +1}``: ``m = +1``
means the system ended one dressed level below where it started.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import (
    DecompositionError,
    DifferentiationError,
    InvalidExpansionError,
    LongTimeWarning,
    MassDeficitError,
    ResolutionError,
)
from .floquet import InitialState
from .rates import RateTable, periodic_aggregate
from .tilted import _check_gap, dss, expm2, xi_plus_local

__all__ = [
    "CumulantSet",
    "HeatDistribution",
    "mean_heat_power",
    "mean_heat",
    "xi_plus_derivatives",
    "longtime_cumulants",
    "envelope_coefficients",
    "gaussian_envelope",
    "longtime_pdf",
    "finite_time_pdf",
]


@dataclass(frozen=True)
class CumulantSet:
    """First three cumulants of the heat at time ``t``."""

    mean: float
    variance: float
    skewness: float
    t: float

    @property
    def mean_rate(self) -> float:
        return self.mean / self.t

    @property
    def variance_rate(self) -> float:
        return self.variance / self.t

    @property
    def skewness_rate(self) -> float:
        return self.skewness / self.t

    @property
    def standardized_skewness(self) -> float:
        return self.skewness / self.variance**1.5


@dataclass(frozen=True)
class HeatDistribution:
    """Point masses ``weight[i]`` at ``Q = n[i] * Omega + m[i] * OmegaR``.

    ``envelope`` holds the Gaussian coefficients ``(a, b)`` when the
    distribution comes from the long-time expansion.
    """

    n: np.ndarray
    m: np.ndarray
    weight: np.ndarray
    Omega: float
    OmegaR: float
    t: float
    envelope: tuple[float, float] | None = field(default=None)

    def __post_init__(self):
        n = np.asarray(self.n, dtype=np.int64)
        m = np.asarray(self.m, dtype=np.int64)
        w = np.asarray(self.weight, dtype=float)
        if not (n.shape == m.shape == w.shape and n.ndim == 1):
            raise ValueError("n, m and weight must be 1-d arrays of equal length")
        if np.any(np.abs(m) > 1):
            raise ValueError("m must lie in {-1, 0, 1}")
        if np.any(w < -1e-12):
            raise ValueError("atom weights must be non-negative")
        w = np.clip(w, 0.0, None)
        for name, a in (("n", n), ("m", m), ("weight", w)):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def __len__(self) -> int:
        return len(self.weight)

    @property
    def Q(self) -> np.ndarray:
        photons = np.where(self.n == 0, 0.0, self.n * self.Omega)
        return photons + self.m * self.OmegaR

    def total(self) -> float:
        return float(self.weight.sum())

    def mean(self) -> float:
        return float(np.dot(self.weight, self.Q))

    def central_moment(self, k: int) -> float:
        dq = self.Q - self.mean()
        return float(np.dot(self.weight, dq**k))

    def variance(self) -> float:
        return self.central_moment(2)

    def moment(self, k: int) -> float:
        return float(np.dot(self.weight, self.Q**k))

    def weight_of(self, n: int, m: int) -> float:
        sel = (self.n == n) & (self.m == m)
        return float(self.weight[sel].sum())

    def coarse_grained(self, width: float | None = None) -> dict[int, float]:
        """Total weight per bin ``[(j - 1/2) width, (j + 1/2) width)``; default width ``Omega``."""
        width = self.Omega if width is None else width
        bins = np.floor(self.Q / width + 0.5).astype(np.int64)
        out: dict[int, float] = {}
        for b, w in zip(bins.tolist(), self.weight.tolist()):
            out[b] = out.get(b, 0.0) + w
        return out

    def total_variation(self, other: "HeatDistribution", width: float | None = None) -> float:
        """Total-variation distance between the two distributions binned at ``width``."""
        width = self.Omega if width is None else width
        a = self.coarse_grained(width)
        b = other.coarse_grained(width)
        return 0.5 * sum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in set(a) | set(b))

    def to_dict(self) -> dict:
        out = {
            "omega_drive": self.Omega,
            "omega_rabi": self.OmegaR,
            "t": self.t,
            "atoms": [
                {"n": int(n), "m": int(m), "w": float(w)}
                for n, m, w in zip(self.n, self.m, self.weight)
            ],
        }
        if self.envelope is not None:
            out["envelope"] = {"a": self.envelope[0], "b": self.envelope[1]}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "HeatDistribution":
        atoms = d["atoms"]
        env = d.get("envelope")
        return cls(
            n=np.array([a["n"] for a in atoms], dtype=np.int64),
            m=np.array([a["m"] for a in atoms], dtype=np.int64),
            weight=np.array([a["w"] for a in atoms], dtype=float),
            Omega=float(d["omega_drive"]),
            OmegaR=float(d["omega_rabi"]),
            t=float(d["t"]),
            envelope=None if env is None else (float(env["a"]), float(env["b"])),
        )


def mean_heat_power(table: RateTable, populations: InitialState) -> float:
    """``<dQ/dt> = -sum Delta_{ab,k} a_{ab,k} rho_bb``; positive means heat flows into the bath."""
    if len(table) == 0:
        return 0.0
    rho = populations.vector[table.column("beta")]
    return float(-np.sum(table.column("delta") * table.column("rate") * rho))


def mean_heat(table: RateTable, init: InitialState, t: float) -> float:
    """Exact ``<Q>(t)``: the heat power integrated along the relaxing populations."""
    sigma = table.relaxation_rate
    p_init = mean_heat_power(table, init)
    if sigma == 0:
        return p_init * t
    st = dss(table)
    p_st = mean_heat_power(table, st)
    return p_st * t + (p_init - p_st) * (-math.expm1(-sigma * t)) / sigma


_STENCILS = {
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
}


def xi_plus_derivatives(
    table: RateTable,
    orders=(1, 2, 3),
    step: float | None = None,
    levels: int = 4,
    rtol: float = 1e-7,
) -> dict[int, complex]:
    """Derivatives of the dominant eigenvalue at ``nu = 0``.

    Second-order central differences are refined by a Richardson ladder with step
    ratio 2 (error orders 2, 4, 6, ...). The initial step defaults to ``1e-3 tau``.

    Raises:
        DifferentiationError: if the last two diagonal entries of a ladder differ by
            more than ``rtol`` relative (plus a roundoff allowance).
    """
    _check_gap(table)
    h0 = 1e-3 * table.tau if step is None else step
    hs = h0 / 2.0 ** np.arange(levels)
    offsets = np.arange(-2, 3)
    xi = xi_plus_local(table, offsets[None, :] * hs[:, None])
    scale = table.relaxation_rate + abs(table.A11)
    out = {}
    for n in orders:
        D0 = np.array(
            [sum(c * xi[i, j + 2] for j, c in _STENCILS[n]) / hs[i] ** n for i in range(levels)]
        )
        R = [list(D0)]
        for j in range(1, levels):
            prev = R[-1]
            R.append([prev[i] + (prev[i] - prev[i - 1]) / (4**j - 1) for i in range(1, len(prev))])
        best, prior = R[-1][-1], R[-2][-1]
        noise = 1e-15 * scale / hs[-1] ** n
        if abs(best - prior) > rtol * abs(best) + noise:
            diag = ", ".join(f"{r[-1]:.6g}" for r in R)
            raise DifferentiationError(
                f"Richardson ladder for d^{n} xi_+/dnu^{n} did not converge: {diag}"
            )
        out[n] = complex(best)
    return out


def _real(x: complex, what: str, tol: float = 1e-10) -> float:
    if abs(x.imag) > tol * max(abs(x), 1e-300):
        raise DifferentiationError(f"{what} has a non-negligible imaginary part: {x}")
    return float(x.real)


def longtime_cumulants(table: RateTable, t: float, order: int = 3, min_gap_times: float = 10.0) -> CumulantSet:
    """Cumulants ``<<Q>>_n = (-i)^n xi_+^(n)(0) t`` of the long-time heat distribution.

    Warns with :class:`LongTimeWarning` when ``t (A12 + A21) < min_gap_times``.
    Cumulants above ``order`` are reported as NaN.
    """
    if not 1 <= order <= 3:
        raise ValueError("order must be 1, 2 or 3")
    sigma = _check_gap(table)
    if t * sigma < min_gap_times:
        warnings.warn(
            f"t (A12 + A21) = {t * sigma:.3g} is not large; long-time cumulants may be inaccurate",
            LongTimeWarning,
            stacklevel=2,
        )
    d = xi_plus_derivatives(table, orders=tuple(range(1, order + 1)))
    vals = [np.nan, np.nan, np.nan]
    for n in range(1, order + 1):
        vals[n - 1] = _real((-1j) ** n * d[n], f"cumulant {n}") * t
    return CumulantSet(mean=vals[0], variance=vals[1], skewness=vals[2], t=float(t))


def envelope_coefficients(table: RateTable) -> tuple[float, float]:
    """Coefficients ``(a, b)`` of ``xi_+ ~ i a x - b x^2`` in the phase ``x = nu * Omega``.

    Raises:
        InvalidExpansionError: if ``b`` is not positive beyond roundoff.
    """
    d = xi_plus_derivatives(table, orders=(1, 2))
    a = _real(-1j * d[1], "a") / table.Omega
    b = _real(-0.5 * d[2], "b") / table.Omega**2
    # b is bounded by half the heat-weighted total rate; far below that it is roundoff
    bound = 0.5 * float(np.sum(table.column("rate") * table.column("delta") ** 2)) / table.Omega**2
    if not b > 1e-10 * bound:
        raise InvalidExpansionError(f"curvature b = {b:.3g} is not positive")
    return a, b


def _gaussian(Q, t, Omega, a, b):
    var = 2.0 * b * t * Omega**2
    return np.exp(-((Q - a * t * Omega) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)


def gaussian_envelope(Q, t: float, table: RateTable):
    """Weight function ``w(Q, t)``: a normal density with mean ``a t Omega`` and variance ``2 b t Omega^2``."""
    if not t > 0:
        raise ValueError("t must be positive")
    a, b = envelope_coefficients(table)
    out = _gaussian(np.asarray(Q, dtype=float), t, table.Omega, a, b)
    return out if np.ndim(out) else float(out)


def longtime_pdf(
    table: RateTable,
    init: InitialState,
    t: float,
    n_range: int | tuple[int, int] | None = None,
    min_tb: float = 1.0,
) -> HeatDistribution:
    """Gaussian-comb approximation to the heat distribution at long times.

    Atoms at ``n Omega + m OmegaR`` carry ``Omega w(Q, t) p_m`` with
    ``p_{-1} = A21 rho11(0) / Sigma`` (up), ``p_{+1} = A12 rho22(0) / Sigma`` (down)
    and ``p_0 = 1 - p_up - p_down``. The lattice sum is renormalised to one.

    ``n_range`` is either a half-width around the envelope mean or an explicit
    inclusive ``(n_lo, n_hi)`` window; by default ``8`` standard deviations.

    Raises:
        MassDeficitError: if the window holds less than ``1 - 1e-8`` of the envelope.
    """
    sigma = _check_gap(table)
    a, b = envelope_coefficients(table)
    if t * b < min_tb:
        warnings.warn(
            f"t b = {t * b:.3g}; the comb approximation needs t >> 1/b",
            LongTimeWarning,
            stacklevel=2,
        )
    Om, OR = table.Omega, table.OmegaR
    mu = a * t * Om
    sd = math.sqrt(2.0 * b * t) * Om
    centre = int(round(mu / Om))
    if n_range is None:
        half = int(math.ceil(8.0 * sd / Om)) + 1
        lo, hi = centre - half, centre + half
    elif isinstance(n_range, tuple):
        lo, hi = n_range
    else:
        lo, hi = centre - int(n_range), centre + int(n_range)
    upper = (hi * Om + abs(OR) + 0.5 * Om - mu) / sd
    lower = (lo * Om - abs(OR) - 0.5 * Om - mu) / sd
    captured = ndtr(upper) - ndtr(lower)
    if captured < 1 - 1e-8:
        raise MassDeficitError(
            f"window n in [{lo}, {hi}] holds only {captured:.10f} of the envelope mass"
        )
    p_up = table.A21 * init.p1 / sigma
    p_down = table.A12 * init.p2 / sigma
    ns = np.arange(lo, hi + 1)
    n_all = np.repeat(ns, 3)
    m_all = np.tile(np.array([-1, 0, 1]), len(ns))
    p = np.array([p_up, 1.0 - p_up - p_down, p_down])[m_all + 1]
    Q = n_all * Om + m_all * OR
    w = Om * _gaussian(Q, t, Om, a, b) * p
    w = w / w.sum()
    return HeatDistribution(n_all, m_all, w, Om, OR, float(t), envelope=(a, b))


def _comb_components(table: RateTable, init: InitialState, t: float, N: int) -> np.ndarray:
    """Periodic parts (Phi_-1, Phi_0, Phi_+1) of G sampled at ``nu_j = j tau / N``."""
    nu = np.arange(N) * table.tau / N
    P = periodic_aggregate(table, nu)
    A = table.A
    B = P.copy()
    B[:, 0, 0] = P[:, 0, 0] - A[0, 0] - A[1, 0]
    B[:, 1, 1] = P[:, 1, 1] - A[1, 1] - A[0, 1]
    E = expm2(B, t)
    return np.stack(
        [
            E[:, 1, 0] * init.p1,
            E[:, 0, 0] * init.p1 + E[:, 1, 1] * init.p2,
            E[:, 0, 1] * init.p2,
        ]
    )


def finite_time_pdf(
    table: RateTable,
    init: InitialState,
    t: float,
    grid: int = 256,
    max_grid: int = 2**22,
) -> HeatDistribution:
    """Exact heat distribution at finite ``t`` by comb-resolved Fourier inversion.

    Writing ``A12^nu = e^{i nu OmegaR} f(nu)`` and ``A21^nu = e^{-i nu OmegaR} g(nu)``
    with ``f, g`` periodic, the characteristic function splits into
    ``Phi_0(nu) + Phi_+(nu) e^{i nu OmegaR} + Phi_-(nu) e^{-i nu OmegaR}`` with every
    ``Phi`` periodic in ``nu`` with period ``tau``. A DFT of each over one period gives
    the weights of the atoms ``(n, m)``. The grid doubles until the window edges are
    empty.

    Raises:
        DecompositionError: atom weights with imaginary part above ``1e-10``.
        ResolutionError: total weight outside ``1 +- 1e-8`` or grid limit reached.
    """
    if grid < 256 or grid & (grid - 1):
        raise ValueError(f"grid must be a power of two >= 256, got {grid}")
    if t < 0:
        raise ValueError("t must be non-negative")
    Om, OR = table.Omega, table.OmegaR
    if t == 0 or len(table) == 0:
        return HeatDistribution(np.array([0]), np.array([0]), np.array([1.0]), Om, OR, float(t))
    centre = int(round(mean_heat(table, init, t) / Om))
    N = grid
    while True:
        phi = _comb_components(table, init, t, N)
        coeffs = np.fft.fft(phi, axis=-1) / N
        ns = np.arange(centre - N // 2, centre + N // 2)
        w = coeffs[:, ns % N]
        edge = np.abs(ns - centre) > 3 * N // 8
        if np.abs(w[:, edge]).sum() <= 1e-13:
            break
        if 2 * N > max_grid:
            raise ResolutionError(f"distribution does not fit in a grid of {N} points")
        N *= 2
    if np.max(np.abs(w.imag)) > 1e-10:
        raise DecompositionError(
            f"atom weights have imaginary parts up to {np.max(np.abs(w.imag)):.3g}"
        )
    w = w.real
    if w.min() < -1e-10:
        raise DecompositionError(f"negative atom weight {w.min():.3g}")
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if abs(total - 1.0) > 1e-8:
        raise ResolutionError(f"atom weights sum to {total:.12f}")
    w /= total
    m_idx, n_idx = np.nonzero(w > 0)
    return HeatDistribution(ns[n_idx], m_idx - 1, w[m_idx, n_idx], Om, OR, float(t))
