"""Floquet-basis coupling amplitudes and the partial transition rates they induce."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .bath import BathParameters, spectral_s
from .errors import TruncationError
from .floquet import FloquetSolution

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "CouplingMatrixElements",
    "Channel",
    "RateTable",
    "coupling_fourier",
    "sigma_x_elements",
    "sigma_z_elements",
    "partial_rates",
    "aggregate_nu",
    "upsilon",
    "periodic_aggregate",
]

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
# diag(+1, -1) in the (|0>, |1>) basis; only |S| enters the rates.
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

TAIL_TOLERANCE = 1e-12
# channels with |S|^2 below this fraction of the largest are quadrature noise
NEGLIGIBLE_WEIGHT = 1e-24


@dataclass(frozen=True)
class CouplingMatrixElements:
    """Harmonics ``S[alpha, beta, k]`` for ``k = -k_max..k_max``.

    ``amplitudes[alpha, beta, k + k_max]`` stores ``S_{alpha beta, k}``.
    """

    amplitudes: np.ndarray
    k_max: int

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.shape != (2, 2, 2 * self.k_max + 1):
            raise ValueError(f"amplitudes shape {a.shape} does not match k_max={self.k_max}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    def __getitem__(self, key: tuple[int, int, int]) -> complex:
        alpha, beta, k = key
        if abs(k) > self.k_max:
            return 0j
        return complex(self.amplitudes[alpha, beta, k + self.k_max])

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.k_max, self.k_max + 1)

    @property
    def entries(self) -> dict[tuple[int, int, int], complex]:
        return {
            (a, b, int(k)): complex(self.amplitudes[a, b, i])
            for a in range(2)
            for b in range(2)
            for i, k in enumerate(self.ks)
        }

    def hermiticity_defect(self) -> float:
        """``max |S_{ab,k} - conj(S_{ba,-k})|``."""
        mirrored = np.conj(np.transpose(self.amplitudes, (1, 0, 2))[:, :, ::-1])
        return float(np.max(np.abs(self.amplitudes - mirrored)))


def _required_k_max(power: np.ndarray, tol: float) -> int:
    # power[..., k + K] over k = -K..K; smallest cutoff whose tail fraction < tol for every row
    K = (power.shape[-1] - 1) // 2
    total = power.sum(axis=-1)
    # pairs whose whole weight is quadrature noise impose no cutoff
    floor = NEGLIGIBLE_WEIGHT * total.max()
    for kc in range(K + 1):
        inside = power[..., K - kc : K + kc + 1].sum(axis=-1)
        tail = total - inside
        if np.all(tail <= tol * total + floor):
            return kc
    return K + 1


def coupling_fourier(
    S: np.ndarray, sol: FloquetSolution, k_max: int | None = None
) -> CouplingMatrixElements:
    """Fourier harmonics of ``<phi_alpha(t)| S |phi_beta(t)>`` over one period.

    The periodic trapezoidal rule on the mode grid reduces to a DFT. If ``k_max`` is
    ``None`` the smallest cutoff meeting the tail criterion is chosen.

    Raises:
        TruncationError: if the harmonics beyond ``k_max`` carry more than ``1e-12``
            of the total ``sum_k |S_{ab,k}|^2`` for some pair ``(alpha, beta)``.
    """
    S = np.asarray(S, dtype=complex)
    if S.shape != (2, 2) or not np.allclose(S, S.conj().T, atol=1e-14):
        raise ValueError("coupling operator must be a 2x2 Hermitian matrix")
    M = sol.grid_points
    modes = sol.mode_samples[:, :M, :]
    f = np.einsum("atx,xy,bty->abt", modes.conj(), S, modes)
    coeffs = np.fft.fft(f, axis=-1) / M
    K = M // 2 - 1
    ks = np.arange(-K, K + 1)
    full = coeffs[..., ks % M]
    required = _required_k_max(np.abs(full) ** 2, TAIL_TOLERANCE)
    if k_max is None:
        k_max = required
    if M < 4 * max(k_max, 1):
        raise ValueError(f"mode grid of {M} points is too coarse for k_max={k_max}")
    if required > k_max:
        raise TruncationError(
            f"k_max={k_max} leaves more than {TAIL_TOLERANCE:g} of the coupling weight "
            f"in the tail; use k_max >= {required}",
            required_k_max=required,
        )
    return CouplingMatrixElements(full[..., K - k_max : K + k_max + 1], k_max)


def _from_table(k_max: int, items: dict[tuple[int, int, int], complex]) -> CouplingMatrixElements:
    amp = np.zeros((2, 2, 2 * k_max + 1), dtype=complex)
    for (a, b, k), v in items.items():
        amp[a, b, k + k_max] = v
    return CouplingMatrixElements(amp, k_max)


def sigma_x_elements(theta: float, phi: float = 0.0) -> CouplingMatrixElements:
    """Closed-form harmonics of ``sigma_x`` between the Rabi modes.

    Nonzero entries sit at ``k = +-1`` only:
    ``|S_{11,+-1}| = sin(2 theta)/2``, ``S_{12,-1} = cos^2(theta)`` and
    ``|S_{12,+1}| = sin^2(theta)``.
    """
    half = 0.5 * np.sin(2 * theta)
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    e = np.exp(1j * phi)
    s11 = {-1: half * np.conj(e), 1: half * e}
    s12 = {-1: c2 + 0j, 1: -s2 * e**2}
    items = {}
    for k in (-1, 1):
        items[(0, 0, k)] = s11[k]
        items[(1, 1, k)] = -s11[k]
        items[(0, 1, k)] = s12[k]
        items[(1, 0, k)] = np.conj(s12[-k])
    return _from_table(1, items)


def sigma_z_elements(theta: float, phi: float = 0.0) -> CouplingMatrixElements:
    """Closed-form harmonics of ``sigma_z``; only ``k = 0`` survives."""
    s12 = -np.sin(2 * theta) * np.exp(1j * phi)
    items = {
        (0, 0, 0): np.cos(2 * theta) + 0j,
        (1, 1, 0): -np.cos(2 * theta) + 0j,
        (0, 1, 0): s12,
        (1, 0, 0): np.conj(s12),
    }
    return _from_table(0, items)


@dataclass(frozen=True)
class Channel:
    """Transition ``beta -> alpha`` assisted by ``k`` drive quanta.

    The bath receives heat ``-delta`` each time the channel fires.
    """

    alpha: int
    beta: int
    k: int
    delta: float
    amplitude2: float
    rate: float


@dataclass(frozen=True)
class RateTable:
    """All channels of one driven system plus the aggregated rates ``A[alpha, beta]``."""

    channels: tuple[Channel, ...]
    eps1: float
    eps2: float
    Omega: float

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        A = np.zeros((2, 2))
        for ch in self.channels:
            A[ch.alpha, ch.beta] += ch.rate
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        cols = {}
        for name in ("alpha", "beta", "k", "delta", "rate"):
            arr = np.array([getattr(c, name) for c in self.channels], dtype=float)
            if name in ("alpha", "beta", "k"):
                arr = arr.astype(int)
            arr.setflags(write=False)
            cols[name] = arr
        object.__setattr__(self, "_cols", cols)

    def __iter__(self) -> Iterator[Channel]:
        return iter(self.channels)

    def __len__(self) -> int:
        return len(self.channels)

    @property
    def OmegaR(self) -> float:
        return self.eps2 - self.eps1

    @property
    def tau(self) -> float:
        return 2.0 * np.pi / self.Omega

    @property
    def A11(self) -> float:
        return float(self.A[0, 0])

    @property
    def A12(self) -> float:
        return float(self.A[0, 1])

    @property
    def A21(self) -> float:
        return float(self.A[1, 0])

    @property
    def A22(self) -> float:
        return float(self.A[1, 1])

    @property
    def relaxation_rate(self) -> float:
        """``A12 + A21``, the gap of the population master equation."""
        return self.A12 + self.A21

    def column(self, name: str) -> np.ndarray:
        return self._cols[name]

    def without(self, predicate) -> "RateTable":
        """Copy of the table with every channel matching ``predicate`` removed."""
        kept = tuple(c for c in self.channels if not predicate(c))
        return RateTable(kept, self.eps1, self.eps2, self.Omega)

    def with_rate(self, index: int, rate: float) -> "RateTable":
        """Copy with the rate of channel ``index`` replaced."""
        chans = list(self.channels)
        c = chans[index]
        chans[index] = Channel(c.alpha, c.beta, c.k, c.delta, c.amplitude2, rate)
        return RateTable(tuple(chans), self.eps1, self.eps2, self.Omega)


def partial_rates(
    elements: CouplingMatrixElements, sol: FloquetSolution, bath: BathParameters
) -> RateTable:
    """``a_{ab,k} = 2 pi s(Delta_{ab,k}) |S_{ab,k}|^2`` for every non-negligible harmonic."""
    eps = sol.quasienergies
    power = np.abs(elements.amplitudes) ** 2
    floor = NEGLIGIBLE_WEIGHT * power.max() if power.size else 0.0
    channels = []
    for a in range(2):
        for b in range(2):
            for i, k in enumerate(elements.ks):
                w = float(power[a, b, i])
                if w <= floor or w == 0.0:
                    continue
                delta = float(eps[a] - eps[b] + k * sol.Omega)
                rate = 2.0 * np.pi * spectral_s(delta, bath) * w
                channels.append(Channel(a, b, int(k), delta, w, float(rate)))
    return RateTable(tuple(channels), sol.eps1, sol.eps2, sol.Omega)


def _aggregate(table: RateTable, nu, energies: np.ndarray, minus_one: bool = False) -> np.ndarray:
    nu = np.asarray(nu, dtype=float)
    out = np.zeros(nu.shape + (2, 2), dtype=complex)
    if len(table) == 0:
        return out
    x = nu[..., None] * energies
    if minus_one:
        # exp(-ix) - 1 without cancellation
        phase = -2.0 * np.sin(0.5 * x) ** 2 - 1j * np.sin(x)
    else:
        phase = np.exp(-1j * x)
    weighted = phase * table.column("rate")
    idx = table.column("alpha") * 2 + table.column("beta")
    flat = out.reshape(nu.shape + (4,))
    for j in range(4):
        sel = idx == j
        if np.any(sel):
            flat[..., j] = weighted[..., sel].sum(axis=-1)
    return flat.reshape(nu.shape + (2, 2))


def aggregate_nu(table: RateTable, nu) -> np.ndarray:
    """Counting-field dressed rates ``A^nu[alpha, beta] = sum_k exp(-i nu Delta) a``.

    Broadcasts over ``nu``; the result has shape ``nu.shape + (2, 2)``.
    """
    return _aggregate(table, nu, table.column("delta"))


def upsilon(table: RateTable, nu) -> np.ndarray:
    """``A^nu - A`` evaluated without cancellation for small ``nu``."""
    return _aggregate(table, nu, table.column("delta"), minus_one=True)


def periodic_aggregate(table: RateTable, nu) -> np.ndarray:
    """Like :func:`aggregate_nu` with each ``Delta`` replaced by ``k * Omega``.

    The result is ``tau``-periodic in ``nu``; the quasienergy part of the phase is
    factored out.
    """
    return _aggregate(table, nu, table.column("k") * table.Omega)
