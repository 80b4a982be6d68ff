"""Counting-field tilted population dynamics and the characteristic function.

Under the full secular approximation the Floquet populations obey
``d rho^nu / dt = A(nu) rho^nu`` with

    A(nu) = [[A11^nu - A11 - A21, A12^nu          ],
             [A21^nu,             A22^nu - A22 - A12]]

and the characteristic function of the heat delivered to the bath is
``G(nu, t) = sum(exp(A(nu) t) rho(0))``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeneratorError, NearDefectiveWarning
from .floquet import InitialState
from .rates import RateTable, upsilon

__all__ = [
    "GeneralizedRateMatrix",
    "SpectralDecomposition",
    "tilted_generator",
    "generator_matrix",
    "eigenvalues",
    "xi_plus_local",
    "spectral_decompose",
    "characteristic_function",
    "expm2",
    "dss",
    "propagate_populations",
]

NEAR_DEFECTIVE = 1e-12
# below this |h| / Sigma the eigenvector route loses more accuracy than expm2
ILL_CONDITIONED = 1e-6
TRACK_STEPS = 256


@dataclass(frozen=True)
class GeneralizedRateMatrix:
    matrix: np.ndarray
    nu: float

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def column_sums(self) -> np.ndarray:
        return self.matrix.sum(axis=0)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def generator_matrix(table: RateTable, nu) -> np.ndarray:
    """Vectorised tilted generator, shape ``nu.shape + (2, 2)``."""
    Y = upsilon(table, nu)
    A = table.A
    out = np.empty_like(Y)
    out[..., 0, 0] = Y[..., 0, 0] - A[1, 0]
    out[..., 1, 1] = Y[..., 1, 1] - A[0, 1]
    out[..., 0, 1] = Y[..., 0, 1] + A[0, 1]
    out[..., 1, 0] = Y[..., 1, 0] + A[1, 0]
    return out


def _determinant(table: RateTable, Y: np.ndarray) -> np.ndarray:
    # det A(nu) expanded in Upsilon so that it vanishes smoothly at nu = 0
    A12, A21 = table.A12, table.A21
    y11, y12, y21, y22 = Y[..., 0, 0], Y[..., 0, 1], Y[..., 1, 0], Y[..., 1, 1]
    return y11 * y22 - A12 * y11 - A21 * y22 - A12 * y21 - A21 * y12 - y12 * y21


def _stable_pair(tr, h, det):
    # roots of x^2 - tr x + det with the small one recovered from the product
    p = 0.5 * (tr + h)
    m = 0.5 * (tr - h)
    use_m = np.abs(m) >= np.abs(p)
    with np.errstate(divide="ignore", invalid="ignore"):
        p_alt = np.where(m != 0, det / np.where(m != 0, m, 1), p)
        m_alt = np.where(p != 0, det / np.where(p != 0, p, 1), m)
    return np.where(use_m, m, m_alt), np.where(use_m, p_alt, p)


def tilted_generator(table: RateTable, nu: float) -> GeneralizedRateMatrix:
    return GeneralizedRateMatrix(generator_matrix(table, float(nu)), float(nu))


def _check_gap(table: RateTable) -> float:
    sigma = table.relaxation_rate
    if not sigma > 0:
        raise DegenerateGeneratorError(
            "A12 + A21 = 0: the Floquet states are not connected by any bath transition"
        )
    return sigma


def _discriminant(M: np.ndarray) -> np.ndarray:
    # h^2 = (A11 - A22)^2 + 4 A12 A21; equals Sigma^2 + 4 Upsilon12^(2) for traceless couplings
    return (M[..., 0, 0] - M[..., 1, 1]) ** 2 + 4.0 * M[..., 0, 1] * M[..., 1, 0]


def _reduce(nu: np.ndarray, tau: float) -> np.ndarray:
    # representative in [-tau/2, tau/2)
    return nu - tau * np.floor(nu / tau + 0.5)


def _tracked_h(table: RateTable, nu: np.ndarray) -> np.ndarray:
    """Square root of the discriminant continued from ``h(0) = +Sigma``.

    The continuation runs along ``[0, nu_r]`` where ``nu_r`` is ``nu`` reduced to
    the central period, so the result is exactly ``tau``-periodic.
    """
    sigma = _check_gap(table)
    nu = np.asarray(nu, dtype=float)
    flat = _reduce(nu.ravel(), table.tau)
    out = np.empty(flat.shape, dtype=complex)
    half = table.tau / 2
    for sign in (1.0, -1.0):
        sel = np.nonzero(sign * flat >= 0)[0] if sign > 0 else np.nonzero(flat < 0)[0]
        if sel.size == 0:
            continue
        targets = sign * flat[sel]
        path = np.union1d(np.linspace(0.0, half, TRACK_STEPS + 1), targets)
        roots = np.sqrt(_discriminant(generator_matrix(table, sign * path)))
        h = np.empty_like(roots)
        prev = complex(sigma)
        for i, r in enumerate(roots):
            prev = r if abs(r - prev) <= abs(r + prev) else -r
            h[i] = prev
        out[sel] = h[np.searchsorted(path, targets)]
    return out.reshape(nu.shape)


def eigenvalues(table: RateTable, nu) -> tuple[np.ndarray, np.ndarray]:
    """``(xi_minus, xi_plus)`` of the tilted generator with continuous labelling.

    ``xi_plus`` is the branch through ``xi_plus(0) = 0``. Both are exactly
    ``tau``-periodic in ``nu``.
    """
    nu = np.asarray(nu, dtype=float)
    r = _reduce(nu, table.tau)
    M = generator_matrix(table, r)
    tr = M[..., 0, 0] + M[..., 1, 1]
    h = _tracked_h(table, r)
    return _stable_pair(tr, h, _determinant(table, upsilon(table, r)))


def xi_plus_local(table: RateTable, nu) -> np.ndarray:
    """Dominant eigenvalue near ``nu = 0`` using the principal square root.

    Valid while the discriminant stays close to ``Sigma^2``; no path continuation
    is performed, which makes it cheap enough for finite differencing.
    """
    _check_gap(table)
    Y = upsilon(table, nu)
    M = generator_matrix(table, nu)
    tr = M[..., 0, 0] + M[..., 1, 1]
    h = np.sqrt(_discriminant(M))
    return _stable_pair(tr, h, _determinant(table, Y))[1]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of ``A(nu)`` and the projections of the initial populations.

    Eigenvectors are normalised so that their components sum to one, hence
    ``c_minus + c_plus = 1`` and ``G(nu, t) = c_minus e^{xi_minus t} + c_plus e^{xi_plus t}``.
    The one exception is a traceless eigenvector (``v_minus`` at ``nu = n tau``), which
    is scaled to unit largest component instead; :meth:`cf` handles both cases.
    """

    nu: float
    xi_minus: complex
    xi_plus: complex
    v_minus: np.ndarray
    v_plus: np.ndarray
    c_minus: complex
    c_plus: complex
    h: complex

    def reconstruct(self) -> np.ndarray:
        return self.c_plus * self.v_plus + self.c_minus * self.v_minus

    def cf(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.c_minus * self.v_minus.sum() * np.exp(self.xi_minus * t) + self.c_plus * self.v_plus.sum() * np.exp(
            self.xi_plus * t
        )


def _unit_trace(v: np.ndarray) -> np.ndarray:
    s = v.sum()
    if abs(s) <= 1e-12 * np.abs(v).max():
        return v / v[np.argmax(np.abs(v))]
    return v / s


def spectral_decompose(table: RateTable, nu: float, init: InitialState) -> SpectralDecomposition:
    """Closed-form eigen-decomposition of the 2x2 tilted generator.

    Raises:
        DegenerateGeneratorError: if ``A12 + A21 = 0``.

    Warns:
        NearDefectiveWarning: if ``|h| < 1e-12 * (A12 + A21)``.
    """
    sigma = _check_gap(table)
    nu = float(nu)
    r = _reduce(np.asarray(nu), table.tau)
    M = generator_matrix(table, r)
    h = complex(_tracked_h(table, np.asarray(nu)))
    if abs(h) < NEAR_DEFECTIVE * sigma:
        warnings.warn(
            f"tilted generator is nearly defective at nu={nu:g} (|h|={abs(h):.3g})",
            NearDefectiveWarning,
            stacklevel=2,
        )
    tr = M[0, 0] + M[1, 1]
    d = M[0, 0] - M[1, 1]
    xi_m, xi_p = _stable_pair(tr, h, _determinant(table, upsilon(table, r)))
    # (A - xi) v = 0 with v = (d +- h, 2 A21^nu)
    with np.errstate(divide="ignore", invalid="ignore"):
        vp = _unit_trace(np.array([d + h, 2 * M[1, 0]]))
        vm = _unit_trace(np.array([d - h, 2 * M[1, 0]]))
        rho = init.vector
        det = vp[0] * vm[1] - vp[1] * vm[0]
        c_p = (rho[0] * vm[1] - rho[1] * vm[0]) / det
        c_m = (vp[0] * rho[1] - vp[1] * rho[0]) / det
    return SpectralDecomposition(nu, complex(xi_m), complex(xi_p), vm, vp, complex(c_m), complex(c_p), h)


def expm2(M: np.ndarray, t) -> np.ndarray:
    """``exp(M t)`` for a stack of 2x2 matrices.

    Uses ``exp(M t) = e^{mu t} [cosh(q t) I + sinh(q t)/q (M - mu I)]`` with
    ``mu = tr M / 2`` and ``q^2 = ((M11 - M22)/2)^2 + M12 M21``; both coefficient
    functions are even in ``q``, so the result is valid for defective ``M``.
    """
    M = np.asarray(M, dtype=complex)
    t = np.asarray(t, dtype=float)
    mu = 0.5 * (M[..., 0, 0] + M[..., 1, 1])
    q = np.sqrt(0.25 * (M[..., 0, 0] - M[..., 1, 1]) ** 2 + M[..., 0, 1] * M[..., 1, 0])
    qt = q * t
    ep = np.exp((mu + q) * t)
    em = np.exp((mu - q) * t)
    small = np.abs(qt) < 1e-4
    with np.errstate(divide="ignore", invalid="ignore"):
        sh = np.where(small, 0.0, (ep - em) / (2 * np.where(small, 1.0, q)))
    x2 = qt**2
    sh_small = np.exp(mu * t) * t * (1 + x2 / 6 + x2**2 / 120)
    sh = np.where(small, sh_small, sh)
    ch = 0.5 * (ep + em)
    out = np.empty(np.broadcast(mu, t).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = ch + sh * (M[..., 0, 0] - mu)
    out[..., 1, 1] = ch + sh * (M[..., 1, 1] - mu)
    out[..., 0, 1] = sh * M[..., 0, 1]
    out[..., 1, 0] = sh * M[..., 1, 0]
    return out


def characteristic_function(table: RateTable, init: InitialState, nu, t):
    """``G(nu, t) = <exp(i nu Q)>`` for the heat ``Q`` delivered to the bath.

    Evaluated from the eigen-decomposition; where the generator is close to a
    Jordan block (or an eigenvector has vanishing trace) the exact 2x2 exponential
    is used instead. Broadcasts over ``nu`` and ``t``.
    """
    sigma = _check_gap(table)
    nu_arr = np.asarray(nu, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    nu_b, t_b = np.broadcast_arrays(nu_arr, t_arr)
    M = generator_matrix(table, nu_b)
    tr = M[..., 0, 0] + M[..., 1, 1]
    d = M[..., 0, 0] - M[..., 1, 1]
    h = np.sqrt(_discriminant(M))
    xi_m, xi_p = 0.5 * (tr - h), 0.5 * (tr + h)
    np_ = d + h + 2 * M[..., 1, 0]
    nm_ = d - h + 2 * M[..., 1, 0]
    floor = ILL_CONDITIONED * sigma
    ok = (np.abs(h) >= floor) & (np.abs(np_) > floor) & (np.abs(nm_) > floor)
    rho1, rho2 = init.p1, init.p2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vp0 = (d + h) / np_
        vp1 = 2 * M[..., 1, 0] / np_
        vm0 = (d - h) / nm_
        vm1 = 2 * M[..., 1, 0] / nm_
        det = vp0 * vm1 - vp1 * vm0
        c_p = (rho1 * vm1 - rho2 * vm0) / det
        c_m = (vp0 * rho2 - vp1 * rho1) / det
        G = c_m * np.exp(xi_m * t_b) + c_p * np.exp(xi_p * t_b)
    if not np.all(ok):
        E = expm2(M[~ok], t_b[~ok])
        G = np.array(G, dtype=complex)
        G[~ok] = (E[..., 0, 0] + E[..., 1, 0]) * rho1 + (E[..., 0, 1] + E[..., 1, 1]) * rho2
    return G if np.ndim(G) else complex(G)


def dss(table: RateTable) -> InitialState:
    """Dynamical steady state of the population master equation."""
    sigma = _check_gap(table)
    return InitialState(table.A12 / sigma, table.A21 / sigma)


def propagate_populations(table: RateTable, init: InitialState, t: float) -> InitialState:
    """Exact solution of the untilted two-state rate equation at time ``t``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    sigma = table.relaxation_rate
    if sigma == 0:
        return init
    z_st = (table.A21 - table.A12) / sigma
    z = z_st + (init.z - z_st) * np.exp(-sigma * t)
    p1 = float(np.clip(0.5 * (1 - z), 0.0, 1.0))
    return InitialState(p1, 1.0 - p1)
