"""Stochastic unravelling of the tilted population dynamics.

Each channel ``beta -> alpha`` with ``k`` drive quanta is a Poisson clock of rate
``a_{alpha beta, k}``; every firing hands ``-Delta_{alpha beta, k}`` to the bath.
Averaging ``exp(i nu Q)`` over trajectories reproduces ``G(nu, t)``.

Trajectories are simulated in fixed-size shards. Shard ``j`` draws from a PCG64
stream seeded by the ``j``-th child of ``SeedSequence(seed)``, so the ensemble does
not depend on how many worker threads are used.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EventCapError, LatticeViolationError
from .floquet import InitialState
from .rates import RateTable
from .statistics import HeatDistribution

__all__ = ["TrajectoryEnsemble", "sample_heat", "empirical_distribution"]

SHARD_SIZE = 8192
EVENT_CAP = 10**7
LATTICE_TOL = 1e-9


@dataclass(frozen=True)
class TrajectoryEnsemble:
    """Heat ``samples`` at time ``t`` with the integer lattice labels ``(n, m)``."""

    samples: np.ndarray
    n: np.ndarray
    m: np.ndarray
    N: int
    seed: int
    t: float
    Omega: float
    OmegaR: float

    def __post_init__(self):
        for name in ("samples", "n", "m"):
            a = np.asarray(getattr(self, name))
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def mean(self) -> float:
        return float(self.samples.mean())

    def variance(self) -> float:
        return float(self.samples.var(ddof=1))

    def cf(self, nu) -> np.ndarray:
        """Empirical ``<exp(i nu Q)>``."""
        nu = np.asarray(nu, dtype=float)
        return np.exp(1j * nu[..., None] * self.samples).mean(axis=-1)


def _channel_tables(table: RateTable, include_self: bool):
    alpha, beta = table.column("alpha"), table.column("beta")
    k, delta, rate = table.column("k"), table.column("delta"), table.column("rate")
    if np.any(~np.isfinite(rate)) or np.any(rate < 0):
        raise ValueError("partial rates must be finite and non-negative")
    keep = rate > 0
    # k = 0 diagonal channels change neither the state nor the heat
    keep &= ~((alpha == beta) & (k == 0))
    if not include_self:
        keep &= alpha != beta
    out = []
    for b in (0, 1):
        sel = keep & (beta == b)
        r = rate[sel]
        out.append(
            {
                "total": float(r.sum()),
                "cum": np.cumsum(r),
                "alpha": alpha[sel],
                "k": k[sel],
                "heat": -delta[sel],
            }
        )
    return out


def _run_shard(chans, p2: float, t: float, size: int, seq: np.random.SeedSequence):
    rng = np.random.Generator(np.random.PCG64(seq))
    state = (rng.random(size) < p2).astype(np.int64)
    start = state.copy()
    clock = np.zeros(size)
    Q = np.zeros(size)
    n = np.zeros(size, dtype=np.int64)
    events = np.zeros(size, dtype=np.int64)
    active = np.arange(size)
    totals = np.array([chans[0]["total"], chans[1]["total"]])
    while active.size:
        R = totals[state[active]]
        active = active[R > 0]
        R = R[R > 0]
        if not active.size:
            break
        clock[active] += rng.standard_exponential(active.size) / R
        active = active[clock[active] <= t]
        if not active.size:
            break
        u = rng.random(active.size)
        s = state[active]
        for b in (0, 1):
            sel = s == b
            if not np.any(sel):
                continue
            idx = active[sel]
            c = chans[b]
            j = np.searchsorted(c["cum"], u[sel] * c["total"], side="right")
            j = np.minimum(j, len(c["cum"]) - 1)
            Q[idx] += c["heat"][j]
            n[idx] -= c["k"][j]
            state[idx] = c["alpha"][j]
        events[active] += 1
        if events[active].max() > EVENT_CAP:
            raise EventCapError(f"a trajectory exceeded {EVENT_CAP} jumps before t={t}")
    return Q, n, start - state


def sample_heat(
    table: RateTable,
    init: InitialState,
    t: float,
    N: int,
    seed: int,
    threads: int = 1,
    include_self: bool = True,
) -> TrajectoryEnsemble:
    """Gillespie samples of the heat delivered to the bath by time ``t``.

    ``include_self=False`` drops the diagonal channels with ``k != 0``; this exists
    only to demonstrate that they matter.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if t < 0:
        raise ValueError("t must be non-negative")
    chans = _channel_tables(table, include_self)
    sizes = [SHARD_SIZE] * (N // SHARD_SIZE)
    if N % SHARD_SIZE:
        sizes.append(N % SHARD_SIZE)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(chans, init.p2, float(t), s, q) for s, q in zip(sizes, seqs)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda a: _run_shard(*a), jobs))
    else:
        parts = [_run_shard(*a) for a in jobs]
    Q, n, m = (np.concatenate([p[i] for p in parts]) for i in range(3))
    return TrajectoryEnsemble(Q, n, m, int(N), int(seed), float(t), table.Omega, table.OmegaR)


def empirical_distribution(ens: TrajectoryEnsemble) -> HeatDistribution:
    """Snap every sample to the nearest atom ``n Omega + m OmegaR`` and tally.

    Raises:
        LatticeViolationError: if a sample is farther than ``1e-9`` from every atom.
    """
    Q = np.asarray(ens.samples, dtype=float)
    if Q.size == 0:
        raise ValueError("empty ensemble")
    ms = np.array([0, -1, 1])
    cand_n = np.rint((Q[:, None] - ms * ens.OmegaR) / ens.Omega).astype(np.int64)
    err = np.abs(Q[:, None] - cand_n * ens.Omega - ms * ens.OmegaR)
    best = np.argmin(err, axis=1)  # ties resolve to the smallest |m|
    worst = err[np.arange(Q.size), best].max()
    if worst > LATTICE_TOL:
        raise LatticeViolationError(f"sample off the heat lattice by {worst:.3g}")
    n = cand_n[np.arange(Q.size), best]
    m = ms[best]
    keys, counts = np.unique(np.stack([n, m]), axis=1, return_counts=True)
    return HeatDistribution(keys[0], keys[1], counts / Q.size, ens.Omega, ens.OmegaR, ens.t)
