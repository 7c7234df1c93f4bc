"""Kinetic Monte Carlo for the exclusion ring and its zero-range image,
an exact stationary-state sampler, and the measured observables.

Replicas are embarrassingly parallel: each owns its configuration and its
random stream (derived from the master seed by splitmix64 on the replica
index), accumulators are merged after the runs, and results are
bit-reproducible for a fixed seed regardless of the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .asymptotics import _transfer_eigensystem
from .errors import DegenerateConfigurationError, DomainError
from .model import Geometry, ModelParams, require_active_ring

__all__ = [
    "RingState",
    "ZrpState",
    "ObservableReport",
    "replica_seed",
    "step_gtasep",
    "step_zrp",
    "run_ensemble",
    "sample_stationary",
    "stationary_ensemble_stats",
    "cluster_decomposition",
    "ring_to_zrp",
    "zrp_to_ring",
    "evenly_spread_ring",
    "single_step_outcome_counts",
]


def replica_seed(master_seed: int, index: int) -> int:
    """Stream seed for replica ``index``: splitmix64 applied to master + index.

    Documented splitting contract: stream_i = splitmix64(master ^ golden*i),
    which keeps streams independent for any replica count.
    """
    mixed = (master_seed ^ (index * int(_kernels.U64_GOLDEN))) % (1 << 64)
    state = np.array([mixed], dtype=np.uint64)
    return int(_kernels.splitmix64_next(state))


@dataclass
class RingState:
    """Occupancy of the exclusion ring plus trajectory counters."""

    occ: np.ndarray          # uint8 occupancy, length L
    time: int = 0
    y_total: int = 0

    @property
    def L(self) -> int:
        return int(self.occ.shape[0])

    @property
    def M(self) -> int:
        return int(self.occ.sum())

    @classmethod
    def from_sites(cls, L: int, occupied: Sequence[int]) -> "RingState":
        occ = np.zeros(L, dtype=np.uint8)
        occ[list(occupied)] = 1
        return cls(occ=occ)


@dataclass
class ZrpState:
    """Occupation numbers of the zero-range lattice plus trajectory counters."""

    occ: np.ndarray          # int64 occupations, length N
    time: int = 0
    y_total: int = 0

    @property
    def N(self) -> int:
        return int(self.occ.shape[0])

    @property
    def M(self) -> int:
        return int(self.occ.sum())


def evenly_spread_ring(L: int, M: int) -> RingState:
    """Ring with M particles placed as evenly as possible."""
    occ = np.zeros(L, dtype=np.uint8)
    if M > 0:
        idx = (np.arange(M) * L) // M
        occ[idx] = 1
    return RingState(occ=occ)


def cluster_decomposition(state: RingState) -> list[int]:
    """Sizes of the maximal occupied runs, wrap-aware; sum equals M.

    A fully occupied ring has no cluster with an empty site ahead and is
    rejected; an empty ring decomposes into no clusters.
    """
    occ = state.occ
    L = state.L
    M = int(occ.sum())
    if M == L and L > 0:
        raise DegenerateConfigurationError("fully occupied ring has no clusters")
    if M == 0:
        return []
    anchor = int(np.argmin(occ))  # first empty site
    sizes = []
    run = 0
    for i in range(1, L + 1):
        if occ[(anchor + i) % L]:
            run += 1
        elif run:
            sizes.append(run)
            run = 0
    if run:
        sizes.append(run)
    return sizes


def ring_to_zrp(state: RingState) -> ZrpState:
    """Map ring occupancy to zero-range occupations (one site per hole).

    Each hole becomes a lattice site carrying the particles of the cluster
    immediately behind it; the correspondence is exact up to ring rotation.
    """
    occ = state.occ
    L = state.L
    if int(occ.sum()) == L:
        raise DegenerateConfigurationError("fully occupied ring has no zero-range image")
    anchor = int(np.argmin(occ))
    sites = []
    run = 0
    for i in range(1, L + 1):
        pos = (anchor + i) % L
        if occ[pos]:
            run += 1
        else:
            sites.append(run)
            run = 0
    return ZrpState(occ=np.array(sites, dtype=np.int64),
                    time=state.time, y_total=state.y_total)


def zrp_to_ring(state: ZrpState) -> RingState:
    """Inverse mapping: each site unfolds to its particles plus one hole."""
    bits: list[int] = []
    for n in state.occ:
        bits.extend([1] * int(n))
        bits.append(0)
    return RingState(occ=np.array(bits, dtype=np.uint8),
                     time=state.time, y_total=state.y_total)


def _float_pm(params: ModelParams) -> tuple[float, float]:
    return float(params.p), float(params.mu)


def step_gtasep(state: RingState, params: ModelParams, rng: np.ndarray) -> tuple[RingState, int]:
    """Advance the ring by one clusterwise update; mutates and returns state.

    ``rng`` is a xoshiro state array from :func:`_kernels.init_rng`.
    """
    require_active_ring(state.M, state.L)
    p, mu = _float_pm(params)
    scratch = np.empty_like(state.occ)
    jumps = int(_kernels.step_ring(state.occ, scratch, p, mu, rng))
    state.time += 1
    state.y_total += jumps
    return state, jumps


def step_zrp(state: ZrpState, params: ModelParams, rng: np.ndarray) -> tuple[ZrpState, int]:
    """Advance the zero-range lattice by one parallel update."""
    if state.N < 1:
        raise DomainError("need at least one site")
    p, mu = _float_pm(params)
    moves = np.empty_like(state.occ)
    jumps = int(_kernels.step_zrp_kernel(state.occ, moves, p, mu, rng))
    state.time += 1
    state.y_total += jumps
    return state, jumps


def single_step_outcome_counts(state: RingState, params: ModelParams, trials: int,
                               seed: int) -> np.ndarray:
    """Jump-count histogram over ``trials`` one-step updates of a frozen state."""
    p, mu = _float_pm(params)
    rng = _kernels.init_rng(np.uint64(seed))
    counts = np.zeros(state.M + 1, dtype=np.int64)
    _kernels.repeat_single_step_outcomes(state.occ, p, mu, rng, trials, counts)
    return counts


@dataclass
class ObservableReport:
    """Ensemble estimates with standard errors plus normalized histograms."""

    L: int
    M: int
    steps: int
    warmup: int
    replicas: int
    seed: int
    thin: int
    j_hat: float = 0.0
    j_stderr: float = 0.0
    delta_hat: float = 0.0
    delta_stderr: float = 0.0
    width_sq: float = 0.0
    width_stderr: float = 0.0
    lags: tuple[int, ...] = ()
    two_point: dict[int, tuple[float, float]] = field(default_factory=dict)
    cluster_hist: np.ndarray = field(default_factory=lambda: np.zeros(0))
    occ_hist: np.ndarray = field(default_factory=lambda: np.zeros(0))
    chi_hist: dict[float, float] = field(default_factory=dict)
    hop_hist: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cluster_samples: int = 0
    snapshot_count: int = 0

    def to_jsonable(self) -> dict:
        return {
            "L": self.L, "M": self.M, "steps": self.steps, "warmup": self.warmup,
            "replicas": self.replicas, "seed": self.seed, "thin": self.thin,
            "j_hat": self.j_hat, "j_stderr": self.j_stderr,
            "delta_hat": self.delta_hat, "delta_stderr": self.delta_stderr,
            "width_sq": self.width_sq, "width_stderr": self.width_stderr,
            "two_point": {str(k): list(v) for k, v in self.two_point.items()},
            "cluster_hist": self.cluster_hist.tolist(),
            "occ_hist": self.occ_hist.tolist(),
            "chi_hist": {str(k): v for k, v in self.chi_hist.items()},
            "hop_hist": self.hop_hist.tolist(),
            "cluster_samples": self.cluster_samples,
            "snapshot_count": self.snapshot_count,
        }


def _jackknife_stderr(values: np.ndarray) -> float:
    """Leave-one-out jackknife standard error of the mean."""
    n = values.size
    if n < 2:
        return math.nan
    total = values.sum()
    loo = (total - values) / (n - 1)
    return math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))


def run_ensemble(
    geometry: Geometry,
    params: ModelParams,
    steps: int,
    replicas: int,
    warmup: int,
    seed: int,
    lags: Sequence[int] = (1, 2, 4, 8, 16, 32),
    thin: int = 100,
    batches: int = 32,
    threads: int = 1,
    initial: RingState | None = None,
) -> ObservableReport:
    """Run ``replicas`` independent trajectories and merge their observables.

    The current estimate is (Y_end - Y_warm)/steps per replica; the diffusion
    estimate uses batch means over ``batches`` disjoint windows per replica
    (window length should comfortably exceed the relaxation scale ~ L^{3/2}),
    with replica scatter quantified by jackknife.
    """
    M, L = geometry.M, geometry.L
    require_active_ring(M, L)
    if steps <= 0 or warmup < 0:
        raise DomainError("need steps > 0 and warmup >= 0")
    if batches < 2:
        raise DomainError("diffusion estimator needs at least two batches")
    p, mu = _float_pm(params)
    lags_arr = np.asarray([k for k in lags if 0 < k < L], dtype=np.int64)
    base = initial if initial is not None else evenly_spread_ring(L, M)

    def one_replica(r: int):
        occ = base.occ.copy()
        rng = _kernels.init_rng(np.uint64(replica_seed(seed, r)))
        cluster_counts = np.zeros(M + 1, dtype=np.int64)
        empty_sites = np.zeros(1, dtype=np.int64)
        hop_counts = np.zeros(M + 1, dtype=np.int64)
        tp_sums = np.zeros(lags_arr.size, dtype=np.float64)
        width_acc = np.zeros(1, dtype=np.float64)
        batch_y = np.zeros(batches, dtype=np.int64)
        y_total, snaps = _kernels.run_ring(
            occ, p, mu, rng, steps, warmup, thin, lags_arr, batches,
            cluster_counts, empty_sites, hop_counts, tp_sums, width_acc, batch_y,
        )
        return (y_total, snaps, cluster_counts, empty_sites[0], hop_counts,
                tp_sums, width_acc[0], batch_y)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_replica, range(replicas)))
    else:
        results = [one_replica(r) for r in range(replicas)]

    batch_len = steps // batches
    j_vals = np.array([res[0] / steps for res in results])
    if batch_len > 0:
        delta_vals = np.array(
            [np.var(res[7], ddof=1) / (M * M * batch_len) for res in results]
        )
    else:
        delta_vals = np.full(replicas, math.nan)
    snaps = sum(res[1] for res in results)
    width_vals = np.array([res[6] / res[1] for res in results]) if snaps else np.zeros(0)

    cluster_counts = sum(res[2] for res in results)
    empty_sites = sum(res[3] for res in results)
    hop_counts = sum(res[4] for res in results)

    c = M / L
    two_point = {}
    if snaps and lags_arr.size:
        tp_by_replica = np.array([res[5] / res[1] for res in results])  # (R, lags)
        for j, k in enumerate(lags_arr):
            vals = tp_by_replica[:, j] - c * c
            two_point[int(k)] = (float(vals.mean()), float(_jackknife_stderr(vals)))

    n_clusters = int(cluster_counts.sum())
    cluster_hist = cluster_counts / n_clusters if n_clusters else cluster_counts * 0.0
    occ_counts = cluster_counts.astype(np.float64).copy()
    occ_counts[0] = empty_sites
    occ_hist = occ_counts / occ_counts.sum() if occ_counts.sum() else occ_counts
    chi_hist = {n / M: float(cluster_hist[n]) for n in range(1, M + 1)
                if cluster_hist[n] > 0}
    hop_hist = hop_counts / hop_counts.sum()

    return ObservableReport(
        L=L, M=M, steps=steps, warmup=warmup, replicas=replicas, seed=seed,
        thin=thin,
        j_hat=float(j_vals.mean()), j_stderr=float(_jackknife_stderr(j_vals)),
        delta_hat=float(delta_vals.mean()),
        delta_stderr=float(_jackknife_stderr(delta_vals)),
        width_sq=float(width_vals.mean()) if width_vals.size else math.nan,
        width_stderr=float(_jackknife_stderr(width_vals)) if width_vals.size else math.nan,
        lags=tuple(int(k) for k in lags_arr),
        two_point=two_point,
        cluster_hist=np.asarray(cluster_hist, dtype=np.float64),
        occ_hist=np.asarray(occ_hist, dtype=np.float64),
        chi_hist=chi_hist,
        hop_hist=np.asarray(hop_hist, dtype=np.float64),
        cluster_samples=n_clusters,
        snapshot_count=snaps,
    )


# ---------------------------------------------------------------------------
# exact stationary sampler (transfer-matrix conditional sweep)
# ---------------------------------------------------------------------------


def _sampler_tables(L: int, params: ModelParams, z: float):
    nu = float(params.nu)
    if nu >= 1:
        raise DomainError("stationary measure needs nu < 1")
    if z <= 0:
        raise DomainError("fugacity must be positive")
    lam1, lam2, v1, v2 = _transfer_eigensystem(z, nu)
    q = lam2 / lam1
    t_matrix = np.array(
        [[1.0, math.sqrt(z * (1 - nu))], [math.sqrt(z * (1 - nu)), z]]
    )
    closures = np.empty((L + 1, 2, 2), dtype=np.float64)
    for j in range(L + 1):
        qj = q ** j
        for a in range(2):
            for b in range(2):
                closures[j, a, b] = v1[a] * v1[b] + qj * v2[a] * v2[b]
    qL = q ** L
    marginal_one = (v1[1] ** 2 + qL * v2[1] ** 2) / (1 + qL)
    return marginal_one, t_matrix, closures


def sample_stationary(L: int, params: ModelParams, z: float, rng: np.ndarray) -> RingState:
    """Draw one exact sample of the grand canonical stationary ring measure.

    The measure weights a configuration by the cyclic product of transfer
    factors T00 = 1, T01 = T10 = sqrt(z(1-nu)), T11 = z.  The first site is
    drawn from its exact marginal, the sweep conditions each next site on the
    partial-product closure back to site one.
    """
    marginal_one, t_matrix, closures = _sampler_tables(L, params, z)
    out = np.empty(L, dtype=np.uint8)
    _kernels.sample_ring_kernel(L, marginal_one, t_matrix, closures, rng, out)
    return RingState(occ=out)


def stationary_ensemble_stats(
    L: int,
    params: ModelParams,
    z: float,
    n_samples: int,
    seed: int,
    lags: Sequence[int] = (1, 2, 4, 8, 16, 32),
) -> dict:
    """Empirical density, covariance and interface width over exact samples.

    Returns means with standard errors over samples; the width estimator
    detrends each sample by its own density, matching the helicoidal height
    mapping h_{i+1} - h_i = 1 - 2 tau_i.
    """
    marginal_one, t_matrix, closures = _sampler_tables(L, params, z)
    rng = _kernels.init_rng(np.uint64(seed))
    lags_arr = np.asarray([k for k in lags if 0 < k < L], dtype=np.int64)
    occ = np.empty(L, dtype=np.uint8)
    dens = np.empty(n_samples)
    prods = np.empty((n_samples, lags_arr.size))
    widths = np.empty(n_samples)
    for s in range(n_samples):
        _kernels.sample_ring_kernel(L, marginal_one, t_matrix, closures, rng, occ)
        tau = occ.astype(np.float64)
        m = tau.mean()
        dens[s] = m
        for j, k in enumerate(lags_arr):
            prods[s, j] = np.mean(tau * np.roll(tau, -int(k)))
        h = np.cumsum(2.0 * (m - tau))
        widths[s] = np.mean((h - h.mean()) ** 2) / L
    rootn = math.sqrt(n_samples)
    # C(k) = <tau tau_k> - <tau>^2 with the ensemble mean; subtracting the
    # per-sample mean instead would bias every lag down by Var(mean).
    # Jackknife over samples handles the nonlinearity in <tau>^2.
    n = n_samples
    cov = {}
    for j, k in enumerate(lags_arr):
        loo_prod = (prods[:, j].sum() - prods[:, j]) / (n - 1)
        loo_dens = (dens.sum() - dens) / (n - 1)
        loo = loo_prod - loo_dens ** 2
        est = prods[:, j].mean() - dens.mean() ** 2
        err = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
        cov[int(k)] = (float(est), float(err))
    return {
        "density": (float(dens.mean()), float(dens.std(ddof=1) / rootn)),
        "cov": cov,
        "width_sq": (float(widths.mean()), float(widths.std(ddof=1) / rootn)),
        "samples": n_samples,
    }
