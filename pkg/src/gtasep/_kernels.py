"""Numba kernels for the Monte Carlo engine.

The random stream is an explicit xoshiro256++ state carried in a uint64
array, so trajectories are bit-reproducible regardless of thread scheduling;
replica streams are derived from the master seed with splitmix64 (see
:func:`gtasep.simulate.replica_seed`).

Update kernels never read what they write: cluster decomposition uses the
pre-step occupancy, moves land on a scratch copy.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

U64_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, nogil=True)
def splitmix64_next(state):
    """Advance a 1-element uint64 splitmix64 state and return the output."""
    state[0] += U64_GOLDEN
    z = state[0]
    z = (z ^ (z >> uint64(30))) * _MIX1
    z = (z ^ (z >> uint64(27))) * _MIX2
    return z ^ (z >> uint64(31))


@njit(cache=True, nogil=True)
def init_rng(seed):
    """Four-word xoshiro256++ state seeded through splitmix64."""
    s = np.empty(1, dtype=np.uint64)
    s[0] = seed
    state = np.empty(4, dtype=np.uint64)
    for i in range(4):
        state[i] = splitmix64_next(s)
    return state


@njit(cache=True, nogil=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (uint64(64) - k))


@njit(cache=True, nogil=True, inline="always")
def next_u64(s):
    result = _rotl(s[0] + s[3], uint64(23)) + s[0]
    t = s[1] << uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], uint64(45))
    return result


@njit(cache=True, nogil=True, inline="always")
def next_double(s):
    """Uniform in [0, 1) with 53 random bits."""
    return (next_u64(s) >> uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, nogil=True)
def step_ring(occ, scratch, p, mu, rng):
    """One clusterwise update of the exclusion ring; returns moved particles.

    Scans from just past an anchor hole so no occupied run wraps across the
    scan origin; each pre-step cluster is treated independently: the head
    hops with probability p, then followers join one by one with probability
    mu until a failure or the cluster is exhausted.  The moved leading block
    shifts by one site (two writes per cluster).
    """
    L = occ.shape[0]
    anchor = -1
    for i in range(L):
        if occ[i] == 0:
            anchor = i
            break
    scratch[:] = occ
    jumps = 0
    i = 1
    while i <= L:
        pos = anchor + i
        if pos >= L:
            pos -= L
        if occ[pos] == 1:
            k = 1
            while occ[(pos + k) % L] == 1:
                k += 1
            head = pos + k - 1
            if next_double(rng) < p:
                m = 1
                while m < k and next_double(rng) < mu:
                    m += 1
                scratch[(head + 1) % L] = 1
                scratch[(head - m + 1) % L] = 0
                jumps += m
            i += k + 1
        else:
            i += 1
    occ[:] = scratch
    return jumps


@njit(cache=True, nogil=True)
def step_zrp_kernel(occ, moves, p, mu, rng):
    """One parallel update of the zero-range lattice; returns moved particles.

    Per site: nothing moves with probability 1-p, otherwise a leading block
    of geometric size (success probability mu per extra particle) capped at
    the occupation departs to the next site.
    """
    N = occ.shape[0]
    jumps = 0
    for i in range(N):
        n = occ[i]
        m = 0
        if n > 0 and next_double(rng) < p:
            m = 1
            while m < n and next_double(rng) < mu:
                m += 1
        moves[i] = m
        jumps += m
    carry = moves[N - 1]
    for i in range(N):
        incoming = carry
        carry = moves[i]
        occ[i] += incoming - moves[i]
    return jumps


@njit(cache=True, nogil=True)
def repeat_single_step_outcomes(occ0, p, mu, rng, trials, counts):
    """Histogram of per-step jump counts from a frozen initial ring."""
    occ = occ0.copy()
    scratch = np.empty_like(occ)
    for _ in range(trials):
        occ[:] = occ0
        jumps = step_ring(occ, scratch, p, mu, rng)
        counts[jumps] += 1


@njit(cache=True, nogil=True)
def snapshot_observables(occ, lags, cluster_counts, empty_sites, tp_sums, width_acc):
    """Accumulate cluster sizes, empty zero-range site count, two-point sums
    and the detrended interface width from one configuration."""
    L = occ.shape[0]
    M = 0
    for i in range(L):
        M += occ[i]
    anchor = -1
    for i in range(L):
        if occ[i] == 0:
            anchor = i
            break
    n_clusters = 0
    i = 1
    while i <= L:
        pos = anchor + i
        if pos >= L:
            pos -= L
        if occ[pos] == 1:
            k = 1
            while occ[(pos + k) % L] == 1:
                k += 1
            cluster_counts[k] += 1
            n_clusters += 1
            i += k + 1
        else:
            i += 1
    empty_sites[0] += (L - M) - n_clusters
    for j in range(lags.shape[0]):
        k = lags[j]
        total = 0
        for i in range(L):
            total += occ[i] * occ[(i + k) % L]
        tp_sums[j] += total / L
    # detrended height increments 2(c - tau); per-site mean-square minus mean^2
    c = M / L
    h = 0.0
    h_sum = 0.0
    h_sq = 0.0
    for i in range(L):
        h += 2.0 * (c - occ[i])
        h_sum += h
        h_sq += h * h
    h_bar = h_sum / L
    width_acc[0] += (h_sq / L - h_bar * h_bar) / L
    return n_clusters


@njit(cache=True, nogil=True)
def run_ring(occ, p, mu, rng, steps, warmup, thin, lags, batch_count,
             cluster_counts, empty_sites, hop_counts, tp_sums, width_acc,
             batch_y):
    """Warm up, then run ``steps`` measured updates on one replica.

    Every step feeds the hop histogram and the running jump total; every
    ``thin``-th step takes a configuration snapshot.  ``batch_y[b]`` collects
    the jump total of measurement batch b for the diffusion estimator.
    Returns (y_total, snapshots).
    """
    scratch = np.empty_like(occ)
    for _ in range(warmup):
        step_ring(occ, scratch, p, mu, rng)
    y_total = 0
    snapshots = 0
    batch_len = steps // batch_count
    for t in range(steps):
        jumps = step_ring(occ, scratch, p, mu, rng)
        y_total += jumps
        hop_counts[jumps] += 1
        if batch_len > 0 and t < batch_len * batch_count:
            batch_y[t // batch_len] += jumps
        if thin > 0 and (t + 1) % thin == 0:
            snapshot_observables(occ, lags, cluster_counts, empty_sites,
                                 tp_sums, width_acc)
            snapshots += 1
    return y_total, snapshots


@njit(cache=True, nogil=True)
def run_zrp(occ, p, mu, rng, steps, warmup, hop_counts):
    """Zero-range counterpart of :func:`run_ring` (jump statistics only)."""
    moves = np.empty_like(occ)
    for _ in range(warmup):
        step_zrp_kernel(occ, moves, p, mu, rng)
    y_total = 0
    for _ in range(steps):
        jumps = step_zrp_kernel(occ, moves, p, mu, rng)
        y_total += jumps
        hop_counts[jumps] += 1
    return y_total


@njit(cache=True, nogil=True)
def sample_ring_kernel(L, marginal_one, t_matrix, closures, rng, out):
    """Draw one exact sample of the transfer-matrix stationary measure.

    ``closures[j, s, s1]`` holds (T^j)_{s,s1} / lambda_1^j; the first site is
    drawn from its exact marginal, later sites from the conditional law
    proportional to T[prev, s] * closures[L-u+1, s, tau_1].
    """
    tau1 = 1 if next_double(rng) < marginal_one else 0
    out[0] = tau1
    prev = tau1
    for u in range(2, L + 1):
        w0 = t_matrix[prev, 0] * closures[L - u + 1, 0, tau1]
        w1 = t_matrix[prev, 1] * closures[L - u + 1, 1, tau1]
        s = 1 if next_double(rng) * (w0 + w1) < w1 else 0
        out[u - 1] = s
        prev = s
    return out
