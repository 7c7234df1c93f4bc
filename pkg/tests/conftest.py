"""Shared fixtures and independent test oracles.

The ring-dynamics oracle here enumerates exclusion configurations directly
and builds the one-step transition matrix from the per-cluster outcome law;
it shares no code with the package's update kernel or its zero-range oracle,
so agreement is meaningful.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from gtasep.model import ModelParams, derive_params


@pytest.fixture(scope="session")
def rational_params() -> ModelParams:
    return derive_params(Fraction(1, 2), Fraction(1, 4))


PARAM_GRID = [
    (Fraction(1, 4), Fraction(0)),
    (Fraction(1, 2), Fraction(1, 4)),
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(3, 4), Fraction(1, 2)),
    (Fraction(1, 2), Fraction(9, 10)),
]


def ring_configs(L: int, M: int) -> list[tuple[int, ...]]:
    """All occupancy tuples with M particles on L sites."""
    out = []
    for sites in combinations(range(L), M):
        occ = [0] * L
        for s in sites:
            occ[s] = 1
        out.append(tuple(occ))
    return out


def ring_clusters(occ: tuple[int, ...]) -> list[tuple[int, int]]:
    """(head, size) of each maximal occupied run, wrap-aware."""
    L = len(occ)
    if all(occ) or not any(occ):
        return []
    anchor = occ.index(0)
    clusters = []
    run = 0
    for i in range(1, L + 1):
        pos = (anchor + i) % L
        if occ[pos]:
            run += 1
        elif run:
            clusters.append(((pos - 1) % L, run))
            run = 0
    return clusters


def _outcome_prob(m: int, k: int, p: Fraction, mu: Fraction) -> Fraction:
    if m == 0:
        return 1 - p
    if m < k:
        return p * mu ** (m - 1) * (1 - mu)
    return p * mu ** (k - 1)


def ring_transition_matrix(L: int, M: int, params: ModelParams):
    """Exact one-step matrix of the clusterwise ring dynamics (columns=source).

    Returns (configs, index, matrix, jump_matrix) with exact Fraction entries;
    jump_matrix[i][j] is the expected-jumps-weighted entry used for currents.
    """
    p, mu = Fraction(params.p), Fraction(params.mu)
    configs = ring_configs(L, M)
    index = {cfg: i for i, cfg in enumerate(configs)}
    n = len(configs)
    mat = [[Fraction(0)] * n for _ in range(n)]
    jumps_exp = [Fraction(0)] * n

    def apply_moves(occ, moves, clusters):
        new = list(occ)
        for (head, size), m in zip(clusters, moves):
            if m > 0:
                new[(head + 1) % L] = 1
                new[(head - m + 1) % L] = 0
        return tuple(new)

    for j, occ in enumerate(configs):
        clusters = ring_clusters(occ)
        moves = [0] * len(clusters)

        def rec(idx, prob):
            if idx == len(clusters):
                target = apply_moves(occ, moves, clusters)
                mat[index[target]][j] += prob
                jumps_exp[j] += prob * sum(moves)
                return
            _, size = clusters[idx]
            for m in range(size + 1):
                moves[idx] = m
                rec(idx + 1, prob * _outcome_prob(m, size, p, mu))

        rec(0, Fraction(1))
    return configs, index, mat, jumps_exp


def ring_stationary_exact(L: int, M: int, params: ModelParams):
    """Stationary law of the ring dynamics via the cluster-weight ansatz,
    verified against the transition matrix before being returned."""
    configs, index, mat, jumps_exp = ring_transition_matrix(L, M, params)
    nu = Fraction(params.nu)
    weights = [(1 - nu) ** len(ring_clusters(cfg)) for cfg in configs]
    total = sum(weights)
    pi = [w / total for w in weights]
    # stationarity check: pi must be a fixed point of the matrix
    for i in range(len(configs)):
        flow = sum(mat[i][j] * pi[j] for j in range(len(configs)))
        assert flow == pi[i], "cluster-weight ansatz is not stationary"
    j_exact = sum(jumps_exp[j] * pi[j] for j in range(len(configs)))
    return configs, index, pi, j_exact
