import math
from fractions import Fraction

import numpy as np
import pytest

from gtasep import exact, oracle
from gtasep.errors import ResourceCapError
from gtasep.model import derive_params

from conftest import PARAM_GRID


def test_state_count_and_roundtrip():
    space = oracle.StateSpace.build(3, 3)
    assert len(space) == 10  # C(5, 2)
    for i, state in enumerate(space.states):
        assert space.index[state] == i
        assert sum(state) == 3


def test_state_cap():
    with pytest.raises(ResourceCapError):
        oracle.StateSpace.build(40, 10, cap=1000)


def test_column_stochastic_exact(rational_params):
    dm = oracle.build_deformed_matrix(3, 3, rational_params)
    assert all(s == 1 for s in dm.column_sums_exact())
    cols = np.asarray(dm.matrix(gamma=0.0).sum(axis=0)).ravel()
    assert np.allclose(cols, 1.0, atol=1e-14)


def test_matrix_conserves_mass(rational_params):
    dm = oracle.build_deformed_matrix(2, 3, rational_params)
    for tgt, src, _, _ in dm.transitions:
        assert sum(dm.space.states[tgt]) == sum(dm.space.states[src])


def test_two_site_single_particle_eigenvalue():
    # one particle on two sites: Lambda_0 = 1 - p + p e^gamma
    p = Fraction(2, 5)
    params = derive_params(p, Fraction(1, 3))
    dm = oracle.build_deformed_matrix(1, 2, params)
    for gamma in (-0.3, 0.0, 0.4):
        lam = oracle.largest_eigenvalue(dm, gamma=gamma)
        assert lam == pytest.approx(1 - float(p) + float(p) * math.exp(gamma), abs=1e-13)


def test_stationary_matches_product_measure(rational_params):
    for M, N in [(2, 2), (3, 3), (4, 4)]:
        dm = oracle.build_deformed_matrix(M, N, rational_params)
        pi = oracle.stationary_vector(dm)
        pm = oracle.product_measure(dm.space, rational_params)
        assert max(abs(a - float(b)) for a, b in zip(pi, pm)) < 1e-13
        pi_exact = oracle.stationary_vector_exact(dm)
        assert pi_exact == pm


def test_stationary_uniform_at_nu_zero():
    params = derive_params(Fraction(1, 2), Fraction(1, 2))
    dm = oracle.build_deformed_matrix(3, 2, params)
    pm = oracle.product_measure(dm.space, params)
    assert all(w == pm[0] for w in pm)


def test_stationary_shift_invariant(rational_params):
    dm = oracle.build_deformed_matrix(3, 3, rational_params)
    pm = oracle.product_measure(dm.space, rational_params)
    for state, prob in zip(dm.space.states, pm):
        shifted = state[1:] + state[:1]
        assert pm[dm.space.index[shifted]] == prob


def test_perron_root_properties(rational_params):
    dm = oracle.build_deformed_matrix(3, 3, rational_params)
    assert oracle.largest_eigenvalue(dm, gamma=0.0) == pytest.approx(1.0, abs=1e-13)
    gammas = np.linspace(-0.4, 0.4, 9)
    lams = [oracle.largest_eigenvalue(dm, gamma=g) for g in gammas]
    assert all(b > a for a, b in zip(lams, lams[1:]))  # monotone in gamma
    logs = np.log(lams)
    second = logs[2:] - 2 * logs[1:-1] + logs[:-2]
    assert np.all(second > 0)  # convex generating function


@pytest.mark.parametrize("p,mu", PARAM_GRID[:3])
def test_hop_distribution_mean_is_current(p, mu):
    params = derive_params(p, mu)
    for M, N in [(2, 2), (3, 3)]:
        hops = oracle.hop_distribution(M, N, params)
        assert sum(hops) == 1
        assert sum(k * h for k, h in enumerate(hops)) == exact.mean_jumps(M, N, params)


def test_hop_distribution_single_particle():
    p = Fraction(1, 2)
    params = derive_params(p, Fraction(1, 4))
    hops = oracle.hop_distribution(1, 3, params)
    assert hops == [1 - p, p]


def test_cumulants_single_particle():
    p = Fraction(2, 5)
    params = derive_params(p, Fraction(1, 3))
    cums, errs = oracle.cumulants_fd(1, 3, params, order=2)
    assert cums[0] == pytest.approx(float(p), abs=1e-10)
    assert cums[1] == pytest.approx(float(p * (1 - p)), abs=1e-8)


def test_cumulants_match_exact_formulas(rational_params):
    cums, errs = oracle.cumulants_fd(3, 3, rational_params, order=2)
    j = float(exact.mean_jumps(3, 3, rational_params))
    delta = float(exact.diffusion_exact(3, 3, rational_params))
    assert abs(cums[0] - j) < 1e-9
    assert abs(cums[1] / 9 - delta) < 1e-6
    assert errs[0] < 1e-9 and errs[1] < 1e-6


def test_dump_csv_roundtrip(tmp_path, rational_params):
    import csv

    dm = oracle.build_deformed_matrix(2, 2, rational_params)
    mpath = tmp_path / "matrix.csv"
    oracle.dump_matrix_csv(dm, mpath)
    with open(mpath) as fh:
        rows = list(csv.DictReader(fh))
    total = sum(Fraction(r["weight"]) for r in rows if r["source"] == "0")
    assert total == 1
    vpath = tmp_path / "pi.csv"
    oracle.dump_vector_csv(dm.space, oracle.product_measure(dm.space, rational_params), vpath)
    with open(vpath) as fh:
        vrows = list(csv.DictReader(fh))
    assert sum(Fraction(r["value"]) for r in vrows) == 1
