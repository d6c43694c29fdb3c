import math

import numpy as np
import pytest

from coded_relay import mobility


def test_side_of():
    assert mobility.side_of(225) == 15
    with pytest.raises(mobility.MobilityError):
        mobility.side_of(200)


def test_neighbor_table_wraps():
    nbr = mobility.neighbor_table(4)
    # cell (3, 0): i+1 wraps to row 0, j-1 wraps to column 3
    c = 3 * 4 + 0
    assert nbr[c, 0] == 0
    assert nbr[c, 1] == 2 * 4
    assert nbr[c, 2] == 3 * 4 + 1
    assert nbr[c, 3] == 3 * 4 + 3


@pytest.mark.parametrize("L", range(2, 17))
def test_doubly_stochastic(L):
    P = mobility.transition_matrix(L)
    assert np.allclose(P.sum(axis=0), 1)
    assert np.allclose(P.sum(axis=1), 1)


def test_walkers_step_with_explicit_moves():
    w = mobility.init_uniform(9, seed=0)
    w.positions = np.array([0, 4, 8, 0, 0, 0, 0, 0, 0])
    w.step(np.array([0, 1, 2, 3, 0, 0, 0, 0, 0]))
    assert w.positions[:4].tolist() == [3, 1, 6, 2]


def test_uniform_placement_is_uniform():
    w = mobility.init_uniform(225, seed=4)
    counts = np.bincount(np.concatenate([mobility.init_uniform(225, seed=s).positions for s in range(200)]),
                         minlength=225)
    # 200 * 225 draws over 225 cells: each count ~ Poisson(200)
    assert abs(counts.mean() - 200) < 1e-9
    assert counts.std() < 20
    assert w.n == 225


def test_meeting_mean_odd_side():
    st = mobility.meeting_stats(5, 40_000, seed=2)
    assert abs(st.mean - 25) < 4 * st.stderr + 0.2


def test_meeting_mean_even_side_is_half():
    # the relative walk keeps its colour on an even torus, so a meetable
    # pair lives on n/2 cells of the difference chain: E[gap] = n/2
    st = mobility.meeting_stats(4, 40_000, seed=3)
    assert abs(st.mean - 8) < 4 * st.stderr + 0.1


def test_meeting_gaps_discard_first_stretch():
    gaps = mobility.meeting_gaps(3, 1000, seed=1, chains=10)
    assert len(gaps) == 1000
    assert gaps.min() >= 1


def test_mixing_profile_matches_matrix_power():
    P = mobility.transition_matrix(3)
    prof = mobility.mixing_profile(P, 6)
    for t in range(7):
        Pt = np.linalg.matrix_power(P, t)
        assert np.allclose(prof[t], np.abs(Pt - 1 / 9).sum(axis=1))
    assert np.allclose(prof[0], 2 * (1 - 1 / 9))


def test_mixing_time_against_eigen_oracle():
    L = 5
    P = mobility.transition_matrix(L)
    eps = 1 / 25**2
    t = mobility.mixing_time(P, eps)
    Pt = np.linalg.matrix_power(P, t)
    Pt1 = Pt @ P
    assert np.abs(Pt - 1 / 25).sum(axis=1).max() > eps
    assert np.abs(Pt1 - 1 / 25).sum(axis=1).max() <= eps
    # spectral sanity: second eigenvalue modulus of the odd torus walk
    lam = np.sort(np.abs(np.linalg.eigvals(P)))[-2]
    want = max(abs(math.cos(2 * math.pi * a / L) + math.cos(2 * math.pi * b / L)) / 2
               for a in range(L) for b in range(L) if (a, b) != (0, 0))
    assert math.isclose(lam, want, rel_tol=1e-9)


def test_even_side_is_periodic():
    P = mobility.transition_matrix(4)
    assert mobility.is_periodic(P)
    with pytest.raises(mobility.PeriodicChainError):
        mobility.mixing_time(P, 0.01)
    assert not mobility.is_periodic(mobility.transition_matrix(5))


def test_single_cell():
    assert mobility.mixing_time(np.ones((1, 1)), 0.1) == 0


def test_claimed_mixing_interval_values():
    lo, hi = mobility.claimed_mixing_interval(25)
    assert math.isclose(lo, (2 * math.log(25) - 1) / 24)
    assert math.isclose(hi, 3 * math.log(25) / (1 - 1 / 25))


def test_dense_matrix_limit():
    with pytest.raises(mobility.MobilityError):
        mobility.transition_matrix(40)
