import math

import numpy as np
import pytest

from coded_relay import mobility, scheduler
from coded_relay.scheduler import DEFAULT_DELTA


def p1_binomial(n):
    # P(Binomial(n, 1/n) >= 2) from the pmf
    p = 1 / n
    return 1 - sum(math.comb(n, j) * p**j * (1 - p) ** (n - j) for j in (0, 1))


def test_spacing_default_is_three():
    spec = scheduler.lattice()
    assert spec.spacing == 3
    assert spec.theta_prime == pytest.approx(1 / 9)


@pytest.mark.parametrize("delta,k", [(0.0, 3), (0.5, 4), (1.0, 4), (1.2, 5)])
def test_spacing_other_guards(delta, k):
    assert scheduler.lattice(delta).spacing == k


def test_active_cells_and_index():
    spec = scheduler.lattice()
    cells = scheduler.active_cells(15, spec)
    assert len(cells) == 25
    assert cells[:2] == [(0, 0), (0, 3)]
    idx = scheduler.active_index(15, cells)
    assert (idx >= 0).sum() == 25
    assert idx[3] == 1
    with pytest.raises(scheduler.ScheduleError):
        scheduler.active_cells(7, spec)
    assert len(scheduler.active_cells(7, spec, ragged=True)) == 4


def test_separation_and_protocol_model():
    spec = scheduler.lattice()
    for L in (6, 9, 15):
        cells = scheduler.active_cells(L, spec)
        if len(cells) > 1:
            assert scheduler.min_active_separation(L, cells) == 3
        assert scheduler.check_protocol_model(L, spec, cells, samples=100, seed=1)
    # a spacing-2 lattice violates the guard somewhere
    tight = scheduler.LatticeSpec(delta=DEFAULT_DELTA, spacing=2)
    cells = [(2 * u, 2 * w) for u in range(3) for w in range(3)]
    assert not scheduler.check_protocol_model(6, tight, cells, samples=200, seed=1)


def test_torus_linf():
    assert scheduler.torus_linf(15, (0, 0), (14, 3)) == 3
    assert scheduler.torus_linf(15, (0, 0), (7, 8)) == 7


@pytest.mark.parametrize("n", [4, 9, 49, 225, 441])
def test_p1_against_binomial(n):
    assert scheduler.p1(n) == pytest.approx(p1_binomial(n), rel=1e-12)


def test_p1_n4_and_limit():
    assert scheduler.p1(4) == pytest.approx(0.261719, abs=5e-7)
    assert scheduler.p1(10**6) == pytest.approx(1 - 2 / math.e, abs=1e-6)


def test_rate_constants_n225():
    # theta0 and p2 as printed to four decimals
    assert round(scheduler.theta0(), 4) == 0.0294
    assert round(scheduler.p2_limit(0.5), 4) == 0.0147
    assert scheduler.expected_theta(225) == pytest.approx(p1_binomial(225) / 9)
    assert scheduler.p2(225, 0.5) == pytest.approx(p1_binomial(225) / 9 * 0.5 * 223 / 224)
    assert scheduler.t_s(225, 0.5) == pytest.approx(225 / (0.5 / 9 * p1_binomial(225)))


def test_c1_window():
    lo, hi = scheduler.c1_window(0.5)
    assert lo == pytest.approx(4 / (math.e * math.log(2)))
    assert round(lo, 3) == 2.123
    assert hi == pytest.approx(18)
    with pytest.raises(scheduler.ScheduleError):
        scheduler.delta_bound(0.5, c1=18)
    with pytest.raises(scheduler.ScheduleError):
        scheduler.delta_bound(0.5, c1=2.0)
    assert scheduler.delta_bound(0.5, c1=10) > 0


def test_delta_bound_formula():
    th0 = (1 - 2 / math.e) / 9
    p2 = th0 * 0.5
    c1 = 10.0
    want = 0.5 * th0 / (1 + 0.5 * th0) * p2 * c1 / (c1 + 1)
    assert scheduler.delta_bound(0.5, c1=c1) == pytest.approx(want, rel=1e-12)
    lo, hi = scheduler.delta_bound_range(0.5, rounded=True)
    assert f"{hi:.4e}" == "2.0176e-04"
    assert lo < hi


def test_pick_uniform():
    # every (sender, receiver) ordered pair of distinct ranks equally likely
    c = 4
    grid = np.linspace(0, 1, 400, endpoint=False) + 1 / 800
    counts = np.zeros((c, c))
    for u0 in grid:
        for u1 in grid:
            s, r = scheduler.pick(c, u0, u1)
            counts[s, r] += 1
    assert np.all(np.diag(counts) == 0)
    off = counts[~np.eye(c, dtype=bool)]
    assert off.max() - off.min() <= 400


def test_select_transmissions():
    L = 6
    cells = scheduler.active_cells(L, scheduler.lattice())
    idx = scheduler.active_index(L, cells)
    pos = np.array([0, 0, 0, 3, 21, 21, 1])
    draws = np.zeros((len(cells), 3))
    draws[:, 2] = 0.9
    out = scheduler.select_transmissions(pos, cells, idx, 0.5, draws, L)
    assert [(a.cell, a.sender, a.receiver, a.role) for a in out] == [(0, 0, 1, 1), (21, 4, 5, 1)]


def test_monte_carlo_rate_small():
    # share of active cells with >= 2 nodes tracks p1
    rng = np.random.default_rng(0)
    L, n = 9, 81
    cells = scheduler.active_cells(L, scheduler.lattice())
    idx = scheduler.active_index(L, cells)
    hits = 0
    slots = 4000
    for _ in range(slots):
        pos = rng.integers(0, n, size=n)
        hits += sum(len(o) >= 2 for o in scheduler.occupants_by_cell(pos, idx, len(cells)))
    frac = hits / (slots * n)
    assert frac == pytest.approx(scheduler.expected_theta(n), rel=0.03)


def test_rejects_bad_ps():
    with pytest.raises(scheduler.ScheduleError):
        scheduler.c1_window(0.0)
    with pytest.raises(scheduler.ScheduleError):
        scheduler.lattice(-1)
    assert mobility.side_of(9) == 3
