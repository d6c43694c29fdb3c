"""Active-cell lattice scheduling under the Protocol model, plus rate constants.

The active cells form a fixed square lattice of spacing
``k = ceil(sqrt(2) (1 + delta)) + 1``; within each active cell holding two or
more nodes one uniformly chosen node sends to one uniformly chosen cellmate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SOURCE, RELAY = 0, 1

DEFAULT_DELTA = math.sqrt(2) - 1
DEFAULT_C0 = 3.0


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    delta: float
    spacing: int
    offsets: tuple[int, int] = (0, 0)

    @property
    def theta_prime(self) -> float:
        return 1.0 / self.spacing**2


def lattice(delta: float = DEFAULT_DELTA, offsets: tuple[int, int] = (0, 0)) -> LatticeSpec:
    if delta < 0:
        raise ScheduleError("Protocol-model guard delta must be >= 0")
    # sqrt(2)*(1 + (sqrt(2)-1)) lands a hair above 2.0 in floating point
    x = math.sqrt(2) * (1 + delta)
    k = math.ceil(x - 1e-12) + 1
    a, b = offsets
    if not (0 <= a < k and 0 <= b < k):
        raise ScheduleError(f"offsets {offsets} outside [0, {k})")
    return LatticeSpec(delta=float(delta), spacing=k, offsets=(a, b))


def active_cells(L: int, spec: LatticeSpec, ragged: bool = False) -> list[tuple[int, int]]:
    """Active cells ``(a + k*u, b + k*w)`` in row-major order.

    With ``ragged=False`` the side must be a multiple of the spacing, so the
    active fraction is exactly ``1/k^2``.  ``ragged=True`` keeps
    ``L // k`` cells per axis instead, which preserves the spacing across
    the wrap-around at the price of a smaller active fraction.
    """
    k = spec.spacing
    if L % k:
        if not ragged:
            raise ScheduleError(f"side {L} is not a multiple of lattice spacing {k}")
        if L < k:
            raise ScheduleError(f"side {L} smaller than lattice spacing {k}")
    per_axis = L // k
    a, b = spec.offsets
    return [(a + k * u, b + k * w) for u in range(per_axis) for w in range(per_axis)]


def active_index(L: int, cells: list[tuple[int, int]]) -> np.ndarray:
    """Flat cell index -> position in ``cells`` (or -1 for inactive cells)."""
    idx = np.full(L * L, -1, dtype=np.int64)
    for r, (i, j) in enumerate(cells):
        idx[i * L + j] = r
    return idx


def torus_linf(L: int, c1: tuple[int, int], c2: tuple[int, int]) -> int:
    di = abs(c1[0] - c2[0]) % L
    dj = abs(c1[1] - c2[1]) % L
    return max(min(di, L - di), min(dj, L - dj))


def min_active_separation(L: int, cells: list[tuple[int, int]]) -> int:
    best = L
    for x in range(len(cells)):
        for y in range(x + 1, len(cells)):
            best = min(best, torus_linf(L, cells[x], cells[y]))
    return best


def check_protocol_model(L: int, spec: LatticeSpec, cells=None, samples: int = 200, seed=0) -> bool:
    """Sample continuous positions and test the interference inequality.

    In each trial every active cell gets a sender and receiver placed
    uniformly inside it (cell edge 1/L on the unit torus); the reception
    test ``|X_w - X_v| >= (1 + delta) |X_u - X_v|`` must hold for every
    receiver v against every other sender w.
    """
    if cells is None:
        cells = active_cells(L, spec)
    if len(cells) < 2:
        return True
    rng = np.random.default_rng(seed)
    d = 1.0 / L
    base = np.array(cells, dtype=float) * d
    for _ in range(samples):
        tx = base + rng.random(base.shape) * d
        rx = base + rng.random(base.shape) * d
        link = np.linalg.norm(tx - rx, axis=1)
        diff = np.abs(tx[None, :, :] - rx[:, None, :])
        diff = np.minimum(diff, 1.0 - diff)
        dist = np.linalg.norm(diff, axis=2)  # dist[v, w] receiver v to sender w
        np.fill_diagonal(dist, np.inf)
        if np.any(dist < (1 + spec.delta) * link[:, None]):
            return False
    return True


def p1(n: int) -> float:
    """Probability that a given cell holds at least two of n uniform nodes."""
    if n < 2:
        raise ScheduleError("p1 needs n >= 2")
    r = 1.0 - 1.0 / n
    return 1.0 - r**n - r ** (n - 1)


P1_LIMIT = 1.0 - 2.0 / math.e


def expected_theta(n: int, delta: float = DEFAULT_DELTA) -> float:
    return lattice(delta).theta_prime * p1(n)


def theta0(delta: float = DEFAULT_DELTA) -> float:
    return lattice(delta).theta_prime * P1_LIMIT


def _check_ps(p_s: float) -> None:
    if not 0.0 < p_s < 1.0:
        raise ScheduleError(f"p_s must lie in (0, 1), got {p_s}")


def p2(n: int, p_s: float, delta: float = DEFAULT_DELTA) -> float:
    """Per-slot probability that a node is the receiver of a relay-role sender."""
    if n < 3:
        raise ScheduleError("p2 needs n >= 3")
    if not 0.0 < p_s <= 1.0:
        raise ScheduleError(f"p_s must lie in (0, 1], got {p_s}")
    return lattice(delta).theta_prime * (1 - p_s) * (n - 2) / (n - 1) * p1(n)


def p2_limit(p_s: float, delta: float = DEFAULT_DELTA) -> float:
    return lattice(delta).theta_prime * (1 - p_s) * P1_LIMIT


def t_s(n: int, p_s: float, delta: float = DEFAULT_DELTA, theta_prime: float | None = None) -> float:
    """Mean slots for a source to emit n versions: n / (p_s theta' p1(n))."""
    if not 0.0 < p_s <= 1.0:
        raise ScheduleError(f"p_s must lie in (0, 1], got {p_s}")
    tp = lattice(delta).theta_prime if theta_prime is None else theta_prime
    return n / (p_s * tp * p1(n))


def c1_window(p_s: float, delta: float = DEFAULT_DELTA, c0: float = DEFAULT_C0) -> tuple[float, float]:
    """Open interval of admissible c1: ((c0 + 1)/(e ln 2), 1/(theta' p_s))."""
    _check_ps(p_s)
    return (c0 + 1) / (math.e * math.log(2)), 1.0 / (lattice(delta).theta_prime * p_s)


def _delta_rhs(p_s, th0, p2lim, c1):
    return p_s * th0 / (1 + th0 * p_s) * p2lim * c1 / (c1 + 1)


def delta_bound(p_s: float, delta: float = DEFAULT_DELTA, c1: float = 4.0, c0: float = DEFAULT_C0,
                rounded: bool = False) -> float:
    """Upper bound on the generation ratio m/n for collection within c1*n slots.

    ``rounded=True`` evaluates with theta_0, p_2 and c1/(c1+1) rounded to four
    decimals, the convention of the published numerical example.
    """
    lo, hi = c1_window(p_s, delta, c0)
    if not lo < c1 < hi:
        raise ScheduleError(f"c1={c1} outside the admissible window ({lo:.4f}, {hi:.4f})")
    return _delta_rhs_conv(p_s, delta, c1, rounded)


def _delta_rhs_conv(p_s, delta, c1, rounded):
    th0 = theta0(delta)
    p2lim = p2_limit(p_s, delta)
    if not rounded:
        return _delta_rhs(p_s, th0, p2lim, c1)
    ratio = round(c1 / (c1 + 1), 4)
    th0, p2lim = round(th0, 4), round(p2lim, 4)
    return p_s * th0 / (1 + th0 * p_s) * p2lim * ratio


def delta_bound_range(p_s: float, delta: float = DEFAULT_DELTA, c0: float = DEFAULT_C0,
                      rounded: bool = False) -> tuple[float, float]:
    """Infimum and supremum of :func:`delta_bound` over the open c1 window."""
    lo, hi = c1_window(p_s, delta, c0)
    return _delta_rhs_conv(p_s, delta, lo, rounded), _delta_rhs_conv(p_s, delta, hi, rounded)


@dataclass(frozen=True)
class RateConstants:
    n: int
    p_s: float
    delta: float
    spacing: int
    theta_prime: float
    p1: float
    expected_theta: float
    theta0: float
    p2_n: float
    p2: float
    t_s: float
    c1_window: tuple[float, float]
    delta_bound_range: tuple[float, float]


def rate_constants(n: int, p_s: float, delta: float = DEFAULT_DELTA, c0: float = DEFAULT_C0,
                   rounded: bool = False) -> RateConstants:
    _check_ps(p_s)
    spec = lattice(delta)
    return RateConstants(
        n=n,
        p_s=p_s,
        delta=delta,
        spacing=spec.spacing,
        theta_prime=spec.theta_prime,
        p1=p1(n),
        expected_theta=expected_theta(n, delta),
        theta0=theta0(delta),
        p2_n=p2(n, p_s, delta),
        p2=p2_limit(p_s, delta),
        t_s=t_s(n, p_s, delta),
        c1_window=c1_window(p_s, delta, c0),
        delta_bound_range=delta_bound_range(p_s, delta, c0, rounded),
    )


class Assignment(NamedTuple):
    cell: int
    sender: int
    receiver: int
    role: int


def occupants_by_cell(positions: np.ndarray, act_idx: np.ndarray, n_active: int) -> list[np.ndarray]:
    """Node ids (ascending) in each active cell, indexed by active-cell rank."""
    rank = act_idx[positions]
    nodes = np.flatnonzero(rank >= 0)
    order = np.argsort(rank[nodes], kind="stable")
    nodes = nodes[order]
    bounds = np.searchsorted(rank[nodes], np.arange(n_active + 1))
    return [nodes[bounds[r] : bounds[r + 1]] for r in range(n_active)]


def pick(occ_count: int, u_send: float, u_recv: float) -> tuple[int, int]:
    """Sender and receiver ranks within a cell's ascending occupant list."""
    s = min(int(u_send * occ_count), occ_count - 1)
    r = min(int(u_recv * (occ_count - 1)), occ_count - 2)
    if r >= s:
        r += 1
    return s, r


def select_transmissions(positions: np.ndarray, cells: list[tuple[int, int]], act_idx: np.ndarray,
                         p_s: float, draws: np.ndarray, L: int) -> list[Assignment]:
    """One slot's assignments given per-active-cell uniforms ``draws[a] = (u_send, u_recv, u_role)``.

    Cells with fewer than two occupants produce nothing; the draws for them
    are consumed anyway so the random stream does not depend on occupancy.
    """
    out = []
    for r, occ in enumerate(occupants_by_cell(positions, act_idx, len(cells))):
        c = len(occ)
        if c < 2:
            continue
        u0, u1, u2 = draws[r]
        s, rr = pick(c, u0, u1)
        i, j = cells[r]
        out.append(Assignment(i * L + j, int(occ[s]), int(occ[rr]), SOURCE if u2 < p_s else RELAY))
    return out


def draw_slot(rng: np.random.Generator, n_active: int) -> np.ndarray:
    return rng.random((n_active, 3))
