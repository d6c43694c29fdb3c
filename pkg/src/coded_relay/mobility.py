"""Random-walk mobility on the L x L torus of cells.

Cells are addressed either as ``(i, j)`` or by the flat index ``i * L + j``.
Each slot every node moves to one of its four torus neighbours with equal
probability; direction codes are 0: i+1, 1: i-1, 2: j+1, 3: j-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class MobilityError(ValueError):
    pass


class PeriodicChainError(MobilityError):
    """The single-walker chain on an even torus never mixes."""


class NotMixed(MobilityError):
    pass


def side_of(n: int) -> int:
    L = math.isqrt(n)
    if n < 1 or L * L != n:
        raise MobilityError(f"node count {n} is not a perfect square")
    return L


@dataclass(frozen=True)
class TorusGrid:
    side: int

    @property
    def n(self) -> int:
        return self.side * self.side

    def cell(self, index: int) -> tuple[int, int]:
        return divmod(int(index), self.side)

    def index(self, i: int, j: int) -> int:
        return (i % self.side) * self.side + (j % self.side)


def neighbor_table(L: int) -> np.ndarray:
    """``table[c, d]`` is the flat index reached from cell ``c`` by direction ``d``."""
    c = np.arange(L * L)
    i, j = divmod(c, L)
    return np.stack(
        [
            ((i + 1) % L) * L + j,
            ((i - 1) % L) * L + j,
            i * L + (j + 1) % L,
            i * L + (j - 1) % L,
        ],
        axis=1,
    ).astype(np.int64)


class Walkers:
    """Positions of n nodes on the torus plus the random stream that moves them."""

    def __init__(self, grid: TorusGrid, positions: np.ndarray, rng: np.random.Generator):
        self.grid = grid
        self.positions = np.asarray(positions, dtype=np.int64)
        self.rng = rng
        self._nbr = neighbor_table(grid.side)

    @property
    def n(self) -> int:
        return len(self.positions)

    def cells(self) -> list[tuple[int, int]]:
        return [self.grid.cell(c) for c in self.positions]

    def step(self, moves: np.ndarray | None = None) -> "Walkers":
        """Move every node one slot; ``moves`` overrides the random directions."""
        if moves is None:
            moves = self.rng.integers(0, 4, size=self.n)
        self.positions = self._nbr[self.positions, moves]
        return self


def init_uniform(n: int, seed=None, rng: np.random.Generator | None = None) -> Walkers:
    """Place n nodes independently and uniformly over the n cells."""
    grid = TorusGrid(side_of(n))
    if rng is None:
        rng = np.random.default_rng(seed)
    positions = rng.integers(0, grid.n, size=n)
    return Walkers(grid, positions, rng)


@dataclass(frozen=True)
class MeetingStats:
    samples: int
    mean: float
    variance: float

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.samples)


def meeting_gaps(L: int, max_meetings: int, seed=None, chains: int = 512) -> np.ndarray:
    """Inter-meeting gaps of independent walker pairs started from the uniform law.

    ``chains`` pairs are advanced in lockstep; each contributes gaps between
    its successive co-location slots until ``max_meetings`` gaps are
    collected in total.  The stretch before a pair's first meeting is not a
    gap and is discarded.  Every pair stops at a fixed gap count rather than
    a fixed time, which keeps the sample free of length bias.
    """
    if L < 2:
        raise MobilityError("meeting statistics need L >= 2")
    rng = np.random.default_rng(seed)
    n = L * L
    nbr = neighbor_table(L)
    chains = max(1, min(chains, max_meetings))
    quota = np.full(chains, max_meetings // chains, dtype=np.int64)
    quota[: max_meetings % chains] += 1
    a = rng.integers(0, n, size=chains)
    b = rng.integers(0, n, size=chains)
    if L % 2 == 0:
        # both walkers flip the parity of i+j every step, so a pair whose
        # colours differ never meets; condition on the pairs that can
        pa = (a // L + a % L) % 2
        pb = (b // L + b % L) % 2
        bad = pa != pb
        # shifting j by one flips the colour and keeps b uniform on its class
        b[bad] = (b[bad] // L) * L + (b[bad] % L + 1) % L
    last = np.full(chains, -1, dtype=np.int64)
    got = np.zeros(chains, dtype=np.int64)
    alive = np.arange(chains)
    out = []
    t = 0
    while alive.size:
        t += 1
        k = alive.size
        a[alive] = nbr[a[alive], rng.integers(0, 4, size=k)]
        b[alive] = nbr[b[alive], rng.integers(0, 4, size=k)]
        hit = alive[a[alive] == b[alive]]
        if hit.size:
            seen = hit[last[hit] >= 0]
            if seen.size:
                out.append(t - last[seen])
                got[seen] += 1
            last[hit] = t
            alive = alive[got[alive] < quota[alive]]
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def meeting_stats(L: int, max_meetings: int, seed=None, chains: int = 512) -> MeetingStats:
    gaps = meeting_gaps(L, max_meetings, seed=seed, chains=chains)
    return MeetingStats(samples=len(gaps), mean=float(gaps.mean()), variance=float(gaps.var(ddof=1)))


def transition_matrix(L: int, max_side: int = 32) -> np.ndarray:
    """Dense n x n transition matrix of the single-walker chain."""
    if L < 1:
        raise MobilityError("side must be >= 1")
    if L > max_side:
        raise MobilityError(f"L={L} too large for a dense matrix (max {max_side})")
    n = L * L
    P = np.zeros((n, n))
    nbr = neighbor_table(L)
    for d in range(4):
        np.add.at(P, (np.arange(n), nbr[:, d]), 0.25)
    return P


def mixing_profile(P: np.ndarray, t_max: int) -> np.ndarray:
    """``out[t, i] = sum_j |P^t_ij - 1/n|`` for t = 0..t_max."""
    n = P.shape[0]
    out = np.empty((t_max + 1, n))
    Pt = np.eye(n)
    for t in range(t_max + 1):
        out[t] = np.abs(Pt - 1.0 / n).sum(axis=1)
        Pt = Pt @ P
    return out


def is_periodic(P: np.ndarray) -> bool:
    """True when the chain is bipartite (period 2), as on an even torus."""
    n = P.shape[0]
    colour = np.full(n, -1)
    colour[0] = 0
    stack = [0]
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(P[i] > 0):
            if colour[j] < 0:
                colour[j] = 1 - colour[i]
                stack.append(j)
            elif colour[j] == colour[i]:
                return False
    return True


def mixing_time(P: np.ndarray, eps: float, cutoff: int = 100_000) -> int:
    """Smallest t with Delta_i(t') <= eps for every row i and every t' > t.

    Delta is evaluated by exact matrix powers; once the sup over rows drops
    below eps and the chain has a spectral gap, it decays geometrically, so
    the first such crossing followed by a monotone tail is final.  Raises
    :class:`NotMixed` if no crossing happens before ``cutoff``.
    """
    n = P.shape[0]
    if n == 1:
        return 0
    if is_periodic(P):
        raise PeriodicChainError("chain is periodic (even torus side); Delta does not converge")
    Pt = np.eye(n)
    last_bad = 0
    t = 0
    below_run = 0
    while t <= cutoff:
        sup = np.abs(Pt - 1.0 / n).sum(axis=1).max()
        if sup > eps:
            last_bad = t
            below_run = 0
        else:
            below_run += 1
            # Delta is nonincreasing in t, so a crossing is final; the run check guards round-off
            if below_run >= 8:
                return last_bad
        Pt = Pt @ P
        t += 1
    raise NotMixed(f"sup Delta(t) still above {eps} at cutoff {cutoff}")


def claimed_mixing_interval(n: int) -> tuple[float, float]:
    """The claimed bounds on T_mix(P, 1/n^2) for the torus walk (natural log)."""
    ln = math.log(n)
    return (2 * ln - 1) / (n - 1), 3 * ln / (1 - 1 / n)
