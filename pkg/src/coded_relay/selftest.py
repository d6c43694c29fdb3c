"""Fast exhaustive consistency suites run by ``coded-relay selftest``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import gf, mobility, rs, scheduler


@dataclass
class SuiteResult:
    name: str
    checks: int
    failures: int
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.failures == 0


def field_axioms(s: int, modulus: int | None = None) -> tuple[int, int]:
    """(checks, failures) for associativity, distributivity and inverses.

    The table-driven product is compared with carryless reduction as well,
    so a bad modulus shows up even when the tables themselves are built.
    """
    modulus = gf.MODULI[s] if modulus is None else modulus
    try:
        f = gf.field_from_modulus(modulus)
    except gf.FieldError:
        return 1, 1
    q = f.q
    els = np.arange(q)
    M = np.array([[gf.mul(f, a, b) for b in range(q)] for a in range(q)])
    ref = np.array([[gf.clmul_mod(a, b, modulus) for b in range(q)] for a in range(q)])
    checks = q * q
    fails = int((M != ref).sum())
    # (ab)c == a(bc) and a(b+c) == ab + ac for every triple
    for a in range(q):
        ab = M[a]  # ab[b]
        lhs = M[ab[:, None], els[None, :]]  # (ab)c
        rhs = M[a][M]  # a(bc)
        fails += int((lhs != rhs).sum())
        dl = M[a][els[:, None] ^ els[None, :]]
        dr = ab[:, None] ^ ab[None, :]
        fails += int((dl != dr).sum())
        checks += 2 * q * q
    for a in range(1, q):
        checks += 1
        try:
            if gf.mul(f, a, gf.inv(f, a)) != 1:
                fails += 1
        except ZeroDivisionError:
            fails += 1
    checks += 1
    if not gf.is_irreducible(modulus):
        fails += 1
    return checks, fails


def rs_roundtrip(n: int, m: int, field=None) -> tuple[int, int]:
    """Every payload, every m-subset of versions decodes back."""
    code = rs.code_new(m, n, field)
    q = code.field.q
    checks = fails = 0
    subsets = list(itertools.combinations(range(1, n + 1), m))
    for payload in itertools.product(range(q), repeat=m):
        word = rs.encode(code, payload)
        for sub in subsets:
            checks += 1
            if rs.decode(code, {k: word[k - 1] for k in sub}) != list(payload):
                fails += 1
    return checks, fails


def rs_min_distance(n: int, m: int, field=None) -> int:
    code = rs.code_new(m, n, field)
    q = code.field.q
    best = n + 1
    for payload in itertools.product(range(q), repeat=m):
        if any(payload):
            best = min(best, rs.hamming_weight(rs.encode(code, payload)))
    return best


def mobility_checks(max_side: int = 16) -> tuple[int, int]:
    checks = fails = 0
    for L in range(2, max_side + 1):
        P = mobility.transition_matrix(L)
        checks += 2
        fails += int(not np.allclose(P.sum(axis=1), 1.0))
        fails += int(not np.allclose(P.sum(axis=0), 1.0))
        # Kac: the uniform law is stationary, so the mean return time is n
        pi = np.full(L * L, 1.0 / (L * L))
        checks += 1
        fails += int(not np.allclose(pi @ P, pi))
    return checks, fails


def kac_return_time(L: int = 3, walks: int = 20000, seed: int = 7) -> float:
    """Monte Carlo mean return time of one walker to its start cell."""
    rng = np.random.default_rng(seed)
    nbr = mobility.neighbor_table(L)
    pos = np.zeros(walks, dtype=np.int64)
    steps = np.zeros(walks, dtype=np.int64)
    alive = np.arange(walks)
    while alive.size:
        pos[alive] = nbr[pos[alive], rng.integers(0, 4, size=alive.size)]
        steps[alive] += 1
        alive = alive[pos[alive] != 0]
    return float(steps.mean())


def lattice_checks(sides=(3, 6, 9, 12, 15, 21)) -> tuple[int, int]:
    spec = scheduler.lattice()
    checks = fails = 0
    for L in sides:
        cells = scheduler.active_cells(L, spec)
        checks += 3
        fails += int(len(cells) != (L // spec.spacing) ** 2)
        if len(cells) > 1:
            fails += int(scheduler.min_active_separation(L, cells) < spec.spacing)
        fails += int(not scheduler.check_protocol_model(L, spec, cells, samples=50, seed=L))
    return checks, fails


def run_all(moduli: dict[int, int] | None = None) -> list[SuiteResult]:
    moduli = moduli or {}
    out = []
    c = f = 0
    for s in (1, 2, 3, 4):
        cc, ff = field_axioms(s, moduli.get(s))
        c += cc
        f += ff
    out.append(SuiteResult("gf-axioms", c, f, "s=1..4 exhaustive"))

    c = f = 0
    for n, m in ((8, 1), (8, 2), (8, 3), (5, 3)):
        try:
            field = gf.field_from_modulus(moduli[3]) if 3 in moduli else None
            cc, ff = rs_roundtrip(n, m, field)
        except gf.FieldError:
            cc, ff = 1, 1
        c += cc
        f += ff
    for n, m in ((6, 2), (6, 3), (5, 2)):
        c += 1
        f += int(rs_min_distance(n, m) != n - m + 1)
    out.append(SuiteResult("rs-roundtrip", c, f, "GF(8) all payloads and subsets, MDS distance"))

    c, f = mobility_checks()
    kac = kac_return_time()
    c += 1
    f += int(abs(kac - 9) > 0.3)
    out.append(SuiteResult("mobility", c, f, f"doubly stochastic L<=16, Kac return L=3: {kac:.3f}"))

    c, f = lattice_checks()
    out.append(SuiteResult("lattice", c, f, "spacing and protocol-model separation"))
    return out
