"""Arithmetic in binary extension fields GF(2^s), 1 <= s <= 16.

Elements are plain Python ints in ``[0, q)``.  One irreducible modulus is
shipped per degree (the numerically smallest irreducible polynomial with a
nonzero constant term), so every run is bit-reproducible:

====  ===========  ===========================
 s     modulus      polynomial
====  ===========  ===========================
 1     0x3          x + 1
 2     0x7          x^2 + x + 1
 3     0xb          x^3 + x + 1
 4     0x13         x^4 + x + 1
 5     0x25         x^5 + x^2 + 1
 6     0x43         x^6 + x + 1
 7     0x83         x^7 + x + 1
 8     0x11b        x^8 + x^4 + x^3 + x + 1
 9     0x203        x^9 + x + 1
 10    0x409        x^10 + x^3 + 1
 11    0x805        x^11 + x^2 + 1
 12    0x1009       x^12 + x^3 + 1
 13    0x201b       x^13 + x^4 + x^3 + x + 1
 14    0x4021       x^14 + x^5 + 1
 15    0x8003       x^15 + x + 1
 16    0x1002b      x^16 + x^5 + x^3 + x + 1
====  ===========  ===========================

Multiplication goes through exp/log tables built from a generator of the
multiplicative group; the tables are checked against the carryless
multiply-then-reduce definition (:func:`clmul_mod`) by the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_DEGREE = 16

MODULI = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
}


class FieldError(ValueError):
    """Raised for invalid field parameters or arithmetic (division by zero)."""


def poly_mod(a: int, b: int) -> int:
    """Remainder of GF(2)[x] polynomial ``a`` modulo ``b`` (bit patterns)."""
    if b == 0:
        raise FieldError("polynomial modulus is zero")
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Exhaustive trial division by every polynomial of degree <= deg/2."""
    s = poly.bit_length() - 1
    if s < 1:
        return False
    for d in range(1, s // 2 + 1):
        for f in range(1 << d, 1 << (d + 1)):
            if poly_mod(poly, f) == 0:
                return False
    return True


def clmul_mod(a: int, b: int, modulus: int) -> int:
    """Carryless product of ``a`` and ``b`` reduced modulo ``modulus``.

    This is the defining operation; the table-driven :func:`mul` must agree
    with it everywhere.
    """
    s = modulus.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> s & 1:
            a ^= modulus
    return r


@dataclass(frozen=True)
class FieldSpec:
    s: int
    q: int
    modulus: int
    exp: np.ndarray = field(repr=False, compare=False)
    log: np.ndarray = field(repr=False, compare=False)


def _build_tables(s: int, modulus: int) -> tuple[np.ndarray, np.ndarray]:
    q = 1 << s
    exp = np.zeros(2 * q, dtype=np.int64)
    log = np.full(q, -1, dtype=np.int64)
    if q == 2:
        exp[:] = 1
        log[1] = 0
        return exp, log
    # find the smallest generator of the multiplicative group
    for g in range(2, q):
        x = 1
        seen = 0
        for i in range(q - 1):
            exp[i] = x
            if log[x] != -1:
                break
            log[x] = i
            seen += 1
            x = clmul_mod(x, g, modulus)
        if seen == q - 1:
            break
        log[:] = -1
    else:
        raise FieldError(f"modulus {modulus:#x} has no generator; not irreducible?")
    exp[q - 1 : 2 * q - 2] = exp[: q - 1]
    exp[2 * q - 2 :] = exp[: 2]
    exp.setflags(write=False)
    log.setflags(write=False)
    return exp, log


def field_from_modulus(modulus: int) -> FieldSpec:
    """Build a field for an explicit modulus (used for fault injection and tests)."""
    s = modulus.bit_length() - 1
    if not 1 <= s <= MAX_DEGREE:
        raise FieldError(f"extension degree {s} out of range [1, {MAX_DEGREE}]")
    exp, log = _build_tables(s, modulus)
    return FieldSpec(s=s, q=1 << s, modulus=modulus, exp=exp, log=log)


@lru_cache(maxsize=None)
def field_new(s: int) -> FieldSpec:
    """The canonical field GF(2^s)."""
    if not isinstance(s, int) or not 1 <= s <= MAX_DEGREE:
        raise FieldError(f"extension degree must be an int in [1, {MAX_DEGREE}], got {s!r}")
    return field_from_modulus(MODULI[s])


def smallest_field_for(n: int) -> FieldSpec:
    """Smallest canonical GF(2^s) with at least ``n`` elements."""
    s = max(1, (n - 1).bit_length())
    if s > MAX_DEGREE:
        raise FieldError(f"no supported field has {n} elements (max 2^{MAX_DEGREE})")
    return field_new(s)


def add(a: int, b: int) -> int:
    return a ^ b


def mul(spec: FieldSpec, a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return int(spec.exp[spec.log[a] + spec.log[b]])


def inv(spec: FieldSpec, a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("inverse of zero in GF(2^s)")
    return int(spec.exp[(spec.q - 1 - spec.log[a]) % (spec.q - 1)])


def div(spec: FieldSpec, a: int, b: int) -> int:
    return mul(spec, a, inv(spec, b))


def power(spec: FieldSpec, a: int, e: int) -> int:
    """``a**e`` by repeated squaring on the table multiply."""
    r = 1
    while e > 0:
        if e & 1:
            r = mul(spec, r, a)
        a = mul(spec, a, a)
        e >>= 1
    return r


def mul_vec(spec: FieldSpec, a: np.ndarray, b) -> np.ndarray:
    """Elementwise product of integer arrays (``b`` may be a scalar)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.broadcast_to(np.asarray(b, dtype=np.int64), a.shape)
    out = np.zeros(a.shape, dtype=np.int64)
    nz = (a != 0) & (b != 0)
    out[nz] = spec.exp[spec.log[a[nz]] + spec.log[b[nz]]]
    return out
