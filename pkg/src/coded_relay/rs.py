"""(n, m) Reed-Solomon evaluation code with any-m-of-n erasure decoding.

A payload ``(y_0, ..., y_{m-1})`` is the coefficient vector of
``f(x) = y_0 + y_1 x + ... + y_{m-1} x^{m-1}``; version ``k`` (1-based) is
``f(beta_k)`` with ``beta_k = k - 1`` taken as a field element.  Decoding is
Lagrange interpolation over the m lowest received indices; any further
entries are checked against the re-encoded codeword.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import gf
from .gf import FieldSpec


class CodeError(ValueError):
    """Invalid code parameters or malformed input."""


class InsufficientVersions(CodeError):
    pass


class InconsistentReceivedSet(CodeError):
    pass


@dataclass(frozen=True)
class CodeSpec:
    m: int
    n: int
    field: FieldSpec
    points: tuple[int, ...]

    def point(self, k: int) -> int:
        return self.points[k - 1]


def code_new(m: int, n: int, field: FieldSpec | None = None) -> CodeSpec:
    """Build an (n, m) code on the smallest field with q >= n (or ``field``)."""
    if not (isinstance(m, int) and isinstance(n, int)) or not 1 <= m <= n:
        raise CodeError(f"need 1 <= m <= n, got m={m!r}, n={n!r}")
    if field is None:
        try:
            field = gf.smallest_field_for(n)
        except gf.FieldError as exc:
            raise CodeError(str(exc)) from exc
    if n > field.q:
        raise CodeError(f"n={n} exceeds field size {field.q}")
    return CodeSpec(m=m, n=n, field=field, points=tuple(range(n)))


def encode(spec: CodeSpec, payload: Sequence[int]) -> list[int]:
    if len(payload) != spec.m:
        raise CodeError(f"payload has {len(payload)} symbols, expected {spec.m}")
    return encode_array(spec, np.asarray(payload, dtype=np.int64)).tolist()


def encode_array(spec: CodeSpec, payload: np.ndarray) -> np.ndarray:
    """Vectorised Horner evaluation at every point; returns int64 array of length n."""
    x = np.asarray(spec.points, dtype=np.int64)
    acc = np.zeros(spec.n, dtype=np.int64)
    for y in payload[::-1]:
        acc = gf.mul_vec(spec.field, acc, x) ^ int(y)
    return acc


def _poly_mul_linear(f: FieldSpec, poly: list[int], root: int) -> list[int]:
    # poly * (x + root); coefficients low to high
    out = [0] * (len(poly) + 1)
    for i, c in enumerate(poly):
        out[i + 1] ^= c
        out[i] ^= gf.mul(f, c, root)
    return out


def interpolate(f: FieldSpec, xs: Sequence[int], ys: Sequence[int]) -> list[int]:
    """Coefficients (low to high, length len(xs)) of the interpolating polynomial."""
    m = len(xs)
    master = [1]
    for x in xs:
        master = _poly_mul_linear(f, master, x)
    coeffs = [0] * m
    for i, xi in enumerate(xs):
        # quotient master / (x - xi) by synthetic division, high to low
        q = [0] * m
        carry = 0
        for d in range(m, 0, -1):
            carry = master[d] ^ gf.mul(f, carry, xi) if d < m else master[d]
            q[d - 1] = carry
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                denom = gf.mul(f, denom, xi ^ xj)
        scale = gf.div(f, ys[i], denom)
        if scale:
            for d in range(m):
                coeffs[d] ^= gf.mul(f, scale, q[d])
    return coeffs


def decode(spec: CodeSpec, received: Mapping[int, int] | Iterable[tuple[int, int]]) -> list[int]:
    """Recover the payload from received ``(k, symbol)`` entries."""
    entries = dict(received.items() if isinstance(received, Mapping) else received)
    for k in entries:
        if not 1 <= k <= spec.n:
            raise CodeError(f"version index {k} outside [1, {spec.n}]")
    if len(entries) < spec.m:
        raise InsufficientVersions(f"have {len(entries)} distinct versions, need {spec.m}")
    chosen = sorted(entries)[: spec.m]
    xs = [spec.point(k) for k in chosen]
    ys = [entries[k] for k in chosen]
    payload = interpolate(spec.field, xs, ys)
    if len(entries) > spec.m:
        word = encode_array(spec, np.asarray(payload, dtype=np.int64))
        for k, sym in entries.items():
            if int(word[k - 1]) != sym:
                raise InconsistentReceivedSet(f"version {k} disagrees with interpolated codeword")
    return payload


def hamming_weight(word: Sequence[int]) -> int:
    return sum(1 for z in word if z)
