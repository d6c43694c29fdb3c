import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coded_relay import gf


def slow_mul(a, b, modulus):
    # schoolbook shift-and-add, independent of the table code
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


def divides(d, p):
    while p and p.bit_length() >= d.bit_length():
        p ^= d << (p.bit_length() - d.bit_length())
    return p == 0


def irreducible_by_trial(p):
    deg = p.bit_length() - 1
    return not any(divides(d, p) for d in range(2, 1 << (deg // 2 + 1)) if d.bit_length() - 1 >= 1)


@pytest.mark.parametrize("s", range(1, 17))
def test_modulus_is_smallest_irreducible(s):
    mod = gf.MODULI[s]
    assert mod.bit_length() - 1 == s
    assert irreducible_by_trial(mod)
    # nothing smaller of the same degree with constant term 1 is irreducible
    for cand in range((1 << s) | 1, mod, 2):
        assert not irreducible_by_trial(cand)


@pytest.mark.parametrize("s", range(1, 9))
def test_tables_match_shift_and_add(s):
    f = gf.field_new(s)
    q = f.q
    a = np.repeat(np.arange(q), q)
    b = np.tile(np.arange(q), q)
    got = gf.mul_vec(f, a, b)
    want = np.array([slow_mul(int(x), int(y), f.modulus) for x, y in zip(a, b)])
    assert np.array_equal(got, want)


def test_reference_clmul_agrees():
    for s in (3, 5, 8):
        mod = gf.MODULI[s]
        for a in range(1 << s):
            for b in range(0, 1 << s, 7):
                assert gf.clmul_mod(a, b, mod) == slow_mul(a, b, mod)


@pytest.mark.parametrize("s", [1, 2, 3, 4, 8])
def test_inverse_and_division(s):
    f = gf.field_new(s)
    for a in range(1, f.q):
        assert gf.mul(f, a, gf.inv(f, a)) == 1
        assert gf.div(f, a, a) == 1
    with pytest.raises(ZeroDivisionError):
        gf.inv(f, 0)


def test_power_and_group_order():
    f = gf.field_new(4)
    for a in range(1, 16):
        assert gf.power(f, a, 15) == 1
        assert gf.power(f, a, 0) == 1
        assert gf.power(f, a, 2) == gf.mul(f, a, a)


def test_add_is_xor():
    assert gf.add(0b1010, 0b0110) == 0b1100


def test_smallest_field_for():
    assert gf.smallest_field_for(8).q == 8
    assert gf.smallest_field_for(9).q == 16
    assert gf.smallest_field_for(225).q == 256
    assert gf.smallest_field_for(441).q == 512
    assert gf.smallest_field_for(1).q == 2


def test_bad_degree_rejected():
    with pytest.raises(gf.FieldError):
        gf.field_new(0)
    with pytest.raises(gf.FieldError):
        gf.field_new(17)


def test_reducible_modulus_rejected():
    # x^4 + 1 = (x + 1)^4
    assert not gf.is_irreducible(0b10001)
    with pytest.raises(gf.FieldError):
        gf.field_from_modulus(0b10001)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 0xFFFF), st.integers(0, 0xFFFF), st.integers(0, 0xFFFF))
def test_gf65536_properties(a, b, c):
    f = gf.field_new(16)
    assert gf.mul(f, a, b) == slow_mul(a, b, f.modulus)
    assert gf.mul(f, gf.mul(f, a, b), c) == gf.mul(f, a, gf.mul(f, b, c))
    assert gf.mul(f, a, b ^ c) == gf.mul(f, a, b) ^ gf.mul(f, a, c)
