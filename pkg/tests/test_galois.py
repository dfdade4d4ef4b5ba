import numpy as np
import pytest
from hypothesis import given, strategies as st

from nbldpc_cc.galois import DEFAULT_PRIMITIVE_POLYS, FieldElement, NonPrimitivePolynomial, get_field


def slow_mul(a, b, p, poly):
    # shift-and-add reference, independent of the log tables
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> p:
            a ^= poly
    return out


def test_gf2():
    gf = get_field(1, 0b11)
    assert len(gf.antilog) == 1 and gf.antilog[0] == 1
    assert gf.mul(1, 1) == 1 and gf.inv(1) == 1


def test_gf256_generator():
    gf = get_field(8, 0x11D)
    assert gf.antilog[1] == 2
    assert gf.mul(2, 3) == 6
    assert gf.add(0x53, 0xCA) == 0x99


def test_gf16_powers_cover_field():
    gf = get_field(4, 0x13)
    assert sorted(gf.antilog.tolist()) == list(range(1, 16))


def test_gf4_inverse_brute_force():
    gf = get_field(2)
    (inv2,) = [x for x in range(1, 4) if slow_mul(2, x, 2, gf.primitive_poly) == 1]
    assert gf.inv(2) == inv2 == 3


@pytest.mark.parametrize("p", range(1, 11))
def test_inverse_exhaustive(p):
    gf = get_field(p)
    a = np.arange(1, gf.q)
    assert np.all(gf.mul_table[a, gf.inv_table[a]] == 1)


@pytest.mark.parametrize("p", [2, 3, 4, 8])
def test_mul_table_matches_shift_and_add(p):
    gf = get_field(p)
    poly = gf.primitive_poly
    ref = np.array([[slow_mul(a, b, p, poly) for b in range(gf.q)] for a in range(gf.q)])
    assert np.array_equal(gf.mul_table, ref)


def test_default_polys_are_primitive():
    for p, poly in DEFAULT_PRIMITIVE_POLYS.items():
        assert get_field(p, poly).q == 1 << p


def test_non_primitive_rejected():
    # x^4 + x^3 + x^2 + x + 1 is irreducible but has order 5
    with pytest.raises(NonPrimitivePolynomial):
        get_field(4, 0b11111)


def test_zero_inverse():
    gf = get_field(8)
    with pytest.raises(ZeroDivisionError):
        gf.inv(0)
    with pytest.raises(ZeroDivisionError):
        gf.div(3, 0)


def test_tables_read_only():
    gf = get_field(8)
    with pytest.raises(ValueError):
        gf.antilog[0] = 5


elem = st.integers(0, 255)


@given(elem, elem, elem)
def test_field_axioms(a, b, c):
    gf = get_field(8)
    assert gf.add(a, a) == 0 and gf.add(a, 0) == a
    assert gf.mul(a, 1) == a and gf.mul(a, 0) == 0
    assert gf.mul(a, b) == gf.mul(b, a)
    assert gf.mul(a, gf.mul(b, c)) == gf.mul(gf.mul(a, b), c)
    assert gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))


@given(st.integers(1, 255), st.integers(0, 600))
def test_pow_matches_repeated_mul(a, n):
    gf = get_field(8)
    ref = 1
    for _ in range(n % 255):
        ref = gf.mul(ref, a)
    assert gf.pow(a, n) == ref


def test_field_element_ops():
    gf = get_field(8)
    a, b = FieldElement(7, gf), FieldElement(9, gf)
    assert int(a + b) == 7 ^ 9
    assert int((a * b) / b) == 7
    assert int(a * ~a) == 1
