from __future__ import annotations

import cmath
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from commrank.cyclotomic import CycDivisionError, CycNum, cyclotomic_poly, euler_phi, root_of_unity

ORDERS = [1, 2, 3, 4, 5, 6, 8, 12]


@st.composite
def cycnums(draw, order=None):
    m = order or draw(st.sampled_from(ORDERS))
    coeffs = draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=1, max_size=m))
    return CycNum(coeffs, m)


def close(a: complex, b: complex) -> bool:
    return abs(a - b) < 1e-9 * (1 + abs(b))


def test_cyclotomic_poly_matches_sympy():
    x = sympy.Symbol("x")
    for m in range(1, 31):
        ours = list(cyclotomic_poly(m))
        ref = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()[::-1]
        assert ours == [int(c) for c in ref]
        assert euler_phi(m) == int(sympy.totient(m))


def test_root_of_unity_powers():
    for m in ORDERS:
        z = root_of_unity(1, m)
        assert (z ** m).is_one()
        for k in range(1, m):
            assert not (z ** k).is_one()
        assert close(z.to_complex(), cmath.exp(2j * cmath.pi / m))


def test_conjugate_is_inverse_on_roots():
    z = root_of_unity(3, 8)
    assert z.conj() == z.inv() == root_of_unity(5, 8)


def test_lift_preserves_value():
    z = root_of_unity(1, 3)
    assert z.lift(12) == root_of_unity(4, 12)
    assert z + root_of_unity(1, 4) == root_of_unity(4, 12) + root_of_unity(3, 12)


def test_sum_of_all_roots_vanishes():
    for m in [2, 3, 5, 6, 9]:
        total = CycNum.zero(m)
        for k in range(m):
            total = total + root_of_unity(k, m)
        assert total.is_zero()


def test_division_by_zero():
    with pytest.raises(CycDivisionError):
        CycNum.zero(5).inv()


def test_json_round_trip():
    z = CycNum([Fraction(1, 2), -3, 0, Fraction(7, 5)], 8)
    assert CycNum.from_json(z.to_json()) == z
    assert CycNum.from_json({"root": 2, "order": 6}) == root_of_unity(1, 3)
    assert CycNum.from_json("3/4") == CycNum.rational(Fraction(3, 4))


@given(cycnums(), cycnums())
def test_arithmetic_agrees_with_complex_oracle(a, b):
    ca, cb = a.to_complex(), b.to_complex()
    assert close((a + b).to_complex(), ca + cb)
    assert close((a - b).to_complex(), ca - cb)
    assert close((a * b).to_complex(), ca * cb)
    assert close(a.conj().to_complex(), ca.conjugate())
    if b:
        assert close((a / b).to_complex(), ca / cb)


@given(cycnums(order=12), cycnums(order=12), cycnums(order=12))
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == CycNum.zero(12)
    if a:
        assert (a * a.inv()).is_one()


@given(cycnums(), cycnums())
def test_conjugation_is_a_field_automorphism(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert a.conj().conj() == a


@given(cycnums())
def test_equality_and_hash_survive_lifting(a):
    big = a.lift(a.order * 2 if a.order % 2 else a.order * 3)
    assert big == a
    assert hash(big) == hash(a)
