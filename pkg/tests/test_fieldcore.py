from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from deltahecke.fieldcore import (FpElem, PadicNum, PrecisionError, delta_rational,
                                  fp_inv, padic_arith)

primes = st.sampled_from([5, 7, 11, 13, 97])


def test_fp_inv_examples():
    assert fp_inv(FpElem(1, 5)) == 1
    assert fp_inv(FpElem(2, 5)).value == 3
    assert fp_inv(FpElem(3, 7)).value == 5


def test_fp_inv_zero():
    with pytest.raises(ZeroDivisionError):
        fp_inv(FpElem(0, 5))


@given(primes, st.integers(1, 10 ** 6))
def test_fp_inv_involution(p, x):
    if x % p == 0:
        return
    a = FpElem(x, p)
    assert fp_inv(fp_inv(a)) == a
    assert a * fp_inv(a) == 1


def test_fp_field_ops():
    a, b = FpElem(3, 7), FpElem(5, 7)
    assert (a + b).value == 1
    assert (a - b).value == 5
    assert (a * b).value == 1
    assert (a / b) * b == a
    assert (a ** -1).value == 5


def test_padic_examples():
    p = 5
    a = PadicNum(p, 1, 1, 12)
    b = PadicNum(p, 1, 4, 12)
    c = padic_arith(a, b, "mul")
    assert (c.valuation, c.unit) == (2, 4)
    s = padic_arith(PadicNum.from_int(1, p), PadicNum.from_int(1, p), "add")
    assert (s.valuation, s.unit) == (0, 2)
    six = PadicNum.from_int(6, p)
    inv6 = PadicNum.from_rational(1, 6, p)
    one = padic_arith(six, inv6, "mul")
    assert (one.valuation, one.unit) == (0, 1)


def test_padic_cancellation_is_inexact_zero():
    p = 5
    a = PadicNum.from_int(7, p, M=3)
    z = a - PadicNum.from_int(7, p, M=3)
    assert z.is_zero and z.absprec == 3
    with pytest.raises(PrecisionError):
        PadicNum.from_int(1, p) / z
    assert z.residue() == 0


def test_padic_caps():
    p = 5
    x = PadicNum.from_int(1, p, maxdenom=2)
    x = x / PadicNum.from_int(25, p, maxdenom=2)
    assert x.valuation == -2
    with pytest.raises(PrecisionError):
        x / PadicNum.from_int(5, p, maxdenom=2)
    with pytest.raises(PrecisionError):
        x.residue()
    with pytest.raises(ZeroDivisionError):
        x / PadicNum.zero(p)


def test_padic_precision_tracking():
    p = 5
    a = PadicNum(p, 0, 1, 3)          # 1 + O(5^3)
    b = PadicNum(p, 1, 1, 12)         # 5 + O(5^13)
    s = a + b
    assert s.absprec == 3 and s.unit == 6
    assert (a * b).relprec == 3


def _to_fraction(x: PadicNum) -> Fraction:
    return Fraction(x.unit) * Fraction(x.p) ** x.valuation


@settings(max_examples=60)
@given(primes, st.integers(-10 ** 6, 10 ** 6), st.integers(-10 ** 6, 10 ** 6),
       st.integers(1, 10 ** 4))
def test_padic_matches_rationals(p, m, n, d):
    if m == 0 or n == 0 or d % p == 0:
        return
    M = 8
    a = PadicNum.from_int(m, p, M)
    b = PadicNum.from_rational(n, d, p, M)
    for op, exact in (("add", Fraction(m) + Fraction(n, d)),
                      ("mul", Fraction(m) * Fraction(n, d)),
                      ("div", Fraction(m) / Fraction(n, d))):
        r = padic_arith(a, b, op)
        if exact == 0:
            assert r.is_zero
            continue
        if r.is_zero:
            # cancellation below the known precision
            assert (exact.numerator % p ** r.absprec) == 0
            continue
        diff = exact - _to_fraction(r)
        num = diff.numerator
        if num:
            k = 0
            while num % p == 0:
                num //= p
                k += 1
            den = diff.denominator
            while den % p == 0:
                den //= p
                k -= 1
            assert k >= r.absprec


@given(primes, st.integers(1, 10 ** 6), st.integers(1, 10 ** 6))
def test_padic_valuation_additive(p, m, n):
    a, b = PadicNum.from_int(m, p), PadicNum.from_int(n, p)
    assert (a * b).valuation == a.valuation + b.valuation
    assert a * b == b * a


def test_delta_rational_examples():
    assert delta_rational(1, 1, 5) == 0
    assert delta_rational(2, 1, 5).value == 4
    assert delta_rational(6, 1, 5).value == 1
    assert delta_rational(1, 2, 5).value == 4


def test_delta_rational_rejects_p():
    with pytest.raises(ValueError):
        delta_rational(5, 1, 5)
    with pytest.raises(ValueError):
        delta_rational(1, 10, 5)


@settings(max_examples=80)
@given(primes, st.integers(1, 500), st.integers(1, 500), st.integers(1, 500),
       st.integers(1, 500))
def test_delta_sum_rule(p, a, b, c, d):
    """delta(x + y) = delta x + delta y - sum_j C(p,j)/p x^j y^(p-j) mod p."""
    from math import comb
    if a * b * c * d % p == 0:
        return
    x = Fraction(a, b)
    y = Fraction(c, d)
    s = x + y
    if s.numerator % p == 0:
        return
    lhs = delta_rational(s.numerator, s.denominator, p)
    xr = a * pow(b, -1, p) % p
    yr = c * pow(d, -1, p) % p
    corr = sum(comb(p, j) // p * pow(xr, j, p) * pow(yr, p - j, p) for j in range(1, p))
    rhs = delta_rational(a, b, p) + delta_rational(c, d, p) - corr
    assert lhs == rhs
