from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from cohsys.numerics import (
    CSType,
    CurveContext,
    SubTriple,
    SubtypeSequence,
    alpha_slope,
    brill_noether_number,
    c21,
    cotype_dual_sequence,
    diophantine_unit_value,
    ext_positivity,
    extended_gcd,
    format_rational,
    margin_quantum,
    parse_rational,
    rank1_exists,
    slope_margin,
)

F = Fraction
G6 = CurveContext(6)


def test_parse_and_format_rational():
    assert parse_rational("1/2") == F(1, 2)
    assert parse_rational(" -3 ") == F(-3)
    assert parse_rational(" 6 / 4") == F(3, 2)
    assert format_rational(F(6, 4)) == "3/2"
    assert format_rational(F(-3)) == "-3"
    assert format_rational(0) == "0"


@pytest.mark.parametrize("bad", ["1/0", "0.5", "1e3", "", "a/b", "1//2", "inf", "1/-2"])
def test_parse_rational_rejects(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_rational_round_trip(num, den):
    r = F(num, den)
    text = format_rational(r)
    assert parse_rational(text) == r
    back = parse_rational(text)
    assert gcd(abs(back.numerator), back.denominator) == 1
    assert format_rational(back) == text


def test_curve_context_rejects_low_genus():
    for g in (0, 1, -3):
        with pytest.raises(ValueError):
            CurveContext(g)


def test_type_invariants():
    with pytest.raises(ValueError):
        CSType(0, 1, 1)
    with pytest.raises(ValueError):
        CSType(1, 1, -1)
    assert CSType.parse("2, 13,4") == CSType(2, 13, 4)
    with pytest.raises(ValueError):
        SubTriple(2, 5, 1).check(CSType(2, 13, 4))
    with pytest.raises(ValueError):
        SubTriple(1, 5, 5).check(CSType(2, 13, 4))


def test_alpha_slope_examples():
    assert alpha_slope(CSType(2, 13, 4), F(1, 2)) == F(15, 2)
    assert alpha_slope(CSType(3, 7, 0), F(5, 3)) == F(7, 3)
    assert alpha_slope(CSType(1, 6, 3), F(1, 2)) == F(15, 2)


def test_slope_margin_examples():
    T = CSType(2, 13, 4)
    assert slope_margin(T, SubTriple(1, 6, 3), F(1, 3)) == F(1, 6)
    assert slope_margin(T, SubTriple(1, 6, 3), F(1, 2)) == 0
    # proportional subtype
    assert slope_margin(CSType(4, 10, 6), SubTriple(2, 5, 3), F(7, 5)) == 0


def test_margin_quantum():
    assert margin_quantum(3, 2, 1) == F(1, 6)
    assert margin_quantum(1, 1, 1) == 1
    assert margin_quantum(5, 3, 2) == F(1, 30)


def test_brill_noether_examples():
    assert brill_noether_number(G6, CSType(2, 13, 4)) == 17
    for g in (2, 3, 9):
        assert brill_noether_number(CurveContext(g), CSType(1, 0, 0)) == g
    assert brill_noether_number(G6, CSType(1, 6, 4)) == -6


def test_rank1_exists():
    assert rank1_exists(G6, 6, 3)
    assert not rank1_exists(G6, 6, 4)
    assert rank1_exists(G6, -5, 0)
    assert not rank1_exists(G6, 0, 1)


def test_c21_and_ext_positivity_examples():
    assert c21(G6, CSType(1, 6, 3), CSType(1, 7, 1)) == 4
    assert c21(CurveContext(2), CSType(1, 1, 0), CSType(1, 1, 1)) == 1
    assert ext_positivity(G6, CSType(1, 6, 3), CSType(1, 7, 1)) == 8
    assert ext_positivity(CurveContext(2), CSType(1, 1, 0), CSType(1, 1, 0)) == 1
    for g in (2, 5, 11):
        ctx = CurveContext(g)
        assert c21(ctx, CSType(1, 0, 0), CSType(1, 0, 0)) == g - 1
        assert ext_positivity(ctx, CSType(1, 0, 0), CSType(1, 0, 0)) == g - 1


def test_diophantine_unit_value():
    a, b = CSType(1, 6, 3), CSType(1, 7, 1)
    assert diophantine_unit_value(1, 3, a, b) == 1
    for p in (1, 2, 3, 4):
        assert diophantine_unit_value(p, 2 * p + 1, a, b) == 1
    assert diophantine_unit_value(0, 1, a, a) == 0
    with pytest.raises(ValueError):
        diophantine_unit_value(2, 4, a, b)


types = st.builds(CSType, st.integers(1, 5), st.integers(-30, 30), st.integers(0, 6))


@given(st.integers(0, 20), st.integers(1, 20), types, types)
def test_diophantine_antisymmetry(p, q, T1, T2):
    if gcd(p, q) != 1:
        return
    assert diophantine_unit_value(p, q, T1, T2) == -diophantine_unit_value(p, q, T2, T1)


@given(st.integers(2, 12), types)
def test_brill_noether_round_trip(g, T):
    beta = brill_noether_number(CurveContext(g), T)
    assert beta + T.k * (T.k - T.d + T.n * (g - 1)) - T.n ** 2 * (g - 1) - 1 == 0


def test_cotype_dual_examples():
    b = cotype_dual_sequence(SubtypeSequence(2, 1, {(1, 0): 2, (1, 1): 5}))
    assert (b[1, 0], b[1, 1]) == (5, 2)
    zeros = SubtypeSequence(4, 3, {(i, j): 0 for i in range(1, 4) for j in range(4)})
    assert cotype_dual_sequence(zeros) == zeros
    b = cotype_dual_sequence(SubtypeSequence(3, 0, {(1, 0): 1, (2, 0): 3}))
    assert (b[1, 0], b[2, 0]) == (6, F(1, 2))


def test_subtype_sequence_must_be_dense():
    with pytest.raises(ValueError):
        SubtypeSequence(3, 1, {(1, 0): 1, (1, 1): 1, (2, 0): 1})
    with pytest.raises(ValueError):
        SubtypeSequence(2, 0, {(1, 0): 1, (2, 0): 1})


rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@st.composite
def sequences(draw):
    n = draw(st.integers(2, 5))
    k = draw(st.integers(0, 4))
    return SubtypeSequence(n, k, {(i, j): draw(rationals)
                                  for i in range(1, n) for j in range(k + 1)})


@given(sequences())
def test_cotype_dual_is_involution(a):
    assert cotype_dual_sequence(cotype_dual_sequence(a)) == a


@settings(max_examples=1000, derandomize=True)
@given(st.data())
def test_duality_inequality_equivalence(data):
    n = data.draw(st.integers(2, 5))
    k = data.draw(st.integers(0, 5))
    d = data.draw(st.integers(-20, 40))
    m = data.draw(st.integers(1, n - 1))
    t = data.draw(st.integers(0, k))
    dp = data.draw(st.integers(-20, 40))
    alpha = data.draw(st.fractions(min_value=0, max_value=5, max_denominator=9))
    a = SubtypeSequence(
        n, k, {(i, j): data.draw(rationals) for i in range(1, n) for j in range(k + 1)})
    b = cotype_dual_sequence(a)
    T = CSType(n, d, k)
    sub_holds = alpha_slope(CSType(m, dp, t), alpha) < alpha_slope(T, alpha) + a[m, t]
    quot = CSType(n - m, d - dp, k - t)
    cot_holds = alpha_slope(T, alpha) - b[n - m, k - t] < alpha_slope(quot, alpha)
    assert sub_holds == cot_holds


@settings(max_examples=1000, derandomize=True)
@given(types.filter(lambda T: T.n >= 2), st.data())
def test_margin_integrality_quantum(T, data):
    m = data.draw(st.integers(1, T.n - 1))
    t = data.draw(st.integers(0, T.k))
    dp = data.draw(st.integers(-40, 40))
    alpha = data.draw(st.fractions(min_value=0, max_value=6, max_denominator=15))
    q = alpha.denominator
    margin = slope_margin(T, SubTriple(m, dp, t), alpha)
    assert (q * T.n * m * margin).denominator == 1
    if margin > 0:
        assert margin >= margin_quantum(q, T.n, m)


def test_extended_gcd_examples():
    assert extended_gcd(3, 1) == (1, 0, 1)
    assert extended_gcd(6, 4) == (2, 1, -1)
    for p in range(1, 11):
        assert extended_gcd(2 * p + 1, p)[0] == 1
    with pytest.raises(ValueError):
        extended_gcd(0, 0)


@given(st.integers(-10**9, 10**9), st.integers(-10**9, 10**9))
def test_extended_gcd_bezout(x, y):
    if x == 0 and y == 0:
        return
    g, u, v = extended_gcd(x, y)
    assert g == gcd(x, y) > 0
    assert u * x + v * y == g
