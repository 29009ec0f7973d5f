"""Exact scalar arithmetic, certified comparisons, commensurability."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commensura._rat import Rat
from commensura.errors import MixedSymbolTables, PrecisionExhausted
from commensura.scalars import (
    Comparison,
    SymbolTable,
    commensurable,
    compare_area,
    format_area,
    format_scalar,
    parse_scalar,
    pi_ratio,
)

# Reference value used as an independent oracle for the built-in enclosure.
# First 50 decimal digits of pi (a published constant, cross-checked against
# mpmath in test_pi_enclosure_against_mpmath).
PI_50 = "31415926535897932384626433832795028841971693993751"
PI_LO = Fraction(int(PI_50), 10**49)
PI_HI = PI_LO + Fraction(1, 10**49)


@pytest.fixture()
def table():
    return SymbolTable()


# ---------------------------------------------------------------------------
# pi enclosure oracle
# ---------------------------------------------------------------------------


def test_pi_enclosure_contains_reference(table):
    for bits in (64, 96, 128, 160):
        lo, hi = table.enclosure(1, bits)
        assert Fraction(lo.numerator, lo.denominator) <= PI_HI
        assert Fraction(hi.numerator, hi.denominator) >= PI_LO
        assert hi - lo < Rat(1, 2**bits) * 4


def test_pi_enclosure_requested_widths(table):
    for bits in (64, 128, 256, 512, 1024):
        lo, hi = table.enclosure(1, bits)
        assert lo < hi
        assert hi - lo <= Rat(1, 2**bits)


def test_pi_enclosure_nested(table):
    prev = None
    for bits in (64, 128, 256, 512):
        lo, hi = table.enclosure(1, bits)
        if prev is not None:
            plo, phi = prev
            assert lo >= plo and hi <= phi
        prev = (lo, hi)


def test_pi_enclosure_against_mpmath(table):
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.prec = 700
    sign, man, exp, _ = mpmath.mpf(mpmath.pi)._mpf_
    ref = Fraction((-man if sign else man), 2**-exp) if exp < 0 else Fraction(man * 2**exp)
    lo, hi = table.enclosure(1, 512)
    assert Fraction(lo.numerator, lo.denominator) < ref < Fraction(hi.numerator, hi.denominator)


# ---------------------------------------------------------------------------
# comparisons
# ---------------------------------------------------------------------------


def test_compare_pi_with_classic_rationals(table):
    pi = table.pi()
    assert table.compare(pi, table.rational(3)) is Comparison.GREATER
    assert table.compare(pi, table.rational(Rat(355, 113))) is Comparison.LESS
    assert table.compare(pi, table.rational(Rat(22, 7))) is Comparison.LESS
    assert table.compare(table.rational(Rat(355, 113)), pi) is Comparison.GREATER


def test_compare_spec_literal(table):
    a = table.parse("1/3*PI + 2")
    assert table.compare(a, table.pi()) is Comparison.LESS
    assert table.compare(a, table.rational(3)) is Comparison.GREATER


def test_equal_is_symbolic_only(table):
    a = table.parse("2*PI + 1")
    b = table.pi(2) + table.rational(1)
    assert table.compare(a, b) is Comparison.EQUAL
    assert a == b


def test_decimal_symbol_with_insufficient_radius_is_indeterminate(table):
    # interval [3.14158, 3.14160] straddles pi; no budget can split it
    table.declare_decimal_symbol("approx_pi", Rat(314159, 100000), Rat(1, 100000))
    got = table.compare(table.symbol("approx_pi"), table.pi(), bits=4096)
    assert got is Comparison.INDETERMINATE


def test_decimal_symbol_with_sufficient_radius_decides(table):
    table.declare_decimal_symbol("near3", Rat(3), Rat(1, 100))
    assert table.compare(table.symbol("near3"), table.pi()) is Comparison.LESS


def test_pi_alias_symbol_is_honestly_indeterminate(table):
    # Declaring a second handle on the pi stream breaks the independence
    # assumption; comparing it with PI must refuse to decide, not guess.
    table.declare_pi_symbol("tau_half")
    got = table.compare(table.symbol("tau_half"), table.pi(), bits=512)
    assert got is Comparison.INDETERMINATE


def test_require_raises_on_indeterminate(table):
    table.declare_pi_symbol("p2")
    with pytest.raises(PrecisionExhausted):
        table.require(table.compare(table.symbol("p2"), table.pi(), bits=128))


def test_mixed_tables_rejected(table):
    other = SymbolTable()
    with pytest.raises(MixedSymbolTables):
        table.pi() + other.pi()
    with pytest.raises(MixedSymbolTables):
        table.compare(table.pi(), other.pi())


# ---------------------------------------------------------------------------
# commensurability
# ---------------------------------------------------------------------------


def test_commensurable_pi_multiples(table):
    a = table.pi(Rat(8, 3))
    b = table.pi(2)
    assert commensurable(a, b) == Rat(3, 4)
    assert pi_ratio(a) == Rat(8, 3)


def test_commensurable_mixed_terms(table):
    a = table.parse("2*PI + 4")
    b = table.parse("3*PI + 6")
    assert commensurable(a, b) == Rat(3, 2)
    assert commensurable(a, table.parse("3*PI + 5")) is None
    assert commensurable(table.pi(), table.rational(2)) is None


def test_commensurable_zero_rules(table):
    zero = table.zero()
    assert commensurable(table.pi(), zero) == 0
    assert commensurable(zero, table.pi()) is None
    with pytest.raises(ValueError):
        commensurable(zero, zero)


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------


def test_parse_examples(table):
    s = parse_scalar(table, "1/3*PI + 2")
    assert s.coeffs == {1: Rat(1, 3), 0: Rat(2)}
    assert parse_scalar(table, "PI").coeffs == {1: Rat(1)}
    assert parse_scalar(table, "0").is_zero()
    assert parse_scalar(table, "7/2").coeffs == {0: Rat(7, 2)}
    assert parse_scalar(table, "2 - PI").coeffs == {0: Rat(2), 1: Rat(-1)}
    assert parse_scalar(table, "-1*PI + 1").coeffs == {1: Rat(-1), 0: Rat(1)}


def test_parse_rejects_garbage(table):
    for bad in ("", "1 +", "* PI", "PI PI", "1/0", "2 & 3"):
        with pytest.raises(ValueError):
            parse_scalar(table, bad)


def test_format_canonical(table):
    assert format_scalar(table.parse("1/3*PI + 2")) == "1/3*PI + 2"
    assert format_scalar(table.zero()) == "0"
    assert format_scalar(table.pi(-1) + table.rational(1)) == "-1*PI + 1"
    assert format_scalar(table.pi()) == "PI"


@given(
    c0=st.fractions(min_value=-50, max_value=50, max_denominator=20),
    c1=st.fractions(min_value=-50, max_value=50, max_denominator=20),
)
@settings(max_examples=80, deadline=None)
def test_format_parse_round_trip(c0, c1):
    table = SymbolTable()
    s = table.rational(Rat(c0)) + table.pi(Rat(c1))
    assert parse_scalar(table, format_scalar(s)) == s


# ---------------------------------------------------------------------------
# algebraic laws (property tests)
# ---------------------------------------------------------------------------

_fracs = st.fractions(min_value=-30, max_value=30, max_denominator=12)


def _scalar(table, pair):
    return table.rational(Rat(pair[0])) + table.pi(Rat(pair[1]))


@given(a=st.tuples(_fracs, _fracs), b=st.tuples(_fracs, _fracs), c=st.tuples(_fracs, _fracs))
@settings(max_examples=60, deadline=None)
def test_vector_space_laws(a, b, c):
    table = SymbolTable()
    sa, sb, sc = (_scalar(table, x) for x in (a, b, c))
    assert sa + sb == sb + sa
    assert (sa + sb) + sc == sa + (sb + sc)
    assert (sa - sa).is_zero()
    assert sa.scale(2) + sa.scale(3) == sa.scale(5)


@given(a=st.tuples(_fracs, _fracs), b=st.tuples(_fracs, _fracs), c=st.tuples(_fracs, _fracs))
@settings(max_examples=60, deadline=None)
def test_multiplication_bilinear(a, b, c):
    table = SymbolTable()
    sa, sb, sc = (_scalar(table, x) for x in (a, b, c))
    assert (sa + sb) * sc == sa * sc + sb * sc
    assert sa * sb == sb * sa


@given(a=st.tuples(_fracs, _fracs), b=st.tuples(_fracs, _fracs))
@settings(max_examples=60, deadline=None)
def test_compare_antisymmetry(a, b):
    table = SymbolTable()
    sa, sb = _scalar(table, a), _scalar(table, b)
    lhs = table.compare(sa, sb)
    rhs = table.compare(sb, sa)
    flip = {
        Comparison.LESS: Comparison.GREATER,
        Comparison.GREATER: Comparison.LESS,
        Comparison.EQUAL: Comparison.EQUAL,
    }
    assert rhs is flip[lhs]


# ---------------------------------------------------------------------------
# areas
# ---------------------------------------------------------------------------


def test_area_known_value(table):
    pi_sq = table.pi() * table.pi()
    # pi^2 = 9.8696044... lies between 394/40 (9.85) and 987/100 (9.87)
    low = table.rational(Rat(197, 20)) * table.rational(1)
    high = table.rational(Rat(987, 100)) * table.rational(1)
    assert compare_area(pi_sq, low) is Comparison.GREATER
    assert compare_area(pi_sq, high) is Comparison.LESS


def test_area_identity_exact(table):
    # l*(l - 2*PI) for l = 8/3*PI equals 16/9*PI*PI
    l = table.pi(Rat(8, 3))
    lhs = l * (l - table.pi(2))
    rhs = table.pi(Rat(4, 3)) * table.pi(Rat(4, 3))
    assert lhs == rhs
    assert compare_area(lhs, rhs) is Comparison.EQUAL
    assert format_area(lhs) == "16/9*PI*PI"


def test_area_mixed_pairs(table):
    a = table.parse("PI + 1")
    sq = a * a
    assert sq.coeffs == {(1, 1): Rat(1), (0, 1): Rat(2), (0, 0): Rat(1)}
    assert format_area(sq) == "1*PI*PI + 2*PI + 1"


def test_area_rejects_further_products(table):
    with pytest.raises(TypeError):
        (table.pi() * table.pi()) * table.pi()


def test_approx_midpoint(table):
    mid = table.approx(table.pi())
    assert Fraction(mid.numerator, mid.denominator) == pytest.approx(3.14159265, abs=1e-6)
