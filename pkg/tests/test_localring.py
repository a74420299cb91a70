import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regrep.cyclotomic import CyclotomicValue
from regrep.errors import BadDegree, BadLevel, NonPrimeP, NotAUnit, ParseError, SpecMismatch
from regrep.localring import Family, RingElem, RingSpec, make_ring, parse_ring_spec, ring_arith

from conftest import ring

SMALL_RINGS = ["Zp:p=2,r=3", "Zp:p=3,r=2", "Zp:p=3,r=4", "Fqt:p=2,f=1,r=3",
               "Fqt:p=2,f=2,r=2", "Fqt:p=3,f=1,r=3"]


def el(R, v):
    return RingElem(R, v)


def test_make_ring_sizes(z8, f2t3):
    assert z8.size == 8 and z8.pi == 2
    assert f2t3.size == 8 and f2t3.family is Family.TruncatedPolynomial


def test_non_prime_rejected():
    with pytest.raises(NonPrimeP):
        make_ring(RingSpec(Family.IntegersModPrimePower, 6, 1, 2))


def test_bad_degree_for_integers():
    with pytest.raises(BadDegree):
        make_ring(RingSpec(Family.IntegersModPrimePower, 2, 2, 2))


@pytest.mark.parametrize("text", ["Zp:p=2", "Qp:p=2,r=3", "Zp:p=2,r=x", "Zp:p=2,f=2,r=3", ""])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        parse_ring_spec(text)


def test_parse_round_trip():
    for text in SMALL_RINGS:
        assert str(parse_ring_spec(text)) == text


def test_arithmetic_examples(z8, f2t3):
    assert ring_arith("add", el(z8, 5), el(z8, 6)) == el(z8, 3)
    assert ring_arith("mul", el(z8, 3), el(z8, 3)) == el(z8, 1)
    one_plus_t = el(f2t3, 1 + 2)
    assert ring_arith("mul", one_plus_t, one_plus_t) == el(f2t3, 1 + 4)
    assert ring_arith("neg", el(z8, 3)) == el(z8, 5)


def test_mixed_rings_rejected(z8, f2t3):
    with pytest.raises(SpecMismatch):
        ring_arith("add", el(z8, 1), el(f2t3, 1))


def test_inverse_examples(z8, f2t3):
    assert el(z8, 3).inv() == el(z8, 3)
    with pytest.raises(NotAUnit):
        el(z8, 4).inv()
    assert el(f2t3, 1 + 2).inv() == el(f2t3, 1 + 2 + 4)


def test_valuation_examples(z8, f2t3):
    assert z8.valuation(4) == 2
    assert z8.valuation(0) == 3
    assert f2t3.valuation(2 + 4) == 1


def test_reduce_examples(z8):
    assert z8.reduce(6, 1) == 0
    assert z8.reduce(7, 2) == 3
    assert all(z8.reduce(x, 3) == x for x in range(8))
    with pytest.raises(BadLevel):
        z8.reduce(1, 0)


def test_psi_examples(z8):
    assert z8.psi_fractional(0) == CyclotomicValue.integer(1)
    assert z8.psi_fractional(4) == CyclotomicValue.integer(-1)
    assert z8.psi_fractional(1) == CyclotomicValue.root_of_unity(1, 8)


@pytest.mark.parametrize("text", SMALL_RINGS)
def test_valuation_multiplicative_exhaustive(text):
    R = ring(text)
    for x in range(R.size):
        assert R.is_unit(x) == (R.valuation(x) == 0)
        for y in range(R.size):
            assert R.valuation(R.mul(x, y)) == min(R.valuation(x) + R.valuation(y), R.r)


@pytest.mark.parametrize("text", SMALL_RINGS)
def test_psi_additive_and_conductor(text):
    R = ring(text)
    m = R.psi_modulus
    for a in range(R.size):
        for b in range(R.size):
            assert (R.psi_exponent(a) + R.psi_exponent(b) - R.psi_exponent(R.add(a, b))) % m == 0
    # trivial on 0 = p^r, but not on all of p^(r-1)
    deepest = [R.mul(R.pi_power(R.r - 1), u) for u in range(R.size)]
    assert any(R.psi_exponent(a) % m for a in deepest)


@pytest.mark.parametrize("text", SMALL_RINGS)
def test_reduce_composes(text):
    R = ring(text)
    for x in range(R.size):
        for i in range(1, R.r + 1):
            for j in range(1, R.r + 1):
                assert R.reduce(R.reduce(x, i), j) == R.reduce(x, min(i, j))


@pytest.mark.parametrize("text", SMALL_RINGS)
def test_inverse_tables(text):
    R = ring(text)
    for x in range(R.size):
        if R.is_unit(x):
            assert R.mul(x, R.inv(x)) == R.one
        else:
            with pytest.raises(NotAUnit):
                R.inv(x)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL_RINGS), st.data())
def test_ring_axioms(text, data):
    R = ring(text)
    x, y, z = (data.draw(st.integers(0, R.size - 1)) for _ in range(3))
    assert R.add(x, y) == R.add(y, x)
    assert R.mul(x, y) == R.mul(y, x)
    assert R.mul(x, R.add(y, z)) == R.add(R.mul(x, y), R.mul(x, z))
    assert R.mul(R.mul(x, y), z) == R.mul(x, R.mul(y, z))
    assert R.add(x, R.neg(x)) == R.zero


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(SMALL_RINGS), st.data())
def test_reduction_is_a_ring_map(text, data):
    R = ring(text)
    i = data.draw(st.integers(1, R.r))
    S = R.truncate(i)
    x, y = (data.draw(st.integers(0, R.size - 1)) for _ in range(2))
    assert R.reduce(R.mul(x, y), i) == S.mul(R.reduce(x, i), R.reduce(y, i))
    assert R.reduce(R.add(x, y), i) == S.add(R.reduce(x, i), R.reduce(y, i))
