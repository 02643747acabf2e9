import math

import pytest
from hypothesis import given, strategies as st

from kl_descent.laurent import (Gamma, LaurentPoly, ModPPoly, ONE, ZERO, bar,
                                degree_valuation, is_prime, multiply, reduce_mod_p, sym_plus)

coeffs = st.integers(-20, 20)
polys = st.dictionaries(st.integers(-6, 6), coeffs, max_size=5).map(LaurentPoly)
vectors = st.lists(st.integers(-1000, 1000), min_size=3, max_size=3)


def e(k, c=1):
    return LaurentPoly.monomial(k, c)


# ring structure ------------------------------------------------------------------

@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    assert a * ONE == a


@given(polys, polys)
def test_bar_is_ring_involution(a, b):
    assert bar(bar(a)) == a
    assert bar(a * b) == bar(a) * bar(b)
    assert bar(a + b) == bar(a) + bar(b)


@given(polys, polys)
def test_degree_and_valuation_are_additive(a, b):
    if a and b:
        assert (a * b).degree == a.degree + b.degree
        assert (a * b).valuation == a.valuation + b.valuation
        assert (a * b).leading_coefficient() == a.leading_coefficient() * b.leading_coefficient()


@given(polys)
def test_sym_plus_characterisation(a):
    q = sym_plus(a)
    assert q.is_bar_invariant()
    assert (a - q).negative_part_only() or not (a - q)
    assert all(k < 0 for k in (a - q).terms)


@given(polys)
def test_json_roundtrip(a):
    assert LaurentPoly.from_json(a.to_json()) == a


@given(polys, polys, st.sampled_from([2, 3, 5, 7]))
def test_reduction_mod_p_is_a_ring_map(a, b, p):
    assert reduce_mod_p(a * b, p) == reduce_mod_p(a, p) * reduce_mod_p(b, p)
    assert reduce_mod_p(a + b, p) == reduce_mod_p(a, p) + reduce_mod_p(b, p)
    assert not reduce_mod_p(a * p, p)


# concrete values -------------------------------------------------------------------

def test_zero_has_infinite_degree_and_valuation():
    assert degree_valuation(ZERO) == (-math.inf, math.inf)


def test_bar_of_monomial():
    assert bar(e(3)) == e(-3)


def test_multiply_and_format():
    x = multiply(e(1) + e(-1), e(1) - e(-1))
    assert x == e(2) - e(-2)
    assert str(x) == "e[2] - e[-2]"
    assert str(ZERO) == "0"
    assert str(e(0, -2) + e(1)) == "e[1] - 2"


def test_coefficient_and_shift():
    a = LaurentPoly({2: 3, -1: 4})
    assert a.coefficient(2) == 3 and a.coefficient(0) == 0
    assert a.shift(-2) == LaurentPoly({0: 3, -3: 4})
    assert (e(1) + e(-1)) ** 2 == e(2) + 2 + e(-2)


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_reduce_mod_p_requires_prime():
    with pytest.raises(ValueError):
        reduce_mod_p(ONE, 4)


def test_mod_p_poly_drops_multiples_of_p():
    assert ModPPoly(3, {0: 3, 1: 4}) == ModPPoly(3, {1: 1})
    assert not ModPPoly(2, {5: 2, -1: -4})


# Gamma = Z^r -------------------------------------------------------------------------

@given(vectors, vectors)
def test_packing_is_an_order_preserving_homomorphism(u, v):
    g = Gamma(3)
    a, b = g.encode(u), g.encode(v)
    assert (tuple(u) < tuple(v)) == (a < b)
    assert a + b == g.encode([x + y for x, y in zip(u, v)])
    assert g.decode(a) == tuple(u)


def test_gamma_rank_two_formatting():
    g = Gamma(2)
    p = LaurentPoly({g.encode((1, -2)): 1, g.encode((0, 0)): 3})
    assert p.format(g) == "e[(1,-2)] + 3"
    assert LaurentPoly.from_json(p.to_json(g), g) == p
    with pytest.raises(ValueError):
        g.encode((1, 2, 3))
    with pytest.raises(ValueError):
        Gamma(0)
