import itertools

import pytest
from hypothesis import given, strategies as st

from kl_descent.coxeter import (DiagramAutGroup, act_table, enumerate_group, longest_element,
                                named_spec, parabolic_elements)
from kl_descent.hecke import (HeckeAlgebra, check_kl_table, delta_n, kl_basis,
                              structure_constant_sweep, structure_constants, tau)
from kl_descent.laurent import ONE, LaurentPoly

import oracles


def e(k, c=1):
    return LaurentPoly.monomial(k, c)


@pytest.fixture(scope="module")
def b2():
    t = enumerate_group(named_spec("B2", (1, 2)))
    return t, HeckeAlgebra(t)


def test_quadratic_relation(b2):
    t, H = b2
    for s, phi in enumerate((1, 2)):
        sw = t.element([s])
        assert H.multiply(H.T(sw), H.T(sw)) == {0: ONE, sw: e(phi) - e(-phi)}


def test_length_additive_products(b2):
    t, H = b2
    for x in range(t.size):
        for y in range(t.size):
            if t.length[t.mul(x, y)] == t.length[x] + t.length[y]:
                assert H.multiply(H.T(x), H.T(y)) == {t.mul(x, y): ONE}


@given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 7))
def test_associativity(x, y, z):
    t = enumerate_group(named_spec("B2", (1, 3)))
    H = HeckeAlgebra(t)
    a = {x: e(1) + 2, y: e(-2)}
    b, c = H.T(y), {z: ONE, x: e(3)}
    assert H.multiply(H.multiply(a, b), c) == H.multiply(a, H.multiply(b, c))


@given(st.integers(0, 11), st.integers(0, 11))
def test_bar_is_an_involutive_ring_map(x, y):
    t = enumerate_group(named_spec("I2(6)", (1, 2)))
    H = HeckeAlgebra(t)
    a = {x: e(2) - 1}
    b = {y: e(-1), 0: ONE}
    assert H.bar(H.bar(a)) == a
    assert H.bar(H.multiply(a, b)) == H.multiply(H.bar(a), H.bar(b))


def test_oracle_hecke_products_agree():
    t = enumerate_group(named_spec("B2", (2, 1)))
    H = HeckeAlgebra(t)
    W = oracles.hyperoctahedral_group(2, (2, 1))
    N = oracles.NaiveHecke(W)
    el = [W.from_word(t.word[w]) for w in range(t.size)]
    for x in range(t.size):
        for y in range(t.size):
            ours = H.multiply(H.T(x), H.T(y))
            theirs = N.mul({el[x]: {0: 1}}, {el[y]: {0: 1}})
            assert {el[w]: c.terms for w, c in ours.items()} == theirs


def test_tau_on_standard_basis(b2):
    t, H = b2
    assert tau(H.T(0)) == ONE
    assert all(not tau(H.T(w)) for w in range(1, t.size))


@pytest.mark.parametrize("name,weights", [
    ("A1", None), ("A2", None), ("A3", None), ("B2", (1, 1)), ("B2", (1, 2)),
    ("B2", (2, 1)), ("B2", (1, 3)), ("G2", (3, 1)), ("I2(5)", (2, 2)), ("I2(8)", (3, 1)),
])
def test_kl_basis_defining_properties(name, weights):
    t = enumerate_group(named_spec(name, weights))
    assert check_kl_table(kl_basis(t)) == []


def test_c_s_formula():
    t = enumerate_group(named_spec("B2", (1, 3)))
    kl = kl_basis(t)
    for s, phi in enumerate((1, 3)):
        w = t.element([s])
        assert kl.C[w] == {w: ONE, 0: e(-phi)}


@pytest.mark.parametrize("name,weights", [("A2", None), ("A3", None), ("B2", (1, 2)),
                                          ("B2", (1, 1)), ("B3", (1, 1, 2))])
def test_longest_coset_formula(name, weights):
    t = enumerate_group(named_spec(name, weights))
    kl = kl_basis(t)
    for r in range(t.rank + 1):
        for subset in itertools.combinations(range(t.rank), r):
            w0 = longest_element(t, subset)
            expect = {w: e(t.weight[w] - t.weight[w0]) for w in parabolic_elements(t, subset)}
            assert kl.C[w0] == expect


@pytest.mark.parametrize("name,weights,oracle", [
    ("A2", None, lambda: oracles.symmetric_group(3)),
    ("A3", None, lambda: oracles.symmetric_group(4)),
    ("B2", (1, 2), lambda: oracles.hyperoctahedral_group(2, (1, 2))),
    ("B2", (1, 3), lambda: oracles.hyperoctahedral_group(2, (1, 3))),
])
def test_kl_polynomials_against_linear_algebra_oracle(name, weights, oracle):
    t = enumerate_group(named_spec(name, weights))
    kl = kl_basis(t)
    W = oracle()
    C = oracles.kl_basis(W)
    el = [W.from_word(t.word[w]) for w in range(t.size)]
    for w in range(t.size):
        assert {el[y]: p.terms for y, p in kl.C[w].items()} == C[el[w]]


@pytest.mark.parametrize("name,weights", [("A2", None), ("B2", (1, 2)), ("G2", (1, 3)),
                                          ("A3", None)])
def test_sweep_agrees_with_direct_products(name, weights):
    t = enumerate_group(named_spec(name, weights))
    kl = kl_basis(t)
    H = HeckeAlgebra(t)
    sweep = structure_constant_sweep(t, kl, H)
    for x in range(t.size):
        for y in range(t.size):
            assert sweep.rows[x][y] == structure_constants(t, kl, x, y, H)


def test_structure_constants_bar_invariant_and_unit():
    for name, w in [("A2", None), ("B2", (1, 2))]:
        t = enumerate_group(named_spec(name, w))
        h = structure_constant_sweep(t, kl_basis(t))
        assert all(p.is_bar_invariant() for *_, p in h.items())
        for y in range(t.size):
            assert h.product(0, y) == {y: ONE} == h.product(y, 0)


def test_kl_basis_is_equivariant_under_triality():
    t = enumerate_group(named_spec("D4"))
    kl = kl_basis(t)
    g = DiagramAutGroup.generate(t.spec, [[3, 2, 4, 1]])
    for sigma in g.elements[1:]:
        tab = act_table(t, sigma)
        for w in range(t.size):
            assert {tab[y]: p for y, p in kl.C[w].items()} == kl.C[tab[w]]


def test_delta_and_n_on_a2():
    t = enumerate_group(named_spec("A2"))
    kl = kl_basis(t)
    assert [delta_n(kl, w) for w in range(t.size)] == [(0, 1), (1, 1), (1, 1), (2, 1), (2, 1),
                                                       (3, 1)]
    assert kl.C[t.longest] == {w: e(t.length[w] - 3) for w in range(t.size)}


def test_parallel_sweep_matches_serial():
    t = enumerate_group(named_spec("B3"))
    kl = kl_basis(t)
    assert structure_constant_sweep(t, kl, workers=2).rows == structure_constant_sweep(t, kl).rows
