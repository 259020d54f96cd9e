import warnings

import pytest
from hypothesis import given, settings, strategies as st

from multikoszul.jspaces import JFamily
from multikoszul.linalg import QQ
from multikoszul.presentation import TruncatedAlgebra, load_presentation, parse_presentation
from multikoszul.yoneda import (FORMAL_NOTE, HypothesisError, ainf_coproducts, c_sign, check_associativity,
                                check_counit, check_stasheff, check_unit, compose, graded_dual, k2_check,
                                odd_tuples, twisted_complex_check, yoneda_products)

from conftest import corpus_path

XI = (1, 1, 0)          # dual of x in Ext^1
ETA = (2, 3, 0)         # dual of x³ in Ext^2


def structure(p, H=6, D=12, n_max=4, **kw):
    jf = JFamily(p, D).upto(H)
    return jf, ainf_coproducts(jf, n_max, D, H, koszul=True, **kw)


@pytest.fixture(scope="module")
def trunc3():
    return structure(parse_presentation("gens: x:1; rels: x^3"))


@pytest.fixture(scope="module")
def poly2():
    return structure(parse_presentation("gens: x:1, y:1; rels: x*y - y*x"), H=4, D=10)


def test_odd_tuples():
    assert list(odd_tuples(4, 2)) == [(1, 3), (3, 1)]
    assert list(odd_tuples(3, 3)) == [(1, 1, 1)]
    assert list(odd_tuples(4, 3)) == []
    assert list(odd_tuples(0, 0)) == [()]


def test_c_sign():
    assert c_sign((1, 1)) == -1
    assert c_sign((2, 1)) == 1
    assert c_sign((1, 1, 1)) == -1
    assert c_sign((0, 5, 3)) == -1


@given(st.lists(st.integers(0, 5), min_size=1, max_size=5))
def test_c_sign_matches_pairwise_koszul_rule(degs):
    # the swap sign is a product over all pairs l < l'
    s = sum(degs[a] * degs[b] for a in range(len(degs)) for b in range(a + 1, len(degs)))
    assert c_sign(tuple(degs)) == (-1) ** s


def test_trunc3_products(trunc3):
    jf, s = trunc3
    assert s.m((XI, XI)) == {}
    assert s.m((XI, ETA)) == {(3, 4, 0): 1}
    # m_3 on three copies of ξ is nonzero; its sign depends on the dual-sign convention
    assert s.m((XI, XI, XI)) == {ETA: 1}
    _, plain = structure(parse_presentation("gens: x:1; rels: x^3"), dual_sign=False)
    assert plain.m((XI, XI, XI)) == {ETA: -1}


def test_unit_acts_trivially(trunc3):
    jf, s = trunc3
    one = (0, 0, 0)
    for f in [XI, ETA, (3, 4, 0)]:
        assert s.m((one, f)) == {f: 1}
        assert s.m((f, one)) == {f: 1}


def test_poly2_has_no_higher_coproducts(poly2):
    jf, s = poly2
    for n in (3, 4):
        for i in range(5):
            for x in s.elements(i):
                assert s.delta(n, x) == {}
    assert s.delta(3, (0, 0, 0)) == {}


@pytest.mark.parametrize("name", ["trunc3", "trunc4", "mixed23", "cubic2", "poly2"])
def test_stasheff_identities(name):
    _, s = structure(load_presentation(corpus_path(name)), H=5, D=11)
    for kw in ({}, {"dual": True}, {"reduced": True}):
        rep = check_stasheff(s, **kw)
        assert rep.ok, (kw, rep.violations[:3])
        assert all(v > 0 for v in rep.checked.values())
    assert check_counit(s)


def test_stasheff_without_dual_sign():
    _, s = structure(load_presentation(corpus_path("trunc3")), dual_sign=False)
    assert check_stasheff(s, dual=True).ok


def test_fault_injection_detected(trunc3):
    _, s = structure(parse_presentation("gens: x:1; rels: x^3"))
    s.fault = (3, ETA)
    rep = check_stasheff(s)
    assert not rep.ok
    v = rep.violations[0]
    assert set(v) == {"n", "i", "adams", "element", "entry", "value"}
    assert (v["n"], v["i"], v["adams"]) == (4, 4, 6)
    s.fault = (2, XI)
    assert not check_stasheff(s).ok
    s.fault = None
    assert check_stasheff(s).ok


@pytest.mark.parametrize("name,D", [("trunc3", 12), ("free2", 10), ("poly2", 10), ("mixed23", 10)])
def test_twisted_differential_matches_right_complex(name, D):
    p = load_presentation(corpus_path(name))
    _, s = structure(p, H=5, D=D)
    rep = twisted_complex_check(s, TruncatedAlgebra(p, D), 4)
    assert rep.equal, rep.mismatches[:3]
    assert rep.plain_sign_pattern


def test_product_table_trunc3(trunc3):
    jf, s = trunc3
    t = yoneda_products(jf, 6, structure=s)
    assert check_unit(t)
    assert check_associativity(t)
    assert t.product(XI, ETA) == {(3, 4, 0): 1}
    k2 = k2_check(t)
    assert k2.ok
    assert all(v == (1, 1) for v in k2.per_degree.values())


def test_product_table_poly2(poly2):
    jf, s = poly2
    t = yoneda_products(jf, 4, structure=s)
    assert check_unit(t) and check_associativity(t)
    assert k2_check(t).ok
    # Ext of a polynomial ring is an exterior algebra: ξ_x ξ_y = −ξ_y ξ_x ≠ 0
    a, b = (1, 1, 0), (1, 1, 1)
    ab, ba = t.product(a, b), t.product(b, a)
    assert ab and ab == {k: -v for k, v in ba.items()}


def test_products_respect_bidegree(trunc3):
    jf, s = trunc3
    t = yoneda_products(jf, 6, structure=s)
    for (i, j), tab in t.entries.items():
        for (f, g), v in tab.items():
            for w in v:
                assert w[0] == i + j and w[1] == f[1] + g[1]


def test_k2_failure_is_reported(trunc3):
    jf, s = trunc3
    t = yoneda_products(jf, 6, structure=s)
    t.entries[(1, 2)] = {}
    t.entries[(2, 1)] = {}
    rep = k2_check(t)
    assert not rep.ok
    assert rep.first_failure == (3, 4)


def test_hypothesis_gate():
    p = load_presentation(corpus_path("nonkoszul"))
    jf = JFamily(p, 8).upto(4)
    with pytest.raises(HypothesisError):
        ainf_coproducts(jf, koszul=False)
    with pytest.raises(HypothesisError):
        yoneda_products(jf, 3)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        t = yoneda_products(jf, 3, force=True)
    assert FORMAL_NOTE in t.notes
    assert any(FORMAL_NOTE in str(w.message) for w in caught)


def _random_map(draw, src_deg, n_src, tgt_deg, n_tgt):
    out = {}
    for a in range(n_src):
        img = {}
        for b in range(n_tgt):
            c = draw(st.integers(-2, 2))
            if c:
                img[(tgt_deg, b)] = c
        if img:
            out[(src_deg, a)] = img
    return out


@st.composite
def composable(draw):
    u = draw(st.integers(0, 3))
    df, dg = draw(st.integers(0, 3)), draw(st.integers(0, 3))
    nu, nv, nw = (draw(st.integers(1, 3)) for _ in range(3))
    f = _random_map(draw, u, nu, u + df, nv)
    g = _random_map(draw, u + df, nv, u + df + dg, nw)
    return f, df, g, dg


@settings(max_examples=60)
@given(composable())
def test_graded_dual_sign_law(data):
    f, df, g, dg = data
    lhs = graded_dual(compose(g, f, QQ), df + dg, QQ)
    rhs = compose(graded_dual(f, df, QQ), graded_dual(g, dg, QQ), QQ)
    sign = (-1) ** (df * dg)
    assert lhs == {k: {j: sign * c for j, c in v.items()} for k, v in rhs.items()}
