import pytest

from multikoszul.linalg import LinAlgError
from multikoszul.jspaces import JFamily, compute_J, compute_Jtilde, n_s, special_summands, weak_compositions
from multikoszul.presentation import free_product, load_presentation, opposite, parse_presentation
from multikoszul.tensoralg import (GradedSubspace, InputError, graded_intersect, is_tif, parse_poly,
                                   subspace_product)

from conftest import corpus_names, corpus_path

TRUNC3 = parse_presentation("gens: x:1; rels: x^3")
POLY2 = parse_presentation("gens: x:1, y:1; rels: x*y - y*x")


def nonzero_dims(jf, i):
    J = jf[i]
    return {n: J[n].dim for n in J.support()}


def test_weak_compositions():
    assert list(weak_compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert list(weak_compositions(0, 3)) == [(0, 0, 0)]
    assert len(list(weak_compositions(3, 3))) == 10


def test_n_s():
    assert [n_s(3, i) for i in range(7)] == [0, 1, 3, 4, 6, 7, 9]
    assert [n_s(2, i) for i in range(5)] == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("N", [2, 3, 4])
def test_truncated_polynomial_dims(N):
    p = parse_presentation(f"gens: x:1; rels: x^{N}")
    jf = compute_J(p, 8, 4 * N + 1)
    for i in range(9):
        assert nonzero_dims(jf, i) == ({n_s(N, i): 1} if n_s(N, i) <= 4 * N + 1 else {})


def test_low_levels():
    jf = compute_J(POLY2, 3, 8)
    assert jf[0] == GradedSubspace.unit(POLY2.gens, 8)
    assert jf[1] == GradedSubspace.generators(POLY2.gens, 8)
    assert jf[2] == jf.R
    assert jf[3].is_zero()


def test_free_algebra_vanishes():
    jf = compute_J(parse_presentation("gens: x:1, y:1"), 5, 8)
    assert all(jf[i].is_zero() for i in range(2, 6))
    assert jf.forced_zero[3]


def test_j3_is_two_term_intersection():
    for name in ("cubic2", "mixed23", "sym_2_0", "nonkoszul"):
        jf = compute_J(load_presentation(corpus_path(name)), 3, 10)
        V, R = jf.V, jf.R
        assert jf[3] == graded_intersect(subspace_product(V, R), subspace_product(R, V))


@pytest.mark.parametrize("name", [n for n in corpus_names() if n != "sym_3_2"])
def test_recursion_variants_agree(name):
    jf = JFamily(load_presentation(corpus_path(name)), 10, debug=True).upto(6)
    assert not jf.mismatch_debug


@pytest.mark.parametrize("name", ["trunc3", "poly2", "cubic2", "mixed23", "sym_2_0"])
def test_containments(name):
    jf = compute_J(load_presentation(corpus_path(name)), 6, 10)
    R, V = jf.R, jf.V
    for i in range(2, 7):
        Ji = jf[i]
        for n in Ji.support():
            for rhs in (subspace_product(R, jf[i - 2]), subspace_product(jf[i - 2], R)):
                assert rhs[n].contains_space(Ji[n])
    for j in range(1, 4):
        Rj = jf.rpower(j)
        for n in jf[2 * j].support():
            assert Rj[n].contains_space(jf[2 * j][n])
        odd = graded_intersect(subspace_product(V, Rj), subspace_product(Rj, V))
        for n in jf[2 * j + 1].support():
            assert odd[n].contains_space(jf[2 * j + 1][n])


@pytest.mark.parametrize("name", ["trunc3", "poly2", "mixed23"])
def test_product_inclusions(name):
    jf = compute_J(load_presentation(corpus_path(name)), 6, 12)
    for j in range(2, 7):
        for i in range(1, j):
            if i % 2 == 1 and j % 2 == 0:
                continue
            for prod in (subspace_product(jf[j - i], jf[i]), subspace_product(jf[i], jf[j - i])):
                for n in jf[j].support():
                    assert prod[n].contains_space(jf[j][n])


@pytest.mark.parametrize("name", ["trunc3", "poly2", "cubic2", "sym_2_0"])
def test_j_spaces_tif(name):
    jf = compute_J(load_presentation(corpus_path(name)), 5, 9)
    for i in range(6):
        assert is_tif(jf[i], "left") and is_tif(jf[i], "right")


@pytest.mark.parametrize("name", ["trunc2", "trunc3", "trunc4", "poly2", "free2", "cubic2", "mixed23", "nonkoszul"])
def test_j_equals_jtilde(name):
    p = load_presentation(corpus_path(name))
    jt = compute_Jtilde(p, 6, 10)
    jf = compute_J(p, 6, 10)
    assert all(jt[i] == jf[i] for i in range(7))


def test_jtilde_requires_degree_one():
    with pytest.raises(InputError):
        compute_Jtilde(load_presentation(corpus_path("sym_2_0")), 3, 8)


def test_jtilde_two_is_r():
    p = load_presentation(corpus_path("cubic2"))
    assert compute_Jtilde(p, 2, 8)[2] == compute_J(p, 2, 8).R


def test_free_product_is_direct_sum():
    a, b = parse_presentation("gens: x:1; rels: x^3"), POLY2
    fp = free_product(a, b)
    ja, jb, jab = compute_J(a, 5, 9), compute_J(b, 5, 9), compute_J(fp, 5, 9)
    for i in range(1, 6):
        for n in range(10):
            assert jab[i][n].dim == ja[i][n].dim + jb[i][n].dim
            shifted = [{tuple(g + 1 for g in w): c for w, c in v.items()} for v in jb[i][n].basis]
            for v in ja[i][n].basis + shifted:
                assert jab[i][n].contains(v)


@pytest.mark.parametrize("name", ["cubic2", "nonkoszul", "mixed23"])
def test_opposite_reverses_words(name):
    p = load_presentation(corpus_path(name))
    j, jo = compute_J(p, 5, 9), compute_J(opposite(p), 5, 9)
    assert all(jo[i] == j[i].reversed() for i in range(6))


# -- special decompositions and iota maps ---------------------------------------------

def test_decomposition_of_trunc3():
    jf = compute_J(TRUNC3, 4, 12)
    dec = special_summands(jf, (2,), 4)
    # x^4 = x·x^3 = x^3·x: only the one-letter sandwich summand
    comps = dec.decompose({(0,) * 4: 1})
    assert comps == {1: {(0,) * 4: 1}}
    assert dec.decompose({}) == {}
    dec6 = special_summands(jf, (2, 2), 6)
    assert dec6.decompose({(0,) * 6: 1}) == {0: {(0,) * 6: 1}}


def test_decomposition_rejects_non_member():
    jf = compute_J(POLY2, 4, 8)
    dec = special_summands(jf, (2,), 3)
    with pytest.raises(LinAlgError):
        dec.decompose({(0, 1, 0): 1})


def test_iota_examples():
    jf = compute_J(TRUNC3, 6, 12)
    assert jf.iota2(2, 1, 4) == {0: {((3, 0), (1, 0)): 1}}
    assert jf.iota2(0, 2, 3) == {0: {((0, 0), (3, 0)): 1}}
    assert jf.iota2(1, 1, 3) == {0: {}}
    assert jf.iota_multi((1, 1, 1), 3) == {0: {((1, 0), (1, 0), (1, 0)): 1}}
    assert jf.iota_multi((3, 1, 1), 6) == {0: {((4, 0), (1, 0), (1, 0)): 1}}
    assert jf.iota_multi((1, 1, 1, 1), 4) == {}


def test_iota_multi_requires_odd():
    jf = compute_J(TRUNC3, 4, 8)
    with pytest.raises(ValueError):
        jf.iota_multi((1, 2, 1), 4)


def test_iota_two_even_case_is_factorization():
    jf = compute_J(POLY2, 2, 6)
    img = jf.iota2(1, 1, 2)[0]
    r = jf.basis(2, 2)[0]
    rebuilt = {}
    for ((a, ka), (b, kb)), c in img.items():
        w = next(iter(jf.basis(1, a)[ka])) + next(iter(jf.basis(1, b)[kb]))
        rebuilt[w] = rebuilt.get(w, 0) + c
    assert rebuilt == r


def test_relation_example():
    jf = compute_J(POLY2, 2, 4)
    assert jf.basis(2, 2) == [parse_poly("x*y - y*x", POLY2.gens)]
