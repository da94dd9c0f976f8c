import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from simonlab.fflinalg import (DimensionMismatch, EnumerationTooLarge, FieldSpec, FpMatrix,
                               Subspace, all_vectors, alpha, annihilator, beta, complement_in,
                               contains, contains_subspace, count_FD, dot, enumerate_matrices,
                               enumerate_subspaces, intersect, is_prime, kernel, matrix_catalog,
                               rref, sample_FD, subspace_sum, vec_add, vec_scale)


def brute_span(vectors, p, n):
    span = {(0,) * n}
    for v in vectors:
        span = {vec_add(s, vec_scale(c, v, p), p) for s in span for c in range(p)}
    return frozenset(span)


def brute_kernel(m):
    return {v for v in all_vectors(m.p, m.n) if not any(m.apply(v))}


# -- field and rref ---------------------------------------------------------

def test_field_rejects_composite():
    with pytest.raises(ValueError):
        FieldSpec(4, 2)
    with pytest.raises(ValueError):
        FieldSpec(2, 0)
    assert FieldSpec(3, 2).size == 9


@pytest.mark.parametrize("p,prime", [(2, True), (3, True), (9, False), (97, True),
                                     (2 ** 31 - 1, True), (1, False)])
def test_is_prime(p, prime):
    assert is_prime(p) is prime


def test_rref_duplicate_rows():
    space, rank = rref([[1, 1], [1, 1]], 2)
    assert space.basis == ((1, 1),) and rank == 1


def test_rref_identity():
    space, rank = rref(FpMatrix.identity(5, 3))
    assert space == Subspace.full(5, 3) and rank == 3


def test_rref_f3_scalar_multiple():
    # 2*(1,2) = (2,4) = (2,1) mod 3
    assert [(2 * a) % 3 for a in (1, 2)] == [2, 1]
    space, rank = rref([[1, 2], [2, 1]], 3)
    assert rank == 1 and space.basis == ((1, 2),)


# -- kernel -------------------------------------------------------------------

def test_kernel_zero_matrix():
    assert kernel(FpMatrix.zero(2, 2)).dim == 2


def test_kernel_identity():
    assert kernel(FpMatrix.identity(3, 3)).dim == 0


def test_kernel_example_against_enumeration():
    m = FpMatrix.from_rows([[1, 1], [0, 0]], 2)
    assert brute_kernel(m) == {(0, 0), (1, 1)}
    k = kernel(m)
    assert k.basis == ((1, 1),) and set(k.elements()) == brute_kernel(m)


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
def test_kernel_matches_brute_force_everywhere(p, n):
    for m in enumerate_matrices(n, p):
        assert set(kernel(m).elements()) == brute_kernel(m)


# -- subspace operations ------------------------------------------------------

def test_intersect_examples():
    a = Subspace.span([(1, 0)], 2, 2)
    b = Subspace.span([(0, 1)], 2, 2)
    assert intersect(a, b) == Subspace.zero(2, 2)
    assert intersect(a, a) == a
    line = Subspace.span([(1, 1)], 2, 2)
    assert intersect(line, Subspace.full(2, 2)) == line


def test_mismatched_fields_rejected():
    with pytest.raises(DimensionMismatch):
        intersect(Subspace.full(2, 2), Subspace.full(3, 2))
    with pytest.raises(DimensionMismatch):
        subspace_sum(Subspace.full(2, 2), Subspace.full(2, 3))
    with pytest.raises(DimensionMismatch):
        contains(Subspace.full(2, 2), (1, 0, 0))


def test_complement_examples():
    k = Subspace.full(2, 2)
    z = Subspace.span([(1, 1)], 2, 2)
    assert complement_in(k, k) == Subspace.zero(2, 2)
    assert complement_in(Subspace.zero(2, 2), k) == k
    y = complement_in(z, k)
    # direct-sum conditions, exhaustively
    ys, zs = set(y.elements()), set(z.elements())
    assert ys & zs == {(0, 0)}
    assert {vec_add(a, b, 2) for a in ys for b in zs} == set(all_vectors(2, 2))
    assert y.basis == ((1, 0),)


def test_complement_requires_containment():
    with pytest.raises(ValueError):
        complement_in(Subspace.span([(1, 0)], 2, 2), Subspace.span([(0, 1)], 2, 2))


def test_self_orthogonal_vector_exists():
    # why the complement is not taken as Z-perp ∩ K: (1,1) is orthogonal to itself over F_2
    z = Subspace.span([(1, 1)], 2, 2)
    assert dot((1, 1), (1, 1), 2) == 0
    assert contains_subspace(annihilator(z), z)


def vectors(p, n):
    return st.lists(st.integers(0, p - 1), min_size=n, max_size=n).map(tuple)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (5, 3), (2, 5)]).flatmap(
    lambda pn: st.tuples(st.just(pn),
                         st.lists(vectors(*pn), max_size=4),
                         st.lists(vectors(*pn), max_size=4))))
def test_dimension_formula_and_idempotence(args):
    (p, n), va, vb = args
    a = Subspace.span(va, p, n)
    b = Subspace.span(vb, p, n)
    assert a.dim + b.dim == intersect(a, b).dim + subspace_sum(a, b).dim
    assert rref(list(a.basis), p, n)[0] == a
    meet = intersect(a, b)
    assert contains_subspace(a, meet) and contains_subspace(b, meet)
    if p ** n <= 32:
        assert set(a.elements()) == brute_span(va, p, n)
        assert set(meet.elements()) == set(a.elements()) & set(b.elements())


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, 3), (3, 3), (7, 2)]).flatmap(
    lambda pn: st.tuples(st.just(pn),
                         st.lists(st.lists(st.integers(0, pn[0] - 1), min_size=pn[1],
                                           max_size=pn[1]), min_size=pn[1], max_size=pn[1]),
                         vectors(*pn), vectors(*pn))))
def test_matrix_linearity(args):
    (p, n), rows, x, y = args
    m = FpMatrix.from_rows(rows, p)
    assert m.apply(vec_add(x, y, p)) == vec_add(m.apply(x), m.apply(y), p)
    assert m.column(0) == m.apply(tuple(int(i == 0) for i in range(n)))


def test_canonical_equality_is_set_equality():
    # every spanning set of a 2-dim subspace of F_2^3 gives the same representation
    vecs = list(all_vectors(2, 3))
    by_set = {}
    for a, b, c in itertools.product(vecs, repeat=3):
        s = Subspace.span([a, b, c], 2, 3)
        key = brute_span([a, b, c], 2, 3)
        assert by_set.setdefault(key, s) == s


# -- counting -----------------------------------------------------------------

def brute_alpha(n, h, p):
    vecs = list(all_vectors(p, n))
    return sum(1 for tup in itertools.product(vecs, repeat=h)
               if len(brute_span(tup, p, n)) == p ** h)


def test_alpha_examples():
    assert alpha(3, 0, 2) == 1
    assert brute_alpha(2, 2, 2) == 6 and alpha(2, 2, 2) == 6
    assert brute_alpha(2, 1, 3) == 8 and alpha(2, 1, 3) == 8


def test_alpha_domain_error():
    with pytest.raises(ValueError):
        alpha(2, 3, 2)
    with pytest.raises(ValueError):
        beta(2, 3, 2)


def test_beta_examples():
    assert beta(2, 1, 2) == 3
    assert beta(3, 3, 5) == 1
    # distinct 2-dim spans of pairs of vectors in F_2^4
    vecs = list(all_vectors(2, 4))
    spans = {brute_span(pair, 2, 4) for pair in itertools.combinations(vecs, 2)}
    planes = {s for s in spans if len(s) == 4}
    assert len(planes) == 35 == beta(4, 2, 2)
    assert sum(1 for _ in enumerate_subspaces(4, 2, 2)) == 35


def test_count_FD_examples():
    mats = list(enumerate_matrices(2, 2))
    hist = Counter(len(brute_kernel(m)) for m in mats)
    assert hist[2] == 9 and count_FD(2, 1, 2) == 9
    assert hist[1] == 6 and count_FD(2, 0, 2) == 6
    assert count_FD(4, 4, 3) == 1


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 2), (5, 2), (3, 3)])
def test_counts_match_enumeration(p, n):
    cat = matrix_catalog(p, n)
    assert cat.counts_by_kernel_dim() == [count_FD(n, h, p) for h in range(n + 1)]
    assert sum(count_FD(n, h, p) for h in range(n + 1)) == p ** (n * n)
    for h in range(n + 1):
        subs = list(enumerate_subspaces(n, h, p))
        assert len(subs) == len(set(subs)) == beta(n, h, p) == beta(n, n - h, p)


def test_enumeration_cap():
    with pytest.raises(EnumerationTooLarge, match="cap 100"):
        list(enumerate_matrices(3, 2, cap=100))
    with pytest.raises(EnumerationTooLarge):
        matrix_catalog(2, 5)


def test_catalog_order_matches_enumerate_matrices():
    cat = matrix_catalog(3, 2)
    for i, m in enumerate(enumerate_matrices(2, 3)):
        assert cat.matrix(i) == m


# -- sampling -----------------------------------------------------------------

def test_sample_full_kernel_is_zero_map():
    for seed in range(5):
        assert sample_FD(3, 3, 2, seed) == FpMatrix.zero(2, 3)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 3), (5, 2)])
def test_sample_kernel_dim(p, n):
    for h in range(n + 1):
        for seed in range(10):
            assert kernel(sample_FD(n, h, p, seed)).dim == h


def test_sample_is_deterministic():
    assert sample_FD(4, 1, 3, seed=7) == sample_FD(4, 1, 3, seed=7)


def test_sample_uniform_over_invertible():
    draws = 60000
    rng = np.random.default_rng(2024)
    counts = Counter(sample_FD(2, 0, 2, rng).rows for _ in range(draws))
    assert len(counts) == 6  # exact count from enumeration
    expected = draws / 6
    sigma = (draws * (1 / 6) * (5 / 6)) ** 0.5
    assert all(abs(c - expected) <= 3 * sigma for c in counts.values())


def test_json_roundtrip():
    m = FpMatrix.from_json({"p": 3, "n": 2, "rows": [[4, 1], [0, 2]]})
    assert m.rows == ((1, 1), (0, 2))
    assert FpMatrix.from_json(m.to_json()) == m
    s = Subspace.span([(1, 2), (2, 1)], 3, 2)
    assert Subspace.from_json(s.to_json()) == s
