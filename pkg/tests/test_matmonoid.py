from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genrep_fq.errors import BudgetExceeded, CtxMismatch, DimensionMismatch
from genrep_fq.matmonoid import (Mat, all_subspaces, compose_table, composer, conjugacy_orbits,
                                 enumerate_mats, enumerate_subspaces, format_mat,
                                 gaussian_binomial, gl_generators, gl_indices, gl_order, hom_set,
                                 inverse_index, is_semi_idempotent, parse_mat, rank_and_kernel,
                                 section_for_subspace, subspace_image)
from genrep_fq.scalars import field_ctx


def vectors(q, n):
    return list(product(range(q), repeat=n))


def image_set(A):
    """Oracle: the set of all ``A v`` by brute force."""
    return {A.apply(v) for v in vectors(A.ctx.q, A.cols)}


def brute_rank(A):
    size = len(image_set(A))
    r = 0
    while A.ctx.q ** r < size:
        r += 1
    return r


def test_identity_and_zero():
    ctx = field_ctx(3)
    I = Mat.identity(ctx, 2)
    assert I.to_rows() == [[1, 0], [0, 1]]
    assert Mat.zero(ctx, 2, 3).index == 0
    assert Mat.eye_partial(ctx, 3, 2).to_rows() == [[1, 0, 0], [0, 1, 0], [0, 0, 0]]


def test_index_is_row_major_base_q():
    ctx = field_ctx(3)
    A = Mat.from_rows(ctx, [[1, 2], [0, 1]])
    assert A.index == 1 * 27 + 2 * 9 + 0 * 3 + 1
    assert hom_set(ctx, 2, 2).mat(A.index) == A


@pytest.mark.parametrize("q,m,n", [(2, 2, 3), (3, 2, 2), (4, 1, 2), (9, 1, 1)])
def test_format_parse_round_trip(q, m, n):
    H = hom_set(field_ctx(q), m, n)
    for i in range(0, H.size, max(1, H.size // 50)):
        A = H.mat(i)
        assert parse_mat(format_mat(A)) == A


def test_format_example():
    A = Mat.from_rows(field_ctx(2), [[1, 0], [1, 1]])
    assert format_mat(A) == "2:2x2:1011"


@pytest.mark.parametrize("q", [2, 3, 5])
def test_compose_table_matches_numpy(q):
    ctx = field_ctx(q)
    for a, b, c in [(2, 2, 2), (1, 2, 3), (3, 1, 2)]:
        T = compose_table(ctx, a, b, c)
        X = hom_set(ctx, b, c).entries_array().reshape(-1, c, b)
        Y = hom_set(ctx, a, b).entries_array().reshape(-1, b, a)
        for i in range(0, len(X), 3):
            for j in range(0, len(Y), 5):
                prod = (X[i] @ Y[j]) % q
                digits = prod.reshape(-1)
                idx = int(sum(int(d) * q ** k for k, d in enumerate(digits[::-1])))
                assert T[i][j] == idx


@given(st.integers(0, 511), st.integers(0, 511), st.integers(0, 511))
@settings(max_examples=300, deadline=None)
def test_composition_associative(a, b, c):
    ctx = field_ctx(2)
    H = hom_set(ctx, 3, 3)
    A, B, C = H.mat(a), H.mat(b), H.mat(c)
    assert (A @ B) @ C == A @ (B @ C)
    comp = composer(ctx, 3, 3, 3)
    assert comp(comp(a, b), c) == comp(a, comp(b, c))


@given(st.integers(0, 80), st.integers(0, 80))
@settings(max_examples=200, deadline=None)
def test_transpose_reverses_products(a, b):
    H = hom_set(field_ctx(3), 2, 2)
    A, B = H.mat(a), H.mat(b)
    assert (A @ B).T == B.T @ A.T


@pytest.mark.parametrize("q,n", [(2, 2), (2, 3), (3, 2), (4, 2)])
def test_rank_against_brute_force(q, n):
    H = hom_set(field_ctx(q), n, n)
    step = max(1, H.size // 200)
    for i in range(0, H.size, step):
        assert H.ranks[i] == brute_rank(H.mat(i))


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2), (5, 2)])
def test_gl_order(q, n):
    ctx = field_ctx(q)
    count = sum(1 for A in hom_set(ctx, n, n) if len(image_set(A)) == q ** n)
    assert count == gl_order(q, n) == len(gl_indices(ctx, n))


def test_gl_orders_frozen():
    assert [gl_order(2, n) for n in range(4)] == [1, 1, 6, 168]
    assert gl_order(3, 2) == 48 and gl_order(5, 2) == 480


def test_inverse_index():
    ctx = field_ctx(3)
    comp = composer(ctx, 2, 2, 2)
    ident = Mat.identity(ctx, 2).index
    for g, h in inverse_index(ctx, 2).items():
        assert comp(g, h) == ident == comp(h, g)


@pytest.mark.parametrize("q,n", [(2, 2), (2, 3), (3, 2), (4, 2)])
def test_generators_generate(q, n):
    ctx = field_ctx(q)
    comp = composer(ctx, n, n, n)
    gens = [g.index for g in gl_generators(ctx, n)]
    seen = {Mat.identity(ctx, n).index}
    frontier = list(seen)
    while frontier:
        frontier = [comp(g, x) for x in frontier for g in gens]
        frontier = [x for x in set(frontier) if x not in seen]
        seen.update(frontier)
    assert seen == set(gl_indices(ctx, n))


def brute_subspaces(q, n):
    """Oracle: every subspace as the frozenset of its vectors."""
    vecs = vectors(q, n)
    ctx = field_ctx(q)
    out = set()
    for A in hom_set(ctx, n, n):
        out.add(frozenset(image_set(A)))
    assert all(len(W) in {q ** d for d in range(n + 1)} for W in out)
    return out, vecs


@pytest.mark.parametrize("q,n", [(2, 2), (2, 3), (3, 2), (4, 2)])
def test_subspace_counts(q, n):
    subs, _ = brute_subspaces(q, n)
    ctx = field_ctx(q)
    for d in range(n + 1):
        expected = sum(1 for W in subs if len(W) == q ** d)
        assert gaussian_binomial(n, d, q) == expected
        assert len(enumerate_subspaces(ctx, n, n - d)) == expected
    assert len(all_subspaces(ctx, n)) == len(subs)


def test_gaussian_binomials_frozen():
    assert [gaussian_binomial(2, k, 2) for k in range(3)] == [1, 3, 1]
    assert [gaussian_binomial(3, k, 2) for k in range(4)] == [1, 7, 7, 1]
    assert [gaussian_binomial(2, k, 3) for k in range(3)] == [1, 4, 1]
    assert gaussian_binomial(2, 3, 2) == 0


def test_section_example():
    ctx = field_ctx(2)
    W = [U for U in enumerate_subspaces(ctx, 2, 1) if U.basis.to_rows() == [[1, 0]]][0]
    pi, sigma = section_for_subspace(W, 1)
    assert pi.to_rows() == [[0, 1]]
    assert sigma.to_rows() == [[0], [1]]


@pytest.mark.parametrize("q,n", [(2, 3), (3, 2)])
def test_sections_split(q, n):
    ctx = field_ctx(q)
    for k in range(n + 1):
        for W in enumerate_subspaces(ctx, n, k):
            pi, sigma = section_for_subspace(W, k)
            assert pi @ sigma == Mat.identity(ctx, k)
            assert rank_and_kernel(pi)[1] == W


def test_kernel_and_image():
    ctx = field_ctx(3)
    A = Mat.from_rows(ctx, [[1, 2, 0], [2, 1, 0]])
    r, W = rank_and_kernel(A)
    assert r == 1 and W.dim == 2
    for i in range(W.dim):
        assert A.apply(W.basis.row(i)) == (0, 0)
    U = enumerate_subspaces(ctx, 3, 2)[0]
    assert subspace_image(A, U).dim <= 1


def test_orbits_q2_n2():
    orbs = conjugacy_orbits(field_ctx(2), 2, "all_singular")
    assert [len(o) for o in orbs] == [1, 6, 3]


def test_orbits_q2_n3_frozen():
    ctx = field_ctx(2)
    orbs = conjugacy_orbits(ctx, 3, "all_singular", verify_full=True)
    assert [len(o) for o in orbs] == [1, 28, 21, 84, 56, 42, 84, 28]
    semi = conjugacy_orbits(ctx, 3, "semi_idempotent")
    assert [len(o) for o in semi] == [1, 28, 21, 42, 84, 28]


def brute_semi_idempotent(A):
    """Oracle: with ``P = A^(n+1)``, ``A`` fixes the image of ``P`` pointwise."""
    P = A
    for _ in range(A.rows):
        P = P @ A
    return all(A.apply(v) == v for v in image_set(P))


@pytest.mark.parametrize("q,n", [(2, 2), (2, 3), (3, 2)])
def test_semi_idempotent_against_oracle(q, n):
    for A in hom_set(field_ctx(q), n, n):
        assert is_semi_idempotent(A) == brute_semi_idempotent(A)


def test_enumerations():
    ctx = field_ctx(2)
    assert len(enumerate_mats(ctx, "inj", 2, 3)) == 42
    assert len(enumerate_mats(ctx, "surj", 3, 2)) == 42
    assert len(enumerate_mats(ctx, "sing", 2)) == 10
    with pytest.raises(BudgetExceeded):
        enumerate_mats(ctx, "hom", 3, 3, budget=100)


def test_errors():
    ctx = field_ctx(2)
    with pytest.raises(DimensionMismatch):
        Mat.identity(ctx, 2) @ Mat.identity(ctx, 3)
    with pytest.raises(CtxMismatch):
        Mat.identity(ctx, 2) @ Mat.identity(field_ctx(3), 2)


def test_inverse():
    ctx = field_ctx(5)
    A = Mat.from_rows(ctx, [[1, 2], [3, 4]])
    assert A @ A.inverse() == Mat.identity(ctx, 2)
    assert np.array(A.to_rows()).shape == (2, 2)
