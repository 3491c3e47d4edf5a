import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from genrep_fq.errors import CtxMismatch, DimensionMismatch
from genrep_fq.matmonoid import Mat, hom_set
from genrep_fq.monoidring import (GroupAlgElem, RingElem, compose, in_singular_ideal, predicates,
                                  quotient_to_gl)
from genrep_fq.scalars import QQ, coeff_ring, field_ctx

CTX = field_ctx(2)
H22 = hom_set(CTX, 2, 2)

small_elem = st.dictionaries(st.integers(0, 15), st.fractions(-3, 3, max_denominator=4),
                             max_size=5)


def elem(terms, src=2, tgt=2, ctx=CTX, ring=QQ):
    return RingElem(ring, ctx, src, tgt, terms)


def naive_product(x, y):
    """Oracle: expand the product term by term through ``Mat @``."""
    Hs = hom_set(x.ctx, y.src, x.tgt)
    out = {}
    for A, a in x.items():
        for B, b in y.items():
            k = Hs.index(A @ B)
            out[k] = out.get(k, 0) + a * b
    return RingElem(x.ring, x.ctx, y.src, x.tgt, out)


@given(small_elem, small_elem)
@settings(max_examples=200, deadline=None)
def test_product_matches_naive(a, b):
    x, y = elem(a), elem(b)
    assert x * y == naive_product(x, y)


@given(small_elem, small_elem, small_elem)
@settings(max_examples=500, deadline=None)
def test_associative(a, b, c):
    x, y, z = elem(a), elem(b), elem(c)
    assert (x * y) * z == x * (y * z)


@given(small_elem, small_elem)
@settings(max_examples=200, deadline=None)
def test_transpose_anti_automorphism(a, b):
    x, y = elem(a), elem(b)
    assert (x * y).transpose() == y.transpose() * x.transpose()


@given(small_elem, small_elem)
@settings(max_examples=200, deadline=None)
def test_quotient_is_multiplicative(a, b):
    x, y = elem(a), elem(b)
    assert quotient_to_gl(x * y) == quotient_to_gl(x) * quotient_to_gl(y)


def test_unit_and_distributivity():
    x = elem({3: Fraction(1, 2), 9: 2})
    one = RingElem.one(QQ, CTX, 2)
    assert one * x == x == x * one
    assert x * (x + one) == x * x + x
    assert (x - x).is_zero()
    assert x.augmentation() == Fraction(5, 2)


def test_rectangular_composition():
    ctx = field_ctx(3)
    A = Mat.from_rows(ctx, [[1, 2]])         # F^2 -> F^1
    B = Mat.from_rows(ctx, [[1], [1]])       # F^1 -> F^2
    x = RingElem.basis(QQ, A) * RingElem.basis(QQ, B)
    assert (x.src, x.tgt) == (1, 1)
    assert x == RingElem.basis(QQ, Mat.from_rows(ctx, [[0]]))
    with pytest.raises(DimensionMismatch):
        compose(RingElem.basis(QQ, A), RingElem.basis(QQ, A))


def test_context_checks():
    x = RingElem.one(QQ, CTX, 2)
    with pytest.raises(CtxMismatch):
        x + RingElem.one(coeff_ring("gf:3"), CTX, 2)
    with pytest.raises(CtxMismatch):
        x * RingElem.one(QQ, field_ctx(3), 2)


@pytest.mark.parametrize("ring", [QQ, coeff_ring("gf:5")])
def test_json_round_trip(ring):
    x = elem({1: ring(3), 6: ring(Fraction(1, 2)), 15: ring(-1)}, ring=ring)
    text = x.dumps()
    assert RingElem.from_json(ring, json.loads(text)) == x


def test_group_algebra():
    g = H22.mat(6)  # [[0,1],[1,0]]
    s = GroupAlgElem.group_element(QQ, g)
    assert s * s == GroupAlgElem.one(QQ, CTX, 2)
    assert s.to_ring_elem() == RingElem.basis(QQ, g)


def test_predicates_of_identity():
    flags = predicates(RingElem.one(QQ, CTX, 2))
    assert flags["idempotent"] and flags["central"] and flags["gl_conjugation_fixed"]
    assert flags["fixes_singulars"]
    assert not flags["unit_on_singulars"]
    assert not in_singular_ideal(RingElem.one(QQ, CTX, 2))


def test_predicates_of_basis_singular():
    x = RingElem.basis(QQ, Mat.from_rows(CTX, [[1, 0], [0, 0]]))
    flags = predicates(x)
    assert flags["idempotent"] and flags["in_singular_ideal"]
    assert not flags["central"] and not flags["gl_conjugation_fixed"]
    assert not flags["unit_on_singulars"]
