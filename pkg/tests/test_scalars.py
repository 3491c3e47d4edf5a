from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from genrep_fq.errors import CtxMismatch, GenrepError, NotInvertible
from genrep_fq.scalars import (QQ, SUPPORTED_Q, PrimeField, Residue, check_field_axioms,
                               coeff_ring, field_ctx)


@pytest.mark.parametrize("q", SUPPORTED_Q)
def test_field_axioms_exhaustive(q):
    assert check_field_axioms(field_ctx(q))


@pytest.mark.parametrize("q", SUPPORTED_Q)
def test_generator_has_full_order(q):
    ctx = field_ctx(q)
    g = ctx(0).ctx.elem(ctx.generator)
    powers = set()
    x = g
    for _ in range(q - 1):
        powers.add(x.code)
        x = x * g
    assert powers == set(range(1, q))


def test_gf4_multiplication_by_hand():
    # x^2 = x + 1 in F_4
    ctx = field_ctx(4)
    x = ctx((0, 1))
    assert x * x == ctx((1, 1))
    assert x * x * x == ctx(1)


def test_gf9_i_squared_is_minus_one():
    ctx = field_ctx(9)
    i = ctx((0, 1))
    assert i * i == ctx(-1)


def test_gf8_characteristic_two():
    ctx = field_ctx(8)
    for a in ctx.elements():
        assert a + a == ctx(0)


def test_format_parse_round_trip():
    for q in SUPPORTED_Q:
        ctx = field_ctx(q)
        for c in range(q):
            assert ctx.parse_code(ctx.format_code(c)) == c


def test_mixed_fields_rejected():
    with pytest.raises(CtxMismatch):
        field_ctx(4)(1) + field_ctx(8)(1)


def test_zero_has_no_inverse():
    with pytest.raises(NotInvertible):
        field_ctx(5)(0).inv()


def test_unsupported_q():
    with pytest.raises(GenrepError):
        field_ctx(6)


def test_residues():
    F3 = PrimeField(3)
    assert F3(2) * F3(2) == F3(1)
    assert F3.inv(F3(2)) == F3(2)
    assert F3(Fraction(1, 2)) == F3(2)
    assert not F3.is_unit_int(3)
    with pytest.raises(CtxMismatch):
        Residue(1, 3) + Residue(1, 5)


def test_rational_format():
    assert QQ.fmt(Fraction(-1, 2)) == "-1/2"
    assert QQ.fmt(Fraction(3)) == "3/1"
    assert QQ.parse("-1/2") == Fraction(-1, 2)
    assert coeff_ring("rat") is QQ
    assert coeff_ring("gf:7").name == "gf:7"


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8))
def test_gf9_distributive(a, b, c):
    ctx = field_ctx(9)
    x, y, z = ctx.elem(a), ctx.elem(b), ctx.elem(c)
    assert x * (y + z) == x * y + x * z
    assert (x - y) + y == x


@given(st.lists(st.fractions(max_denominator=50), min_size=1, max_size=8))
def test_lift_unlift(values):
    ints, den = QQ.lift(values)
    assert [QQ.unlift(i, den) for i in ints] == values
