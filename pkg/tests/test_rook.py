from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from genrep_fq.errors import BudgetExceeded
from genrep_fq.rook import (PartialInj, RookIso, enumerate_rook, format_rook, mobius_idempotents,
                            parse_rook, rook_monoid, rook_order, rook_phi, verify_rook)
from genrep_fq.scalars import QQ, coeff_ring


def brute_rook_count(n):
    """Oracle: 0/1 matrices with at most one 1 in each row and column."""
    count = 0
    for bits in product((0, 1), repeat=n * n):
        m = np.array(bits, dtype=int).reshape(n, n) if n else np.zeros((0, 0), dtype=int)
        if (m.sum(axis=0) <= 1).all() and (m.sum(axis=1) <= 1).all():
            count += 1
    return count


@pytest.mark.parametrize("n,size", [(0, 1), (1, 2), (2, 7), (3, 34), (4, 209)])
def test_rook_sizes(n, size):
    assert len(enumerate_rook(n)) == rook_order(n) == size
    assert brute_rook_count(n) == size


def test_rook_order_n5():
    assert rook_order(5) == 1546


def test_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_rook(6)


def test_format_parse():
    f = PartialInj(3, (2, None, 0))
    assert format_rook(f) == "1→3, 2→∅, 3→1"
    assert parse_rook("1→3, 2→∅, 3→1") == f
    for g in enumerate_rook(3):
        assert parse_rook(format_rook(g)) == g
    assert format_rook(PartialInj(0, ())) == "∅"


def test_not_injective_rejected():
    with pytest.raises(ValueError):
        PartialInj(2, (0, 0))


@pytest.mark.parametrize("n", [2, 3])
def test_product_matches_rook_matrices(n):
    els = enumerate_rook(n)
    for f in els:
        for g in els:
            lhs = np.array((f * g).rook_matrix(), dtype=int).reshape(n, n)
            rhs = np.array(f.rook_matrix(), dtype=int) @ np.array(g.rook_matrix(), dtype=int)
            assert (lhs == rhs.reshape(n, n)).all()


def test_mobius_n1():
    fam = mobius_idempotents(1)
    R = rook_monoid(1)
    empty, ident = R.index[PartialInj(1, (None,))], R.index[PartialInj(1, (0,))]
    assert fam.idempotents[()] == {empty: 1}
    assert fam.idempotents[(0,)] == {ident: 1, empty: -1}


@pytest.mark.parametrize("n", range(5))
def test_mobius_family(n):
    rep = mobius_idempotents(n).verify()
    assert rep["count"] == 2 ** n
    assert all(v for k, v in rep.items() if k != "count")


@pytest.mark.parametrize("n,text", [(0, "1 = 1"), (1, "2 = 1+1"), (2, "7 = 1+4+2"),
                                    (3, "34 = 1+9+18+6"), (4, "209 = 1+16+72+96+24")])
def test_verify_rook(n, text):
    rep = verify_rook(n)
    assert rep["status"] == "pass", rep["checks"]
    ident = [c for c in rep["checks"] if c["name"] == "dimension_identity"][0]
    assert ident["identity"] == text


def test_phi_of_single_map():
    # the rank-1 map 1 -> 2 in R_2 becomes E_{({1},{0})} in the rank-1 block
    # plus the rank-0 unit
    iso = RookIso(2)
    f = PartialInj(2, (1, None))
    b = iso.phi_basis(iso.monoid.index[f])
    assert b.blocks[1] == {(1, 0): {(0,): 1}}
    assert b.blocks[0] == {(0, 0): {(): 1}}
    assert b.blocks[2] == {}


@given(st.lists(st.tuples(st.integers(0, 33), st.integers(-3, 3)), max_size=5),
       st.lists(st.tuples(st.integers(0, 33), st.integers(-3, 3)), max_size=5))
@settings(max_examples=100, deadline=None)
def test_phi_random_elements(xs, ys):
    iso = RookIso(3)
    R = iso.monoid
    x = {a: QQ(c) for a, c in xs if c}
    y = {b: QQ(c) for b, c in ys if c}
    assert iso.phi(R.mul(QQ, x, y)) == iso.phi(x) * iso.phi(y)
    assert iso.phi_inverse(iso.phi(x)) == x


def test_rook_over_f2():
    # integrality means the decomposition also holds in characteristic 2
    assert verify_rook(3, coeff_ring("gf:2"))["status"] == "pass"


def test_rook_phi_wrapper():
    R = rook_monoid(2)
    assert rook_phi({R.identity: QQ(1)}, 2) == RookIso(2).phi({R.identity: QQ(1)})
