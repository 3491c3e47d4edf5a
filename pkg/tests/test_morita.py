import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from genrep_fq.errors import DimensionMismatch, NotSupported
from genrep_fq.kovacs import solve_singular_unit
from genrep_fq.matmonoid import Mat, gl_indices, hom_set
from genrep_fq.monoidring import RingElem
from genrep_fq.morita import (BlockElem, ModulePres, coinduce_r, dimension_identity, hom_vanishing,
                              induce_l, join_module, morita_iso, peirce_idempotents, split_module,
                              verify_morita, verify_recollement)
from genrep_fq.scalars import QQ, coeff_ring, field_ctx


def fraction_rank(vectors):
    """Oracle: rank of dict vectors by plain Fraction elimination."""
    rows = [dict(v) for v in vectors if v]
    rank = 0
    while rows:
        piv = rows.pop()
        if not piv:
            continue
        k = min(piv)
        rank += 1
        nxt = []
        for r in rows:
            if k in r:
                f = Fraction(r[k]) / piv[k]
                r = {t: r.get(t, 0) - f * piv.get(t, 0) for t in set(r) | set(piv)}
                r = {t: v for t, v in r.items() if v != 0}
            nxt.append(r)
        rows = [r for r in nxt if r]
    return rank


@pytest.mark.parametrize("q,n,text", [(2, 2, "16 = 1+9+6"), (3, 2, "81 = 1+32+48"),
                                      (2, 3, "512 = 1+49+294+168"), (2, 1, "2 = 1+1")])
def test_dimension_identities(q, n, text):
    total, terms = dimension_identity(q, n)
    assert f"{total} = " + "+".join(map(str, terms)) == text
    assert total == sum(terms)


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_peirce_family(q, n):
    flags = peirce_idempotents(q, n).verify()
    assert flags["idempotent"] and flags["orthogonal"] and flags["complete"]
    assert flags["counts_match_gaussian_binomials"]


def test_peirce_q2_n3():
    flags = peirce_idempotents(2, 3).verify()
    assert flags["count"] == 16
    assert flags["idempotent"] and flags["orthogonal"] and flags["complete"]


def test_top_idempotent_is_kovacs_complement():
    fam = peirce_idempotents(2, 2)
    assert fam.idempotents[2] == [solve_singular_unit(2, 2).eG]


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_verify_morita_exhaustive(q, n):
    report = verify_morita(q, n)
    assert report["status"] == "pass", report["checks"]


def test_verify_morita_sampled_q2_n3():
    report = verify_morita(2, 3, samples=2000, seed=1)
    assert report["status"] == "pass", report["checks"]


def test_phi_bijective_by_rank():
    # the images of all 16 basis elements are linearly independent
    iso = morita_iso(2, 2)
    vecs = []
    for a in range(16):
        b = iso.phi_basis(a)
        vecs.append({(k, i, j, g): c for k, blk in enumerate(b.blocks)
                     for (i, j), e in blk.items() for g, c in e.items()})
    assert fraction_rank(vecs) == 16


def block_product_oracle(x, y, q):
    """Oracle: matrix product over K[GL_k] with group products from ``Mat @``."""
    ctx = field_ctx(q)
    out = []
    for k, (bx, by) in enumerate(zip(x.blocks, y.blocks)):
        H = hom_set(ctx, k, k)
        blk = {}
        for (i, j), e in bx.items():
            for (j2, l), f in by.items():
                if j != j2:
                    continue
                acc = blk.setdefault((i, l), {})
                for g, a in e.items():
                    for h, b in f.items():
                        t = H.index(H.mat(g) @ H.mat(h))
                        acc[t] = acc.get(t, 0) + a * b
        out.append({ij: {g: v for g, v in e.items() if v != 0}
                    for ij, e in blk.items() if any(v != 0 for v in e.values())})
    return out


@given(st.lists(st.tuples(st.integers(0, 80), st.integers(-2, 2)), min_size=1, max_size=4),
       st.lists(st.tuples(st.integers(0, 80), st.integers(-2, 2)), min_size=1, max_size=4))
@settings(max_examples=30, deadline=None)
def test_phi_multiplicative_random_q3(xs, ys):
    ctx = field_ctx(3)
    iso = morita_iso(3, 2)
    x = RingElem(QQ, ctx, 2, 2, {a: Fraction(c) for a, c in xs})
    y = RingElem(QQ, ctx, 2, 2, {a: Fraction(c) for a, c in ys})
    px, py = iso.phi(x), iso.phi(y)
    assert iso.phi(x * y) == px * py
    assert px * py == BlockElem(3, 2, QQ, iso.sizes, block_product_oracle(px, py, 3))
    assert iso.phi_inverse(px) == x


def test_phi_of_identity_and_zero_matrix():
    iso = morita_iso(2, 2)
    ctx = field_ctx(2)
    assert iso.phi(RingElem.one(QQ, ctx, 2)) == iso.identity()
    zero_blocks = iso.phi_basis(0).blocks
    # [0] = e_0 lives only in the rank 0 block
    assert zero_blocks[0] == {(0, 0): {0: 1}}
    assert zero_blocks[1] == {} and zero_blocks[2] == {}


def test_phi_of_invertible_in_top_block():
    iso = morita_iso(2, 2)
    g = Mat.from_rows(field_ctx(2), [[0, 1], [1, 0]])
    top = iso.phi_basis(g.index).blocks[2]
    assert top == {(0, 0): {g.index: 1}}


def test_random_block_round_trip():
    iso = morita_iso(2, 2)
    rng = random.Random(7)
    for _ in range(20):
        b = BlockElem(2, 2, QQ, iso.sizes)
        for k, s in enumerate(iso.sizes):
            gl = gl_indices(field_ctx(2), k)
            for _ in range(3):
                E = BlockElem.unit(2, 2, QQ, iso.sizes, k, rng.randrange(s), rng.randrange(s),
                                   rng.choice(gl), Fraction(rng.randint(-3, 3)))
                b = b + E
        assert iso.phi(iso.phi_inverse(b)) == b


def test_morita_over_prime_field():
    report = verify_morita(2, 2, ring=coeff_ring("gf:3"))
    assert report["status"] == "pass"


@pytest.mark.parametrize("m,n", [(m, n) for m in range(4) for n in range(4) if m != n])
def test_hom_vanishing_off_diagonal(m, n):
    r = hom_vanishing(2, m, n)
    assert r["ok"] and r["checked"] == 2 ** (m * n)


@pytest.mark.parametrize("q,n,dim", [(2, 1, 1), (2, 2, 6), (2, 3, 168), (3, 2, 48)])
def test_hom_vanishing_corner(q, n, dim):
    r = hom_vanishing(q, n, n)
    assert r["ok"] and r["corner_dim"] == dim


@pytest.mark.parametrize("q", [2, 3])
def test_corner_dimension_by_direct_rank(q):
    # oracle: span of e [A] e by brute-force elimination
    ctx = field_ctx(q)
    e = solve_singular_unit(q, 2).eG
    vecs = [(e * RingElem.basis(QQ, A) * e).terms for A in hom_set(ctx, 2, 2)]
    assert fraction_rank(vecs) == (6 if q == 2 else 48)


# --- recollement --------------------------------------------------------------

def perm_character_oracle(q, m):
    """Character of K[Hom(F^m, F^(m+1))] with M_{m+1} acting by composition."""
    ctx = field_ctx(q)
    X = list(hom_set(ctx, m, m + 1))
    return tuple(sum(1 for f in X if B @ f == f) for B in hom_set(ctx, m + 1, m + 1))


@pytest.mark.parametrize("m", [0, 1])
def test_induction_of_regular_is_permutation_module(m):
    N = ModulePres.regular(2, m)
    lN = induce_l(N)
    assert lN.character() == perm_character_oracle(2, m)
    assert coinduce_r(N).character() == lN.character()


@pytest.mark.parametrize("n", [1, 2])
def test_verify_recollement(n):
    r = verify_recollement(2, n)
    assert r["status"] == "pass"
    assert all(row["l_equals_r"] for row in r["battery"])


def test_recollement_q3_n1():
    assert verify_recollement(3, 1)["status"] == "pass"


def test_split_regular_dims():
    N, L = split_module(ModulePres.regular(2, 2))
    # K[M_2] = K[M_2] e_1 K[M_2] (+) K[GL_2]: the GL part has dim |GL_2|
    assert (N.dim, L.dim) == (4, 6)
    assert join_module(N, L).character() == ModulePres.regular(2, 2).character()


def test_trivial_group_module_inflation():
    L = ModulePres.trivial_group_module(2, 2)
    M = ModulePres.inflation(L)
    assert M.character() == tuple(1 if hom_set(field_ctx(2), 2, 2).ranks[a] == 2 else 0
                                  for a in range(16))


def test_module_errors():
    with pytest.raises(NotSupported):
        induce_l(ModulePres.regular(2, 1, coeff_ring("gf:3")))
    with pytest.raises(DimensionMismatch):
        split_module(ModulePres.regular(2, 0))
