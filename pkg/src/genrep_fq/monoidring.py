"""Semigroup rings ``K[Hom(F^a, F^b)]`` with the composition product.

Keys are matrix indices in the canonical order of
:mod:`genrep_fq.matmonoid`.  ``x * y`` means ``x`` after ``y``: for
``x`` in ``K[Hom(F^b, F^c)]`` and ``y`` in ``K[Hom(F^a, F^b)]`` the product
lies in ``K[Hom(F^a, F^c)]`` and ``[A] * [B] = [AB]``.
"""
from __future__ import annotations

import json

from .errors import CtxMismatch, DimensionMismatch
from .matmonoid import (Mat, composer, format_mat, gl_indices, hom_set, inverse_index,
                        parse_mat)
from .scalars import FieldCtx


def _mul_terms(ring, table_row_of, xs: dict, ys: dict) -> dict:
    """Convolution of two coefficient dicts through a composition table."""
    if not xs or not ys:
        return {}
    xk, xv = list(xs), list(xs.values())
    yk, yv = list(ys), list(ys.values())
    xi, dx = ring.lift(xv)
    yi, dy = ring.lift(yv)
    acc: dict = {}
    get = acc.get
    ypairs = list(zip(yk, yi))
    for k, a in zip(xk, xi):
        row = table_row_of(k)
        for j, b in ypairs:
            t = row[j]
            acc[t] = get(t, 0) + a * b
    den = dx * dy
    out = {}
    for t in sorted(acc):
        v = ring.unlift(acc[t], den)
        if v != 0:
            out[t] = v
    return out


class RingElem:
    """Finite K-linear combination of matrices in ``Hom(F^src, F^tgt)``."""

    __slots__ = ("ring", "ctx", "src", "tgt", "terms")

    def __init__(self, ring, ctx: FieldCtx, src: int, tgt: int, terms: dict | None = None):
        self.ring = ring
        self.ctx = ctx
        self.src = src
        self.tgt = tgt
        self.terms = {}
        if terms:
            for k in sorted(terms):
                v = terms[k]
                if v != 0:
                    self.terms[k] = v

    # constructors ----------------------------------------------------------
    @classmethod
    def basis(cls, ring, A: Mat, coeff=None) -> "RingElem":
        c = ring.one if coeff is None else ring(coeff)
        return cls(ring, A.ctx, A.cols, A.rows, {A.index: c})

    @classmethod
    def one(cls, ring, ctx: FieldCtx, n: int) -> "RingElem":
        return cls.basis(ring, Mat.identity(ctx, n))

    @classmethod
    def zero(cls, ring, ctx: FieldCtx, src: int, tgt: int) -> "RingElem":
        return cls(ring, ctx, src, tgt)

    @classmethod
    def from_mats(cls, ring, pairs, src: int | None = None, tgt: int | None = None) -> "RingElem":
        """Build from ``(Mat, coeff)`` pairs; repeated matrices add up."""
        pairs = list(pairs)
        if pairs:
            ctx, src, tgt = pairs[0][0].ctx, pairs[0][0].cols, pairs[0][0].rows
        terms: dict = {}
        for A, c in pairs:
            if A.shape != (tgt, src):
                raise DimensionMismatch("mixed shapes in one Hom-set")
            terms[A.index] = terms.get(A.index, ring.zero) + ring(c)
        return cls(ring, ctx, src, tgt, terms)

    # helpers -------------------------------------------------------------
    @property
    def homset(self):
        return hom_set(self.ctx, self.src, self.tgt)

    @property
    def square(self) -> bool:
        return self.src == self.tgt

    def items(self):
        H = self.homset
        return [(H.mat(k), v) for k, v in self.terms.items()]

    def coeff(self, A: Mat):
        return self.terms.get(A.index, self.ring.zero)

    def support(self) -> list[Mat]:
        H = self.homset
        return [H.mat(k) for k in self.terms]

    def augmentation(self):
        s = self.ring.zero
        for v in self.terms.values():
            s = s + v
        return s

    def _same_space(self, other: "RingElem"):
        if self.ring != other.ring or self.ctx is not other.ctx:
            raise CtxMismatch("ring elements over different contexts")
        if (self.src, self.tgt) != (other.src, other.tgt):
            raise DimensionMismatch("ring elements in different Hom-sets")

    def _like(self, terms: dict) -> "RingElem":
        return RingElem(self.ring, self.ctx, self.src, self.tgt, terms)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other: "RingElem") -> "RingElem":
        self._same_space(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, self.ring.zero) + v
        return self._like(t)

    def __neg__(self) -> "RingElem":
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "RingElem") -> "RingElem":
        return self + (-other)

    def scale(self, a) -> "RingElem":
        a = self.ring(a)
        return self._like({k: a * v for k, v in self.terms.items()})

    def __rmul__(self, a):
        return self.scale(a)

    def __mul__(self, other):
        if isinstance(other, RingElem):
            return compose(self, other)
        return self.scale(other)

    __matmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RingElem):
            return NotImplemented
        return (self.ring == other.ring and self.ctx is other.ctx and self.src == other.src
                and self.tgt == other.tgt and self.terms == other.terms)

    def __hash__(self):
        return hash((self.src, self.tgt, tuple(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def transpose(self) -> "RingElem":
        Hs, Ht = self.homset, hom_set(self.ctx, self.tgt, self.src)
        return RingElem(self.ring, self.ctx, self.tgt, self.src,
                        {Ht.index(Hs.mat(k).T): v for k, v in self.terms.items()})

    def permute_keys(self, perm) -> "RingElem":
        return self._like({perm[k]: v for k, v in self.terms.items()})

    # serialization ---------------------------------------------------------
    def to_json(self) -> list:
        return [{"matrix": format_mat(A), "coefficient": self.ring.fmt(c)} for A, c in self.items()]

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, ring, data, ctx: FieldCtx | None = None, src=None, tgt=None) -> "RingElem":
        pairs = [(parse_mat(d["matrix"]), ring.parse(d["coefficient"])) for d in data]
        if not pairs:
            return cls(ring, ctx, src, tgt)
        return cls.from_mats(ring, pairs)

    def __repr__(self):
        body = " + ".join(f"{self.ring.fmt(c)}[{format_mat(A)}]" for A, c in self.items()) or "0"
        return f"RingElem({body})"


def compose(x: RingElem, y: RingElem) -> RingElem:
    """``x * y`` for ``x`` in ``K[Hom(b,c)]``, ``y`` in ``K[Hom(a,b)]``."""
    if x.ring != y.ring or x.ctx is not y.ctx:
        raise CtxMismatch("composition across contexts")
    if x.src != y.tgt:
        raise DimensionMismatch(
            f"cannot compose K[Hom({x.src},{x.tgt})] after K[Hom({y.src},{y.tgt})]")
    comp = composer(x.ctx, y.src, y.tgt, x.tgt)
    terms = _mul_terms(x.ring, comp.row, x.terms, y.terms)
    return RingElem(x.ring, x.ctx, y.src, x.tgt, terms)


class GroupAlgElem:
    """Element of the group algebra ``K[GL_n(F_q)]`` (keys are GL_n indices)."""

    __slots__ = ("ring", "ctx", "n", "terms")

    def __init__(self, ring, ctx: FieldCtx, n: int, terms: dict | None = None):
        self.ring = ring
        self.ctx = ctx
        self.n = n
        self.terms = {k: terms[k] for k in sorted(terms) if terms[k] != 0} if terms else {}

    @classmethod
    def group_element(cls, ring, g: Mat) -> "GroupAlgElem":
        if not g.is_invertible():
            raise DimensionMismatch("group algebra keys must be invertible")
        return cls(ring, g.ctx, g.rows, {g.index: ring.one})

    @classmethod
    def one(cls, ring, ctx: FieldCtx, n: int) -> "GroupAlgElem":
        return cls(ring, ctx, n, {Mat.identity(ctx, n).index: ring.one})

    def __add__(self, other: "GroupAlgElem") -> "GroupAlgElem":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, self.ring.zero) + v
        return GroupAlgElem(self.ring, self.ctx, self.n, t)

    def __neg__(self):
        return GroupAlgElem(self.ring, self.ctx, self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "GroupAlgElem":
        a = self.ring(a)
        return GroupAlgElem(self.ring, self.ctx, self.n, {k: a * v for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, GroupAlgElem):
            if other.n != self.n:
                raise DimensionMismatch("group algebras of different rank")
            comp = composer(self.ctx, self.n, self.n, self.n)
            return GroupAlgElem(self.ring, self.ctx, self.n,
                                _mul_terms(self.ring, comp.row, self.terms, other.terms))
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgElem):
            return NotImplemented
        return self.n == other.n and self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, tuple(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def to_ring_elem(self) -> RingElem:
        return RingElem(self.ring, self.ctx, self.n, self.n, self.terms)

    def to_json(self) -> list:
        H = hom_set(self.ctx, self.n, self.n)
        return [{"matrix": format_mat(H.mat(k)), "coefficient": self.ring.fmt(v)}
                for k, v in self.terms.items()]

    def __repr__(self):
        H = hom_set(self.ctx, self.n, self.n)
        body = " + ".join(f"{self.ring.fmt(v)}[{format_mat(H.mat(k))}]"
                          for k, v in self.terms.items()) or "0"
        return f"GroupAlgElem({body})"


def quotient_to_gl(x: RingElem) -> GroupAlgElem:
    """Image under ``K[M_n] -> K[GL_n]``: singular keys are dropped."""
    if not x.square:
        raise DimensionMismatch("quotient to K[GL_n] needs a square Hom-set")
    gl = set(gl_indices(x.ctx, x.src))
    return GroupAlgElem(x.ring, x.ctx, x.src, {k: v for k, v in x.terms.items() if k in gl})


def in_singular_ideal(x: RingElem) -> bool:
    gl = set(gl_indices(x.ctx, x.src))
    return all(k not in gl for k in x.terms)


def _left_basis_product(x: RingElem, a: int, row) -> dict:
    """Coefficient dict of ``[A] * x`` with ``row`` the table row of ``A``."""
    out: dict = {}
    for k, v in x.terms.items():
        t = row[k]
        out[t] = out[t] + v if t in out else v
    return {t: v for t, v in out.items() if v != 0}


def _right_basis_product(x: RingElem, comp, a: int) -> dict:
    """Coefficient dict of ``x * [A]``."""
    out: dict = {}
    for k, v in x.terms.items():
        t = comp(k, a)
        out[t] = out[t] + v if t in out else v
    return {t: v for t, v in out.items() if v != 0}


def predicates(x: RingElem) -> dict:
    """Exhaustive property flags of an element of ``K[M_n]``."""
    if not x.square:
        raise DimensionMismatch("predicates need an element of K[M_n]")
    n, ctx = x.src, x.ctx
    H = hom_set(ctx, n, n)
    comp = composer(ctx, n, n, n)
    one = x.ring.one
    idem = (x * x) == x
    central = True
    fixes_sing = True
    for a in range(H.size):
        left = _left_basis_product(x, a, comp.row(a))
        right = _right_basis_product(x, comp, a)
        if left != right:
            central = False
        if H.ranks[a] < n and (left != {a: one} or right != {a: one}):
            fixes_sing = False
        if not central and not fixes_sing:
            break
    tfix = x.transpose() == x
    invs = inverse_index(ctx, n)
    gfix = True
    for g in gl_indices(ctx, n):
        row = comp.row(g)
        gi = invs[g]
        conj = {comp(row[k], gi): v for k, v in x.terms.items()}
        if conj != x.terms:
            gfix = False
            break
    member = in_singular_ideal(x)
    # "unit" means the unit *of* K[Sing_n]: acting as identity is not enough
    return {
        "idempotent": idem,
        "central": central,
        "transpose_fixed": tfix,
        "gl_conjugation_fixed": gfix,
        "unit_on_singulars": fixes_sing and member,
        "fixes_singulars": fixes_sing,
        "in_singular_ideal": member,
    }
