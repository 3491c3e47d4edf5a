"""Explicit decomposition of ``K[M_n(F_q)]`` into matrix algebras over
``K[GL_k(F_q)]`` and the module-level splitting of ``K[M_n]``-mod.

Matrix units.  For each rank ``k`` and each subspace ``W`` of codimension
``k`` fix a surjection ``pi_W : F^n -> F^k`` with kernel ``W``.  Every rank-k
matrix factors uniquely as ``A = f pi_W`` with ``W = ker A`` and ``f``
injective, and ``[f] e_k [pi_W] = [A] + (lower rank)``.  Expanding ``[I_n]``
in this unitriangular family gives coefficients ``c[k, W][f]`` with

    [I_n] = sum_{k, W} y_{k,W} u_{k,W},   u_{k,W} = e_k [pi_W],
    y_{k,W} = (sum_f c[k, W][f] [f]) e_k,

and then ``u_{k,W} y_{l,W'} = delta e_k``.  The block of ``x`` at
``(k; W, W')`` is the class of ``[pi_W] x y_{k,W'}`` in ``K[GL_k]``.
"""
from __future__ import annotations

import random
import time
from functools import lru_cache

from .errors import DimensionMismatch, NotSupported, VerificationFailed
from .kovacs import e_bar, solve_singular_unit
from .linalg import Echelon, SparseMatrix, axpy, nullspace
from .matmonoid import (Mat, composer, enumerate_subspaces, gaussian_binomial, gl_indices,
                        gl_order, hom_set, rank_and_kernel, section_for_subspace)
from .monoidring import RingElem, _mul_terms
from .scalars import QQ, field_ctx


# ---------------------------------------------------------------------------
# Peirce family


class PeirceFamily:
    def __init__(self, q: int, n: int, ring=QQ):
        self.q, self.n, self.ring = q, n, ring
        ctx = self.ctx = field_ctx(q)
        self.units = [solve_singular_unit(q, k, ring).eG for k in range(n + 1)]
        self.subspaces = [enumerate_subspaces(ctx, n, k) for k in range(n + 1)]
        self.pis, self.sigmas = [], []
        for k in range(n + 1):
            pairs = [section_for_subspace(W, k) for W in self.subspaces[k]]
            self.pis.append([p for p, _ in pairs])
            self.sigmas.append([s for _, s in pairs])
        # u_{k,W} = e_k [pi_W]
        self.u = [[self.units[k] * RingElem.basis(ring, pi) for pi in self.pis[k]]
                  for k in range(n + 1)]
        self.coeffs = self._expand_identity()
        self.y = [[RingElem(ring, ctx, k, n, self.coeffs[k][i]) * self.units[k]
                   for i in range(len(self.subspaces[k]))] for k in range(n + 1)]
        self.idempotents = [[self.y[k][i] * self.u[k][i] for i in range(len(self.subspaces[k]))]
                            for k in range(n + 1)]

    @property
    def sizes(self) -> list[int]:
        return [len(s) for s in self.subspaces]

    def _factor_table(self):
        """For every A in M_n: (rank, index of ker A, index of f = A sigma)."""
        ctx, n = self.ctx, self.n
        H = hom_set(ctx, n, n)
        where = [{W: i for i, W in enumerate(self.subspaces[k])} for k in range(n + 1)]
        out = []
        for a in range(H.size):
            A = H.mat(a)
            r, W = rank_and_kernel(A)
            w = where[r][W]
            f = A @ self.sigmas[r][w]
            out.append((r, w, f.index))
        return out

    def _expand_identity(self):
        ctx, n, ring = self.ctx, self.n, self.ring
        factors = self._factor_table()
        coeffs = [[{} for _ in self.subspaces[k]] for k in range(n + 1)]
        target = RingElem.one(ring, ctx, n).terms
        for r in range(n, -1, -1):
            comp = composer(ctx, n, r, n)
            for a in sorted(t for t in target if factors[t][0] == r):
                c = target.get(a)
                if c is None:
                    continue
                _, w, f = factors[a]
                cw = coeffs[r][w]
                cw[f] = cw.get(f, ring.zero) + c
                row = comp.row(f)
                for b, v in self.u[r][w].terms.items():
                    t = row[b]
                    s = target.get(t, ring.zero) - c * v
                    if s == 0:
                        target.pop(t, None)
                    else:
                        target[t] = s
                if target.get(a, ring.zero) != 0:
                    raise VerificationFailed("expansion of the identity is not unitriangular")
        if target:
            raise VerificationFailed("expansion of the identity did not terminate")
        return coeffs

    def verify(self) -> dict:
        """Idempotent, pairwise orthogonal, complete."""
        ring, ctx, n = self.ring, self.ctx, self.n
        flat = [(k, i, e) for k in range(n + 1) for i, e in enumerate(self.idempotents[k])]
        idem = all(e * e == e for _, _, e in flat)
        orth = True
        for k, i, e in flat:
            for l, j, f in flat:
                if (k, i) != (l, j) and not (e * f).is_zero():
                    orth = False
                    break
            if not orth:
                break
        total = RingElem.zero(ring, ctx, n, n)
        for _, _, e in flat:
            total = total + e
        complete = total == RingElem.one(ring, ctx, n)
        counts = self.sizes == [gaussian_binomial(n, k, self.q) for k in range(n + 1)]
        return {"idempotent": idem, "orthogonal": orth, "complete": complete,
                "counts_match_gaussian_binomials": counts, "count": len(flat)}


@lru_cache(maxsize=None)
def peirce_idempotents(q: int, n: int, ring=QQ) -> PeirceFamily:
    fam = PeirceFamily(q, n, ring)
    rep = fam.verify()
    if not all(v for k, v in rep.items() if k != "count"):
        raise VerificationFailed(f"Peirce family for q={q}, n={n} failed: {rep}")
    return fam


def unverified_peirce(q: int, n: int, ring=QQ) -> PeirceFamily:
    """Peirce data without the pairwise product sweep (verified elsewhere)."""
    return _unverified(q, n, ring)


@lru_cache(maxsize=None)
def _unverified(q, n, ring):
    return PeirceFamily(q, n, ring)


# ---------------------------------------------------------------------------
# block elements


class BlockElem:
    """Family over ``k <= n`` of ``gr_k(n) x gr_k(n)`` matrices over ``K[GL_k]``.

    ``blocks[k]`` maps ``(i, j)`` to a dict ``{GL_k index: coeff}``.
    """

    __slots__ = ("q", "n", "ring", "sizes", "blocks")

    def __init__(self, q: int, n: int, ring, sizes, blocks=None):
        self.q, self.n, self.ring, self.sizes = q, n, ring, list(sizes)
        self.blocks = blocks if blocks is not None else [dict() for _ in sizes]

    @classmethod
    def identity(cls, q, n, ring, sizes) -> "BlockElem":
        ctx = field_ctx(q)
        blocks = [{(i, i): {Mat.identity(ctx, k).index: ring.one} for i in range(sizes[k])}
                  for k in range(len(sizes))]
        return cls(q, n, ring, sizes, blocks)

    @classmethod
    def unit(cls, q, n, ring, sizes, k, i, j, g: int, coeff=None) -> "BlockElem":
        out = cls(q, n, ring, sizes)
        out.blocks[k][(i, j)] = {g: ring.one if coeff is None else coeff}
        return out

    def __add__(self, other: "BlockElem") -> "BlockElem":
        out = BlockElem(self.q, self.n, self.ring, self.sizes,
                        [{ij: dict(v) for ij, v in b.items()} for b in self.blocks])
        for k, b in enumerate(other.blocks):
            for ij, entry in b.items():
                cur = out.blocks[k].setdefault(ij, {})
                axpy(cur, 1, entry)
                if not cur:
                    del out.blocks[k][ij]
        return out

    def scale(self, a) -> "BlockElem":
        if a == 0:
            return BlockElem(self.q, self.n, self.ring, self.sizes)
        return BlockElem(self.q, self.n, self.ring, self.sizes,
                         [{ij: {g: a * v for g, v in e.items()} for ij, e in b.items()}
                          for b in self.blocks])

    def __mul__(self, other: "BlockElem") -> "BlockElem":
        ctx = field_ctx(self.q)
        out = []
        for k, (A, B) in enumerate(zip(self.blocks, other.blocks)):
            if not A or not B:
                out.append({})
                continue
            comp = composer(ctx, k, k, k)
            by_row: dict = {}
            for (j, l), e in B.items():
                by_row.setdefault(j, []).append((l, e))
            res: dict = {}
            for (i, j), a in A.items():
                for l, b in by_row.get(j, ()):
                    prod = _mul_terms(self.ring, comp.row, a, b)
                    if prod:
                        cur = res.setdefault((i, l), {})
                        axpy(cur, 1, prod)
            out.append({ij: v for ij, v in sorted(res.items()) if v})
        return BlockElem(self.q, self.n, self.ring, self.sizes, out)

    def normalized(self):
        return [tuple(sorted((ij, tuple(sorted(e.items()))) for ij, e in b.items() if e))
                for b in self.blocks]

    def __eq__(self, other):
        if not isinstance(other, BlockElem):
            return NotImplemented
        return self.sizes == other.sizes and self.normalized() == other.normalized()

    def dimension(self) -> int:
        return sum(s * s * gl_order(self.q, k) for k, s in enumerate(self.sizes))

    def to_json(self) -> dict:
        H = [hom_set(field_ctx(self.q), k, k) for k in range(len(self.sizes))]
        from .matmonoid import format_mat
        return {
            "q": self.q, "n": self.n, "coeff_ring": self.ring.name, "sizes": self.sizes,
            "blocks": [
                [{"row": i, "col": j,
                  "entry": [{"matrix": format_mat(H[k].mat(g)), "coefficient": self.ring.fmt(v)}
                            for g, v in sorted(e.items())]}
                 for (i, j), e in sorted(b.items())]
                for k, b in enumerate(self.blocks)],
        }

    def __repr__(self):
        nnz = [len(b) for b in self.blocks]
        return f"BlockElem(q={self.q}, n={self.n}, sizes={self.sizes}, nonzero entries={nnz})"


class MoritaIso:
    """``phi : K[M_n] -> prod_k M_{gr_k(n)}(K[GL_k])`` and its inverse."""

    def __init__(self, family: PeirceFamily):
        self.family = family
        self.q, self.n, self.ring, self.ctx = family.q, family.n, family.ring, family.ctx
        self.sizes = family.sizes
        self._basis_cache: dict = {}

    def identity(self) -> BlockElem:
        return BlockElem.identity(self.q, self.n, self.ring, self.sizes)

    def phi_basis(self, a: int) -> BlockElem:
        """``phi([A])`` for the matrix of index ``a``."""
        hit = self._basis_cache.get(a)
        if hit is not None:
            return hit
        fam, ctx, n, ring = self.family, self.ctx, self.n, self.ring
        blocks = []
        for k in range(n + 1):
            glk = set(gl_indices(ctx, k))
            left = composer(ctx, n, n, k)      # pi_W after A
            inner = composer(ctx, k, n, k)     # (pi_W A) after f
            blk = {}
            for i, pi in enumerate(fam.pis[k]):
                pa = left(pi.index, a)
                row = inner.row(pa)
                for j in range(len(fam.subspaces[k])):
                    entry: dict = {}
                    for f, c in fam.coeffs[k][j].items():
                        g = row[f]
                        if g in glk:
                            s = entry.get(g, ring.zero) + c
                            if s == 0:
                                entry.pop(g)
                            else:
                                entry[g] = s
                    if entry:
                        blk[(i, j)] = dict(sorted(entry.items()))
            blocks.append(blk)
        out = BlockElem(self.q, n, ring, self.sizes, blocks)
        self._basis_cache[a] = out
        return out

    def phi(self, x: RingElem) -> BlockElem:
        if (x.src, x.tgt) != (self.n, self.n):
            raise DimensionMismatch("phi takes an element of K[M_n]")
        out = BlockElem(self.q, self.n, self.ring, self.sizes)
        for a, c in x.terms.items():
            out = out + self.phi_basis(a).scale(c)
        return out

    def phi_inverse(self, b: BlockElem) -> RingElem:
        fam, ctx, n, ring = self.family, self.ctx, self.n, self.ring
        total = RingElem.zero(ring, ctx, n, n)
        for k, blk in enumerate(b.blocks):
            comp = composer(ctx, k, k, n)  # f after g
            for (i, j), entry in blk.items():
                left: dict = {}
                for f, c in fam.coeffs[k][i].items():
                    row = comp.row(f)
                    for g, v in entry.items():
                        t = row[g]
                        left[t] = left.get(t, ring.zero) + c * v
                total = total + RingElem(ring, ctx, k, n, left) * fam.u[k][j]
        return total


@lru_cache(maxsize=None)
def morita_iso(q: int, n: int, ring=QQ, verified: bool = True) -> MoritaIso:
    fam = peirce_idempotents(q, n, ring) if verified else unverified_peirce(q, n, ring)
    return MoritaIso(fam)


def phi(x: RingElem) -> BlockElem:
    return morita_iso(x.ctx.q, x.src, x.ring).phi(x)


def phi_inverse(b: BlockElem) -> RingElem:
    return morita_iso(b.q, b.n, b.ring).phi_inverse(b)


def dimension_identity(q: int, n: int) -> tuple[int, list[int]]:
    """``q^{n^2}`` and the block contributions ``gr_k(n)^2 |GL_k|``."""
    terms = [gaussian_binomial(n, k, q) ** 2 * gl_order(q, k) for k in range(n + 1)]
    return q ** (n * n), terms


def verify_morita(q: int, n: int, ring=QQ, samples: int | None = None, seed: int = 0,
                  full_peirce: bool | None = None) -> dict:
    """Unitality, multiplicativity, bijectivity of phi.

    Multiplicativity is exhaustive over basis pairs unless ``samples`` is
    given, in which case that many seeded random pairs are drawn.
    """
    t0 = time.perf_counter()
    if full_peirce is None:
        full_peirce = n <= 2
    iso = morita_iso(q, n, ring, verified=full_peirce)
    ctx = field_ctx(q)
    H = hom_set(ctx, n, n)
    checks = []

    def record(name, ok, **extra):
        checks.append({"name": name, "status": "pass" if ok else "fail", **extra})

    total, terms = dimension_identity(q, n)
    record("dimension_identity", total == sum(terms),
           identity=f"{total} = " + "+".join(str(t) for t in terms))
    fam = iso.family
    if not full_peirce:
        pv = {"idempotent": all(e * e == e for es in fam.idempotents for e in es)}
        total_e = RingElem.zero(ring, ctx, n, n)
        for es in fam.idempotents:
            for e in es:
                total_e = total_e + e
        pv["complete"] = total_e == RingElem.one(ring, ctx, n)
        for key, ok in pv.items():
            record(f"peirce_{key}", ok)
    record("peirce_counts", fam.sizes == [gaussian_binomial(n, k, q) for k in range(n + 1)],
           sizes=fam.sizes)
    ident = Mat.identity(ctx, n).index
    record("unital", iso.phi_basis(ident) == iso.identity())
    images = [iso.phi_basis(a) for a in range(H.size)]
    t_phi = time.perf_counter()
    comp = composer(ctx, n, n, n)
    if samples is None:
        pairs = ((a, b) for a in range(H.size) for b in range(H.size))
        npairs = H.size * H.size
    else:
        rng = random.Random(seed)
        pairs = ((rng.randrange(H.size), rng.randrange(H.size)) for _ in range(samples))
        npairs = samples
    mult_ok = True
    bad = None
    for a, b in pairs:
        if images[a] * images[b] != images[comp(a, b)]:
            mult_ok = False
            bad = (a, b)
            break
    t_mult = time.perf_counter()
    record("multiplicative", mult_ok, pairs=npairs, seed=seed if samples else None,
           **({"counterexample": bad} if bad else {}))
    round_trip = all(iso.phi_inverse(images[a]) == RingElem.basis(ring, H.mat(a))
                     for a in range(H.size))
    record("phi_inverse_round_trip", round_trip, checked=H.size)
    units_ok = True
    nunits = 0
    for k, s in enumerate(fam.sizes):
        for g in gl_indices(ctx, k):
            for i in range(s):
                for j in range(s):
                    E = BlockElem.unit(q, n, ring, fam.sizes, k, i, j, g)
                    nunits += 1
                    if iso.phi(iso.phi_inverse(E)) != E:
                        units_ok = False
    record("phi_of_inverse_on_matrix_units", units_ok, checked=nunits)
    status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
    return {"q": q, "n": n, "coeff_ring": ring.name, "checks": checks, "status": status,
            "timing": {"phi_s": round(t_phi - t0, 3), "multiplicative_s": round(t_mult - t_phi, 3),
                       "total_s": round(time.perf_counter() - t0, 3)}}


def hom_vanishing(q: int, m: int, n: int, ring=QQ) -> dict:
    """``e_m [A] e_n`` for every ``m x n`` matrix ``A``.

    For ``m != n`` every product must vanish.  For ``m == n`` the corner
    ``e_n K[M_n] e_n`` is spanned by ``[A] e_n`` (``e_n`` is a verified
    central idempotent) and must have dimension ``|GL_n|``, with the
    quotient map to ``K[GL_n]`` injective on it.
    """
    ctx = field_ctx(q)
    em = solve_singular_unit(q, m, ring).eG
    en = solve_singular_unit(q, n, ring).eG
    H = hom_set(ctx, n, m)
    if m != n:
        nonzero = 0
        for a in range(H.size):
            if not (em * (RingElem(ring, ctx, n, m, {a: ring.one}) * en)).is_zero():
                nonzero += 1
        return {"m": m, "n": n, "checked": H.size, "nonzero": nonzero, "ok": nonzero == 0}
    # the corner is spanned by [A] e_n; singular A must give zero, and each
    # invertible g must map to exactly [g] in K[GL_n], which makes the
    # surviving spanning vectors independent
    gl = set(gl_indices(ctx, n))
    nonzero_singular = 0
    quotient_ok = True
    for a in range(H.size):
        v = (RingElem(ring, ctx, n, n, {a: ring.one}) * en).terms
        if a in gl:
            quotient_ok &= {k: c for k, c in v.items() if k in gl} == {a: ring.one}
        elif v:
            nonzero_singular += 1
    expected = gl_order(q, n)
    corner_dim = len(gl) if quotient_ok and not nonzero_singular else None
    return {"m": m, "n": n, "checked": H.size, "corner_dim": corner_dim,
            "nonzero_singular": nonzero_singular, "quotient_injective": quotient_ok,
            "expected": expected, "ok": corner_dim == expected}


# ---------------------------------------------------------------------------
# modules over M_n and GL_n


class ModulePres:
    """A representation ``A -> rho(A)`` of ``M_n(F_q)`` (or of ``GL_n`` when
    ``group`` is set), stored as sparse matrices keyed by matrix index."""

    def __init__(self, q: int, n: int, ring, dim: int, rho: dict, group: bool = False,
                 check: bool = True):
        self.q, self.n, self.ring, self.dim, self.rho, self.group = q, n, ring, dim, rho, group
        self.ctx = field_ctx(q)
        if check:
            self.verify()

    @property
    def elements(self) -> list[int]:
        if self.group:
            return list(gl_indices(self.ctx, self.n))
        return list(range(hom_set(self.ctx, self.n, self.n).size))

    def verify(self, max_exhaustive: int = 10**5, samples: int = 10**4, seed: int = 0):
        els = self.elements
        if set(self.rho) != set(els):
            raise VerificationFailed("action not given on every monoid element")
        comp = composer(self.ctx, self.n, self.n, self.n)
        ident = Mat.identity(self.ctx, self.n).index
        if self.rho[ident] != SparseMatrix.identity(self.dim, self.ring):
            raise VerificationFailed("identity does not act as identity")
        if len(els) ** 2 <= max_exhaustive:
            pairs = ((a, b) for a in els for b in els)
        else:
            rng = random.Random(seed)
            pairs = ((rng.choice(els), rng.choice(els)) for _ in range(samples))
        for a, b in pairs:
            if self.rho[a] @ self.rho[b] != self.rho[comp(a, b)]:
                raise VerificationFailed(f"rho not multiplicative at ({a}, {b})")
        return True

    def character(self) -> tuple:
        z = self.ring.zero
        return tuple(self.rho[a].trace(z) for a in self.elements)

    def act_element(self, x: RingElem) -> SparseMatrix:
        """``rho`` extended linearly to an element of ``K[M_n]``."""
        out = SparseMatrix.zero(self.dim, self.dim)
        for a, c in x.terms.items():
            if a in self.rho:
                out = out + self.rho[a].scale(c)
        return out

    # constructors ---------------------------------------------------------
    @classmethod
    def regular(cls, q: int, n: int, ring=QQ) -> "ModulePres":
        ctx = field_ctx(q)
        H = hom_set(ctx, n, n)
        comp = composer(ctx, n, n, n)
        rho = {a: SparseMatrix(H.size, H.size, [{t: ring.one} for t in comp.row(a)][:H.size])
               for a in range(H.size)}
        return cls(q, n, ring, H.size, rho)

    @classmethod
    def zero_module(cls, q: int, n: int, ring=QQ, group: bool = False) -> "ModulePres":
        ctx = field_ctx(q)
        els = gl_indices(ctx, n) if group else range(hom_set(ctx, n, n).size)
        return cls(q, n, ring, 0, {a: SparseMatrix.zero(0, 0) for a in els}, group, check=False)

    @classmethod
    def trivial_group_module(cls, q: int, n: int, ring=QQ) -> "ModulePres":
        ctx = field_ctx(q)
        return cls(q, n, ring, 1, {g: SparseMatrix.identity(1, ring) for g in gl_indices(ctx, n)},
                   group=True)

    @classmethod
    def regular_group_module(cls, q: int, n: int, ring=QQ) -> "ModulePres":
        ctx = field_ctx(q)
        gl = list(gl_indices(ctx, n))
        pos = {g: i for i, g in enumerate(gl)}
        comp = composer(ctx, n, n, n)
        rho = {g: SparseMatrix(len(gl), len(gl), [{pos[comp(g, h)]: ring.one} for h in gl])
               for g in gl}
        return cls(q, n, ring, len(gl), rho, group=True)

    @classmethod
    def inflation(cls, L: "ModulePres") -> "ModulePres":
        """``i(L)``: pull a GL_n-module back along ``K[M_n] -> K[GL_n]``."""
        H = hom_set(L.ctx, L.n, L.n)
        rho = {a: L.rho.get(a, SparseMatrix.zero(L.dim, L.dim)) for a in range(H.size)}
        return cls(L.q, L.n, L.ring, L.dim, rho)

    @classmethod
    def left_ideal(cls, x: RingElem) -> "ModulePres":
        """The left ideal ``K[M_n] x`` with left multiplication."""
        q, n, ring = x.ctx.q, x.src, x.ring
        H = hom_set(x.ctx, n, n)
        comp = composer(x.ctx, n, n, n)
        left = lambda a, v: _mul_terms(ring, comp.row, {a: ring.one}, v)  # noqa: E731
        vecs = [left(a, x.terms) for a in range(H.size)]
        return _submodule(q, n, ring, vecs, left, range(H.size), group=False)

    def direct_sum(self, other: "ModulePres") -> "ModulePres":
        d1 = self.dim
        rho = {}
        for a in self.elements:
            A, B = self.rho[a], other.rho[a]
            cols = [dict(c) for c in A.cols] + [{d1 + i: v for i, v in c.items()} for c in B.cols]
            rho[a] = SparseMatrix(d1 + other.dim, d1 + other.dim, cols)
        return ModulePres(self.q, self.n, self.ring, d1 + other.dim, rho, self.group, check=False)

    def __repr__(self):
        kind = "GL" if self.group else "M"
        return f"ModulePres({kind}_{self.n}(F_{self.q}), dim={self.dim})"


def _submodule(q, n, ring, vectors, act, elements, group, check=True) -> ModulePres:
    """Submodule spanned by ``vectors``; ``act(a, v)`` gives the action on vectors."""
    ech = Echelon(ring)
    ech.extend(vectors)
    d = ech.rank
    rho = {}
    for a in elements:
        cols = []
        for b in ech.basis:
            w = act(a, b)
            res, coords = ech.reduce(w)
            if res:
                raise VerificationFailed("subspace is not invariant")
            cols.append(coords)
        rho[a] = SparseMatrix(d, d, cols)
    return ModulePres(q, n, ring, d, rho, group, check=check)


def image_module(M: ModulePres, P: SparseMatrix, elements, lift, group: bool,
                 n_out: int) -> ModulePres:
    """The image of ``P`` (a ``rho``-stable subspace) as a module over
    ``elements``, each acting through ``rho(lift(a))``."""
    vectors = [P.cols[j] for j in range(P.ncols) if P.cols[j]]
    return _submodule(M.q, n_out, M.ring, vectors,
                      lambda a, v: M.rho[lift(a)].apply(v), elements, group)


def _embed_index(ctx, n: int):
    """Index map ``M_{n-1} -> M_n``, ``A -> diag(A, 0)``."""
    Hs = hom_set(ctx, n - 1, n - 1)
    return [Hs.mat(a).block_embed(n).index for a in range(Hs.size)]


def split_module(M: ModulePres) -> tuple[ModulePres, ModulePres]:
    """``M -> (e(M), q(M))`` with ``e(M) = rho(E) M`` over ``M_{n-1}`` and
    ``q(M) = rho(e_n^G) M`` over ``GL_n``."""
    if M.group:
        raise DimensionMismatch("split_module needs a module over M_n")
    ctx, n, ring = M.ctx, M.n, M.ring
    if n == 0:
        raise DimensionMismatch("M_0 has no lower rank part")
    E = e_bar(ctx, n).index
    emb = _embed_index(ctx, n)
    N = image_module(M, M.rho[E], range(len(emb)), lambda a: emb[a], False, n - 1)
    eG = solve_singular_unit(ctx.q, n, ring).eG
    PG = M.act_element(eG)
    L = image_module(M, PG, gl_indices(ctx, n), lambda g: g, True, n)
    return N, L


def _require_rational(ring):
    if ring != QQ:
        raise NotSupported("module constructions are only certified over Q "
                           "(character comparison needs semisimplicity)")


def induce_l(N: ModulePres) -> ModulePres:
    """``l(N) = K[M_n] e_{n-1} (x)_{K[M_{n-1}]} N`` as an explicit quotient.

    ``K[M_n] e_{n-1}`` is identified with ``K[Hom(F^{n-1}, F^n)]`` with
    ``M_{n-1}`` acting on the right by precomposition.
    """
    _require_rational(N.ring)
    ctx, ring, m = N.ctx, N.ring, N.n
    n = m + 1
    X = hom_set(ctx, m, n)
    right = composer(ctx, m, m, n)  # X after a
    left = composer(ctx, m, n, n)   # B after X
    rels = Echelon(ring)
    for x in range(X.size):
        row = right.row(x)
        for a in N.elements:
            xa = row[a]
            for j in range(N.dim):
                v = {(xa, j): ring.one}
                axpy(v, -1, {(x, t): c for t, c in N.rho[a].cols[j].items()})
                rels.add(v)
    pivs = set(rels.pivots)
    keys = [(x, j) for x in range(X.size) for j in range(N.dim) if (x, j) not in pivs]
    pos = {k: i for i, k in enumerate(keys)}
    d = len(keys)
    H = hom_set(ctx, n, n)
    rho = {}
    for b in range(H.size):
        row = left.row(b)
        cols = []
        for (x, j) in keys:
            res, _ = rels.reduce({(row[x], j): ring.one})
            cols.append({pos[k]: c for k, c in res.items()})
        rho[b] = SparseMatrix(d, d, cols)
    return ModulePres(ctx.q, n, ring, d, rho)


def coinduce_r(N: ModulePres) -> ModulePres:
    """``r(N) = Hom_{K[M_{n-1}]}(e_{n-1} K[M_n], N)``.

    ``e_{n-1} K[M_n]`` is identified with ``K[Hom(F^n, F^{n-1})]`` with
    ``M_{n-1}`` acting on the left; ``B`` acts on ``phi`` by
    ``(B phi)(Y) = phi(Y B)``.
    """
    _require_rational(N.ring)
    ctx, ring, m = N.ctx, N.ring, N.n
    n = m + 1
    Y = hom_set(ctx, n, m)
    lmul = composer(ctx, n, m, m)   # a after Y
    rmul = composer(ctx, n, n, m)   # Y after B
    unknowns = [(y, j) for y in range(Y.size) for j in range(N.dim)]
    eqs = []
    for a in N.elements:
        rho = N.rho[a]
        for y in range(Y.size):
            ay = lmul(a, y)
            for j in range(N.dim):
                v = {(ay, j): ring.one}
                for t in range(N.dim):
                    c = rho.cols[t].get(j)
                    if c is not None:
                        axpy(v, -c, {(y, t): ring.one})
                if v:
                    eqs.append(v)
    basis = nullspace(eqs, unknowns, ring)
    ech = Echelon(ring)
    for v in basis:
        ech.add(v)
    d = ech.rank
    H = hom_set(ctx, n, n)
    rho_out = {}
    for b in range(H.size):
        cols = []
        for v in ech.basis:
            w = {}
            for y in range(Y.size):
                yb = rmul(y, b)
                for j in range(N.dim):
                    c = v.get((yb, j))
                    if c is not None:
                        w[(y, j)] = c
            res, coords = ech.reduce(w)
            if res:
                raise VerificationFailed("coinduced action left the Hom-space")
            cols.append(coords)
        rho_out[b] = SparseMatrix(d, d, cols)
    return ModulePres(ctx.q, n, ring, d, rho_out)


def join_module(N: ModulePres, L: ModulePres) -> ModulePres:
    """``l(N) (+) i(L)``, inverse to :func:`split_module` up to isomorphism."""
    _require_rational(N.ring)
    if L.n != N.n + 1 or not L.group or N.group:
        raise DimensionMismatch("join_module takes an M_{n-1}-module and a GL_n-module")
    return induce_l(N).direct_sum(ModulePres.inflation(L))


def restrict_e(M: ModulePres) -> ModulePres:
    return split_module(M)[0]


def verify_recollement(q: int, n: int, ring=QQ) -> dict:
    """Characters of ``l(N)`` and ``r(N)`` agree, ``e l = e r = id`` on
    characters, and split/join round trips preserve characters."""
    _require_rational(ring)
    t0 = time.perf_counter()
    m = n - 1
    battery = [("regular", ModulePres.regular(q, m, ring))]
    fam = peirce_idempotents(q, m, ring)
    for k, es in enumerate(fam.idempotents):
        for i, e in enumerate(es):
            battery.append((f"peirce_{k}_{i}", ModulePres.left_ideal(e)))
    battery.append(("zero", ModulePres.zero_module(q, m, ring)))
    rows = []
    for name, N in battery:
        lN, rN = induce_l(N), coinduce_r(N)
        row = {"module": name, "dim": N.dim, "dim_l": lN.dim, "dim_r": rN.dim,
               "l_equals_r": lN.character() == rN.character(),
               "e_l_is_N": _e_char(lN) == N.character(),
               "e_r_is_N": _e_char(rN) == N.character()}
        rows.append(row)
    trips = []
    M = ModulePres.regular(q, n, ring)
    Ns, Ls = split_module(M)
    J = join_module(Ns, Ls)
    trips.append({"case": "join(split(regular))", "dim": M.dim,
                  "ok": J.character() == M.character()})
    for name, L in (("trivial", ModulePres.trivial_group_module(q, n, ring)),
                    ("regular", ModulePres.regular_group_module(q, n, ring))):
        N0 = battery[0][1]
        N2, L2 = split_module(join_module(N0, L))
        trips.append({"case": f"split(join(regular, {name}))",
                      "ok": N2.character() == N0.character() and L2.character() == L.character()})
    ok = all(r["l_equals_r"] and r["e_l_is_N"] and r["e_r_is_N"] for r in rows) and \
        all(t["ok"] for t in trips)
    return {"q": q, "n": n, "battery": rows, "round_trips": trips,
            "status": "pass" if ok else "fail",
            "timing": {"total_s": round(time.perf_counter() - t0, 3)}}


def _e_char(M: ModulePres) -> tuple:
    if M.dim == 0:
        H = hom_set(M.ctx, M.n - 1, M.n - 1)
        return tuple(M.ring.zero for _ in range(H.size))
    return restrict_e(M).character()
