"""Truncated generic representations.

A functor ``F`` on ``F_q``-vector spaces is recorded on the objects ``F^m``,
``m <= N``, with a matrix ``F(A)`` for every ``A in Hom(F^m, F^n)``.  From it
we extract the sequence of ``GL_k``-modules ``theta(F)_k = e_k^G F(F^k)``,
rebuild a functor from such a sequence (:func:`psi`), and compute the rank
filtration.  The second half handles functors on finite sets (``Fin`` and
``Epi``) and decides by exact linear algebra whether a natural
transformation admits a natural section or retraction.
"""
from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

from .errors import (BudgetExceeded, DimensionMismatch, Inconsistent, NotNatural, NotSupported,
                     VerificationFailed)
from .kovacs import solve_singular_unit
from .linalg import Echelon, SparseMatrix, axpy, check_certificate, solve_system
from .matmonoid import (DEFAULT_BUDGET, Mat, all_subspaces, composer, enumerate_subspaces,
                        format_mat, gaussian_binomial, gl_generators, gl_indices, gl_order,
                        hom_set, parse_mat, span, subspace_image)
from .morita import ModulePres
from .scalars import QQ, coeff_ring, field_ctx


# ---------------------------------------------------------------------------
# functors on vector spaces


def linear_combination(ring, pairs, nrows: int, ncols: int) -> SparseMatrix:
    """``sum c M`` over ``(c, M)`` pairs, accumulated in integers."""
    lifted, scales = [], []
    for c, M in pairs:
        vals = [v for col in M.cols for v in col.values()]
        if not vals or c == 0:
            continue
        ints, d = ring.lift(vals)
        it = iter(ints)
        lifted.append([{y: next(it) for y in col} for col in M.cols])
        scales.append(c * ring.inv(ring(d)))
    if not lifted:
        return SparseMatrix.zero(nrows, ncols)
    tints, D = ring.lift(scales)
    acc = [dict() for _ in range(ncols)]
    for t, cols in zip(tints, lifted):
        for j, col in enumerate(cols):
            a = acc[j]
            for y, v in col.items():
                a[y] = a.get(y, 0) + t * v
    out = []
    for a in acc:
        col = {}
        for y in sorted(a):
            v = ring.unlift(a[y], D)
            if v != 0:
                col[y] = v
        out.append(col)
    return SparseMatrix(nrows, ncols, out)


class TruncatedFunctor:
    """Base class: subclasses provide ``dims`` and ``_compute(m, n, a)``."""

    name = "functor"

    def __init__(self, q: int, ring, N: int, dims: list[int]):
        self.q, self.ring, self.N, self.dims = q, ring, N, list(dims)
        self.ctx = field_ctx(q)
        self._cache: dict = {}

    def matrix(self, m: int, n: int, a: int) -> SparseMatrix:
        """``F(A)`` for ``A`` of index ``a`` in ``Hom(F^m, F^n)``."""
        key = (m, n, a)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._compute(m, n, a)
        return hit

    def _compute(self, m, n, a) -> SparseMatrix:
        raise NotImplementedError

    def of(self, A: Mat) -> SparseMatrix:
        return self.matrix(A.cols, A.rows, A.index)

    def evaluate(self, n: int) -> ModulePres:
        """``F(F^n)`` as a module over ``M_n``."""
        H = hom_set(self.ctx, n, n)
        rho = {a: self.matrix(n, n, a) for a in range(H.size)}
        return ModulePres(self.q, n, self.ring, self.dims[n], rho, check=False)

    def act_element(self, n: int, x) -> SparseMatrix:
        """``F`` applied to an element of ``K[M_n]`` (a RingElem)."""
        return linear_combination(self.ring, [(c, self.matrix(n, n, a))
                                              for a, c in sorted(x.terms.items())],
                                  self.dims[n], self.dims[n])

    def check_functoriality(self, samples: int = 300, seed: int = 0,
                            exhaustive: bool | None = None) -> dict:
        """``F(id) = id`` and ``F(BA) = F(B) F(A)``.

        Exhaustive over all composable pairs when ``N <= 2`` (or when asked),
        otherwise ``samples`` seeded random pairs per triple of objects.
        """
        if exhaustive is None:
            exhaustive = self.N <= 2
        rnd = random.Random(seed)
        ctx, N = self.ctx, self.N
        checked = 0
        for m in range(N + 1):
            if self.matrix(m, m, Mat.identity(ctx, m).index) != \
                    SparseMatrix.identity(self.dims[m], self.ring):
                raise VerificationFailed(f"{self.name}: F(id) != id on F^{m}")
        for l, m, n in product(range(N + 1), repeat=3):
            comp = composer(ctx, l, m, n)
            HA, HB = hom_set(ctx, l, m), hom_set(ctx, m, n)
            if exhaustive:
                pairs = product(range(HB.size), range(HA.size))
            else:
                pairs = [(rnd.randrange(HB.size), rnd.randrange(HA.size)) for _ in range(samples)]
            for b, a in pairs:
                if self.matrix(m, n, b) @ self.matrix(l, m, a) != self.matrix(l, n, comp(b, a)):
                    raise VerificationFailed(f"{self.name}: not functorial at ({l},{m},{n}; {b},{a})")
                checked += 1
        return {"functor": self.name, "pairs": checked, "exhaustive": exhaustive,
                "seed": None if exhaustive else seed}

    # serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        maps = {}
        for m in range(self.N + 1):
            for n in range(self.N + 1):
                H = hom_set(self.ctx, m, n)
                for a in range(H.size):
                    M = self.matrix(m, n, a)
                    maps[format_mat(H.mat(a))] = [[self.ring.fmt(v) for v in row]
                                                  for row in M.to_dense(self.ring.zero)]
        return {"schema": 1, "kind": "vector", "q": self.q, "coeff_ring": self.ring.name,
                "N": self.N, "name": self.name, "dims": self.dims, "maps": maps}


def functor_from_json(data: dict, check: bool = True):
    if data.get("kind") == "set":
        return SetFunctor.from_json(data, check=check)
    ring = coeff_ring(data["coeff_ring"])
    q, N = data["q"], data["N"]
    ctx = field_ctx(q)
    mats = {}
    for key, rows in data["maps"].items():
        A = parse_mat(key)
        if A.ctx is not ctx:
            raise DimensionMismatch("map over a different field")
        dn, dm = data["dims"][A.rows], data["dims"][A.cols]
        dense = [[ring.parse(v) for v in row] for row in rows] if rows else []
        M = SparseMatrix.from_dense(dense) if dense and dense[0] else SparseMatrix.zero(dn, dm)
        if (M.nrows, M.ncols) != (dn, dm):
            raise DimensionMismatch(f"matrix for {key} has the wrong shape")
        mats[(A.cols, A.rows, A.index)] = M
    F = ExplicitFunctor(q, ring, N, data["dims"], mats, name=data.get("name", "explicit"))
    if check:
        F.check_functoriality()
    return F


class ExplicitFunctor(TruncatedFunctor):
    def __init__(self, q, ring, N, dims, mats: dict, name: str = "explicit"):
        super().__init__(q, ring, N, dims)
        self.name = name
        ctx = self.ctx
        for m in range(N + 1):
            for n in range(N + 1):
                for a in range(hom_set(ctx, m, n).size):
                    if (m, n, a) not in mats:
                        raise DimensionMismatch(f"missing F(A) for A in Hom(F^{m}, F^{n})")
        self._cache = dict(mats)


class LinearizedFunctor(TruncatedFunctor):
    """``K[X]`` for a set-valued functor ``X``: ``elements[m]`` lists ``X(F^m)``
    and ``_images(m, n, a)`` lists the position of ``A . x`` in ``X(F^n)`` for
    every ``x``."""

    def __init__(self, q, ring, N, elements: list[list], name: str):
        super().__init__(q, ring, N, [len(e) for e in elements])
        self.elements = elements
        self.name = name
        self._img_cache: dict = {}

    def _images(self, m: int, n: int, a: int) -> list[int]:
        raise NotImplementedError

    def images(self, m: int, n: int, a: int) -> list[int]:
        key = (m, n, a)
        hit = self._img_cache.get(key)
        if hit is None:
            hit = self._img_cache[key] = self._images(m, n, a)
        return hit

    def act(self, m: int, n: int, a: int, x: int) -> int:
        return self.images(m, n, a)[x]

    def _compute(self, m, n, a):
        one = self.ring.one
        return SparseMatrix(self.dims[n], self.dims[m], [{y: one} for y in self.images(m, n, a)])

    def check_functoriality(self, samples: int = 300, seed: int = 0,
                            exhaustive: bool | None = None) -> dict:
        """As for the base class, compared on basis elements: ``F(A)`` sends
        basis vectors to basis vectors, so ``F(BA) = F(B) F(A)`` is the
        identity ``(BA).x = B.(A.x)`` for every ``x``."""
        if exhaustive is None:
            exhaustive = self.N <= 2
        rnd = random.Random(seed)
        ctx, N = self.ctx, self.N
        for m in range(N + 1):
            if self.images(m, m, Mat.identity(ctx, m).index) != list(range(self.dims[m])):
                raise VerificationFailed(f"{self.name}: F(id) != id on F^{m}")
        checked = 0
        for l, m, n in product(range(N + 1), repeat=3):
            comp = composer(ctx, l, m, n)
            HA, HB = hom_set(ctx, l, m), hom_set(ctx, m, n)
            if exhaustive:
                pairs = product(range(HB.size), range(HA.size))
            else:
                pairs = [(rnd.randrange(HB.size), rnd.randrange(HA.size)) for _ in range(samples)]
            for b, a in pairs:
                rb = self.images(m, n, b)
                if [rb[y] for y in self.images(l, m, a)] != self.images(l, n, comp(b, a)):
                    raise VerificationFailed(
                        f"{self.name}: not functorial at ({l},{m},{n}; {b},{a})")
                checked += 1
        return {"functor": self.name, "pairs": checked, "exhaustive": exhaustive,
                "seed": None if exhaustive else seed}

    def singular_orbit(self, k: int) -> set[int]:
        """Positions in ``X(F^k)`` of the form ``s . y`` with ``s`` singular."""
        H = hom_set(self.ctx, k, k)
        out = set()
        for s in range(H.size):
            if H.ranks[s] < k:
                out.update(self.images(k, k, s))
        return out


class ProjFunctor(LinearizedFunctor):
    """``P_n(V) = K[Hom(F^n, V)]``."""

    def __init__(self, q, ring, N, n):
        ctx = field_ctx(q)
        super().__init__(q, ring, N, [list(range(hom_set(ctx, n, m).size)) for m in range(N + 1)],
                         name=f"proj:{n}")
        self.n = n

    def _images(self, m, n, a):
        row = composer(self.ctx, self.n, m, n).row(a)
        return [row[x] for x in range(self.dims[m])]


class GrassmannFunctor(LinearizedFunctor):
    """``K[Gr(V)]``: all subspaces, with ``A`` acting by ``W -> A(W)``."""

    def __init__(self, q, ring, N):
        ctx = field_ctx(q)
        elements = [all_subspaces(ctx, m) for m in range(N + 1)]
        super().__init__(q, ring, N, elements, name="gr")
        self._pos = [{W: i for i, W in enumerate(e)} for e in elements]

    def _images(self, m, n, a):
        A = hom_set(self.ctx, m, n).mat(a)
        return [self._pos[n][subspace_image(A, W)] for W in self.elements[m]]


class ConstFunctor(LinearizedFunctor):
    def __init__(self, q, ring, N):
        super().__init__(q, ring, N, [[0] for _ in range(N + 1)], name="const")

    def _images(self, m, n, a):
        return [0]


def make_builtin(name: str, q: int = 2, ring=QQ, N: int = 2, budget: int = DEFAULT_BUDGET):
    """``gr``, ``const``, ``proj:n`` / ``proj(n)`` for vector spaces;
    ``proj_fin(1)``, ``const_fin``, ``proj_epi(k)`` for finite sets."""
    m = re.fullmatch(r"proj[:(](\d+)\)?", name)
    mf = re.fullmatch(r"proj_(fin|epi)\((\d+)\)", name)
    if mf:
        cat, k = mf.group(1), int(mf.group(2))
        if cat == "fin" and k != 1:
            raise NotSupported("only proj_fin(1) is built in")
        return SetFunctor.projective(cat, k, N, ring)
    if name == "const_fin":
        return SetFunctor.constant("fin", N, ring)
    if m:
        n = int(m.group(1))
        size = sum(q ** (n * j) for j in range(N + 1))
        if size > budget:
            raise BudgetExceeded(f"proj:{n} up to N={N} has {size} basis elements")
        return ProjFunctor(q, ring, N, n)
    if name == "gr":
        return GrassmannFunctor(q, ring, N)
    if name == "const":
        return ConstFunctor(q, ring, N)
    raise NotSupported(f"unknown built-in functor {name!r}")


# ---------------------------------------------------------------------------
# theta


def _markowitz_weights(vectors) -> dict:
    w: dict = {}
    for v in vectors:
        for k in v:
            w[k] = w.get(k, 0) + 1
    return w


def image_basis(columns, ring) -> Echelon:
    cols = [c for c in columns if c]
    ech = Echelon(ring, weights=_markowitz_weights(cols))
    ech.extend(cols)
    return ech


def theta_component(F: TruncatedFunctor, k: int) -> ModulePres:
    """``e_k^G F(F^k)`` with ``GL_k`` acting through ``F``.

    The echelon basis is reduced, so coordinates are the entries at pivot
    keys; only those rows of ``F(g)`` are needed.  Stability of the image
    is checked in full on a generating set of ``GL_k``.
    """
    unit = solve_singular_unit(F.q, k, F.ring)
    ring = F.ring
    P = F.act_element(k, unit.eG)
    ech = image_basis(P.cols, ring)
    d = ech.rank
    pivots = ech.pivots
    for G in gl_generators(F.ctx, k):
        Fg = F.matrix(k, k, G.index)
        for b in ech.basis:
            if ech.reduce(Fg.apply(b))[0]:
                raise VerificationFailed(f"{F.name}: e_{k}^G F(F^{k}) is not GL-stable")
    wanted = {p: i for i, p in enumerate(pivots)}
    rho = {}
    for g in gl_indices(F.ctx, k):
        Fg = F.matrix(k, k, g)
        # F(g) restricted to the pivot rows
        pcols = [{wanted[y]: v for y, v in col.items() if y in wanted} for col in Fg.cols]
        cols = []
        for b in ech.basis:
            coords: dict = {}
            for x, c in b.items():
                for i, v in pcols[x].items():
                    coords[i] = coords.get(i, ring.zero) + c * v
            cols.append({i: v for i, v in sorted(coords.items()) if v != 0})
        rho[g] = SparseMatrix(d, d, cols)
    return ModulePres(F.q, k, ring, d, rho, group=True, check=False)


def theta(F: TruncatedFunctor) -> list[ModulePres]:
    """The sequence of ``GL_k``-modules attached to ``F``, ``k <= N``.

    Raises :class:`Inconsistent` if ``p`` is not invertible in ``K``.
    """
    return [theta_component(F, k) for k in range(F.N + 1)]


def theta_permutation(F: LinearizedFunctor, k: int) -> ModulePres:
    """Independent route for linearized functors: the permutation module on
    ``X(F^k)`` minus the singular orbit."""
    sing = F.singular_orbit(k)
    free = [x for x in range(F.dims[k]) if x not in sing]
    pos = {x: i for i, x in enumerate(free)}
    one = F.ring.one
    rho = {g: SparseMatrix(len(free), len(free), [{pos[F.act(k, k, g, x)]: one} for x in free])
           for g in gl_indices(F.ctx, k)}
    return ModulePres(F.q, k, F.ring, len(free), rho, group=True, check=False)


def is_trivial(M: ModulePres) -> bool:
    ident = SparseMatrix.identity(M.dim, M.ring)
    return all(M.rho[g] == ident for g in M.elements)


# ---------------------------------------------------------------------------
# psi


def injection_for(U) -> Mat:
    """``F^k -> F^m`` whose columns are the echelon basis of ``U``."""
    B = U.basis
    return Mat(B.ctx, B.cols, B.rows,
               tuple(B[i, j] for j in range(B.cols) for i in range(B.rows)))


class PsiFunctor(TruncatedFunctor):
    """``psi(mods)(F^m) = sum_k K[Inj(F^k, F^m)] (x)_{K[GL_k]} M_k``.

    ``K[Inj(F^k, F^m)]`` is a free right ``K[GL_k]``-module on the chosen
    injections ``f_U`` (one per ``k``-dimensional ``U``), so the tensor product
    has basis ``(k, U, v)``.  ``A`` sends ``(k, U, v)`` to
    ``(k, A(U), rho(g) v)`` where ``A f_U = f_{A(U)} g``, and to zero when
    ``A`` is not injective on ``U``.
    """

    name = "psi"

    def __init__(self, mods: list[ModulePres], q: int, ring, N: int):
        if ring != QQ:
            raise NotSupported("psi is only certified over Q")
        if len(mods) != N + 1:
            raise DimensionMismatch(f"need one module for each k <= {N}")
        ctx = field_ctx(q)
        self.mods = mods
        self.subs = [[enumerate_subspaces(ctx, m, m - k) if k <= m else [] for k in range(N + 1)]
                     for m in range(N + 1)]
        self.keys = []
        for m in range(N + 1):
            keys = [(k, u, v) for k in range(N + 1) for u in range(len(self.subs[m][k]))
                    for v in range(mods[k].dim)]
            self.keys.append(keys)
        super().__init__(q, ring, N, [len(k) for k in self.keys])
        self._pos = [{key: i for i, key in enumerate(keys)} for keys in self.keys]
        self._where = [[{U: i for i, U in enumerate(self.subs[m][k])} for k in range(N + 1)]
                       for m in range(N + 1)]
        self._inj = [[[injection_for(U) for U in self.subs[m][k]] for k in range(N + 1)]
                     for m in range(N + 1)]

    def _compute(self, m, n, a):
        A = hom_set(self.ctx, m, n).mat(a)
        cols: list = [None] * self.dims[m]
        blocks: dict = {}
        for k in range(self.N + 1):
            for u, U in enumerate(self.subs[m][k]):
                img = A @ self._inj[m][k][u]
                if img.rank() < k:
                    blocks[(k, u)] = None
                    continue
                V = span(self.ctx, n, [img.col(j) for j in range(k)])
                w = self._where[n][k][V]
                piv = V.pivots
                g = Mat(self.ctx, k, k, tuple(img[piv[i], j] for i in range(k) for j in range(k)))
                blocks[(k, u)] = (w, g.index)
        for i, (k, u, v) in enumerate(self.keys[m]):
            hit = blocks[(k, u)]
            if hit is None:
                cols[i] = {}
                continue
            w, g = hit
            col = self.mods[k].rho[g].cols[v]
            cols[i] = {self._pos[n][(k, w, t)]: c for t, c in col.items()}
        return SparseMatrix(self.dims[n], self.dims[m], cols)


def psi(mods: list[ModulePres], q: int, ring=QQ, N: int | None = None) -> PsiFunctor:
    N = len(mods) - 1 if N is None else N
    return PsiFunctor(mods, q, ring, N)


def psi_quotient_dimension(M: ModulePres, m: int) -> int:
    """Brute-force ``dim K[Inj(F^k, F^m)] (x)_{K[GL_k]} M``: the free module on
    pairs ``(f, v)`` modulo ``(f g, v) - (f, g v)`` for ``g`` in a
    generating set of ``GL_k``."""
    ctx, k, ring = M.ctx, M.n, M.ring
    H = hom_set(ctx, k, m)
    inj = [f for f in range(H.size) if H.ranks[f] == k]
    comp = composer(ctx, k, k, m)
    rels = Echelon(ring)
    for G in gl_generators(ctx, k):
        g = G.index
        for f in inj:
            fg = comp(f, g)
            for v in range(M.dim):
                r = {(fg, v): ring.one}
                axpy(r, -ring.one, {(f, t): c for t, c in M.rho[g].cols[v].items()})
                rels.add(r)
    return len(inj) * M.dim - rels.rank


# ---------------------------------------------------------------------------
# rank filtration


@dataclass
class Filtration:
    functor: str
    table: list  # table[k][m] = dim F^k(F^m)
    dims: list
    theta_dims: list | None
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"functor": self.functor, "dims": self.dims, "table": self.table,
                "theta_dims": self.theta_dims, "checks": self.checks}


def filtration_piece(F: TruncatedFunctor, k: int, m: int) -> int:
    """``dim F^k(F^m)``: span of ``F(f) F(F^k)`` over ``f in Hom(F^k, F^m)``."""
    H = hom_set(F.ctx, k, m)
    vecs = []
    for f in range(H.size):
        vecs.extend(F.matrix(k, m, f).cols)
    return image_basis(vecs, F.ring).rank


def rank_filtration(F: TruncatedFunctor, with_theta: bool = True) -> Filtration:
    N = F.N
    table = [[filtration_piece(F, k, m) for m in range(N + 1)] for k in range(N + 1)]
    monotone = all(table[k - 1][m] <= table[k][m] for k in range(1, N + 1) for m in range(N + 1))
    stable = all(table[k][m] == F.dims[m] for m in range(N + 1) for k in range(m, N + 1))
    checks = {"monotone": monotone, "stabilizes": stable}
    tdims = None
    if with_theta:
        try:
            tdims = [M.dim for M in theta(F)]
        except Inconsistent as exc:
            checks["splitting"] = None
            checks["splitting_note"] = str(exc)
        else:
            checks["splitting"] = all(
                table[k][m] == sum(gaussian_binomial(m, j, F.q) * tdims[j] for j in range(k + 1))
                for k in range(N + 1) for m in range(N + 1))
    return Filtration(F.name, table, list(F.dims), tdims, checks)


def dimension_bookkeeping(F: TruncatedFunctor, tdims: list[int]) -> bool:
    """``dim F(F^m) = sum_k gr_k(m) dim theta(F)_k`` for every ``m <= N``."""
    return all(F.dims[m] == sum(gaussian_binomial(m, k, F.q) * tdims[k] for k in range(m + 1))
               for m in range(F.N + 1))


def multiplicity_check(q: int, n: int, m: int) -> bool:
    """``q^{nm} = sum_k gr_k(n) |Inj(F^k, F^m)|`` by enumeration."""
    ctx = field_ctx(q)
    total = 0
    for k in range(n + 1):
        H = hom_set(ctx, k, m)
        inj = H.ranks.count(k)
        total += gaussian_binomial(n, k, q) * inj
    return total == q ** (n * m) == hom_set(ctx, n, m).size


def verify_genrep(q: int = 2, N: int = 3, ring=QQ, functors=None, seed: int = 0) -> dict:
    """theta/psi round trips, dimension bookkeeping and rank filtration."""
    import time
    t0 = time.perf_counter()
    names = functors or ["gr", "const"] + [f"proj:{n}" for n in range(N + 1)]
    rows = []
    for name in names:
        F = make_builtin(name, q, ring, N)
        F.check_functoriality(seed=seed)
        th = theta(F)
        tdims = [M.dim for M in th]
        row = {"functor": name, "dims": F.dims, "theta_dims": tdims}
        row["bookkeeping"] = dimension_bookkeeping(F, tdims)
        perm = [theta_permutation(F, k) for k in range(N + 1)]
        row["theta_matches_permutation_route"] = all(
            a.dim == b.dim and a.character() == b.character() for a, b in zip(th, perm))
        if name == "gr":
            row["theta_trivial"] = all(M.dim == 1 and is_trivial(M) for M in th)
        if name.startswith("proj:"):
            n = int(name.split(":")[1])
            row["theta_proj_dims"] = tdims == [gaussian_binomial(n, k, q) * gl_order(q, k)
                                               for k in range(N + 1)]
        G = psi(th, q, ring, N)
        row["psi_theta_dims"] = G.dims == F.dims
        th2 = theta(G)
        row["theta_psi_characters"] = all(a.dim == b.dim and a.character() == b.character()
                                          for a, b in zip(th, th2))
        filt = rank_filtration(F, with_theta=False)
        row["filtration"] = filt.table
        row["filtration_monotone"] = filt.checks["monotone"]
        row["filtration_stabilizes"] = filt.checks["stabilizes"]
        row["filtration_splitting"] = all(
            filt.table[k][m] == sum(gaussian_binomial(m, j, q) * tdims[j] for j in range(k + 1))
            for k in range(N + 1) for m in range(N + 1))
        rows.append(row)
    flags = [v for r in rows for k, v in r.items() if isinstance(v, bool)]
    mult = all(multiplicity_check(q, n, m) for n in range(N + 1) for m in range(N + 1))
    return {"q": q, "N": N, "coeff_ring": ring.name, "functors": rows,
            "multiplicity_identity": mult,
            "status": "pass" if all(flags) and mult else "fail",
            "timing": {"total_s": round(time.perf_counter() - t0, 3)}}


# ---------------------------------------------------------------------------
# functors on finite sets


def set_objects(category: str, N: int) -> list[int]:
    return list(range(N + 1)) if category == "fin" else list(range(1, N + 1))


@lru_cache(maxsize=None)
def set_maps(category: str, s: int, t: int) -> tuple:
    """Maps ``{0..s-1} -> {0..t-1}`` (surjective ones only for ``epi``)."""
    maps = product(range(t), repeat=s)
    if category == "epi":
        return tuple(f for f in maps if set(f) == set(range(t)))
    return tuple(maps)


def format_set_map(s: int, t: int, f: tuple) -> str:
    return f"{s}->{t}:" + ",".join(map(str, f))


def parse_set_map(key: str):
    head, _, body = key.partition(":")
    s, t = map(int, head.split("->"))
    f = tuple(int(x) for x in body.split(",")) if body else ()
    return s, t, f


class SetFunctor:
    """Functor from ``Fin`` or ``Epi`` (objects ``{0..s-1}``, ``s <= N``) to
    K-vector spaces."""

    def __init__(self, category: str, N: int, ring, dims: dict, maps: dict, name: str = "set"):
        if category not in ("fin", "epi"):
            raise NotSupported(f"unknown category {category!r}")
        self.category, self.N, self.ring, self.dims, self.maps, self.name = \
            category, N, ring, dims, maps, name

    @property
    def objects(self):
        return set_objects(self.category, self.N)

    def morphisms(self):
        for s in self.objects:
            for t in self.objects:
                for f in set_maps(self.category, s, t):
                    yield s, t, f

    def matrix(self, s, t, f) -> SparseMatrix:
        return self.maps[(s, t, f)]

    def check_functoriality(self) -> int:
        checked = 0
        for s in self.objects:
            ident = tuple(range(s))
            if self.matrix(s, s, ident) != SparseMatrix.identity(self.dims[s], self.ring):
                raise VerificationFailed(f"{self.name}: F(id_{s}) != id")
            for t in self.objects:
                for u in self.objects:
                    for f in set_maps(self.category, s, t):
                        for g in set_maps(self.category, t, u):
                            gf = tuple(g[x] for x in f)
                            if self.matrix(t, u, g) @ self.matrix(s, t, f) != self.matrix(s, u, gf):
                                raise VerificationFailed(f"{self.name}: not functorial")
                            checked += 1
        return checked

    @classmethod
    def linearized(cls, category, N, ring, elements: dict, act, name) -> "SetFunctor":
        """``K[X]`` with ``elements[s]`` listing ``X(s)`` and ``act(f, x)`` the image."""
        dims = {s: len(elements[s]) for s in set_objects(category, N)}
        pos = {s: {x: i for i, x in enumerate(elements[s])} for s in dims}
        maps = {}
        for s in dims:
            for t in dims:
                for f in set_maps(category, s, t):
                    maps[(s, t, f)] = SparseMatrix(dims[t], dims[s],
                                                   [{pos[t][act(f, x)]: ring.one}
                                                    for x in elements[s]])
        return cls(category, N, ring, dims, maps, name)

    @classmethod
    def projective(cls, category: str, k: int, N: int, ring=QQ) -> "SetFunctor":
        """``P_k(S) = K[Hom(k, S)]`` (surjections only for ``epi``)."""
        elements = {s: list(set_maps(category, k, s)) for s in set_objects(category, N)}
        return cls.linearized(category, N, ring, elements,
                              lambda f, x: tuple(f[i] for i in x), f"proj_{category}({k})")

    @classmethod
    def constant(cls, category: str, N: int, ring=QQ) -> "SetFunctor":
        elements = {s: [0] for s in set_objects(category, N)}
        return cls.linearized(category, N, ring, elements, lambda f, x: 0, f"const_{category}")

    def to_json(self) -> dict:
        return {"schema": 1, "kind": "set", "category": self.category,
                "coeff_ring": self.ring.name, "N": self.N, "name": self.name,
                "dims": {str(s): d for s, d in sorted(self.dims.items())},
                "maps": {format_set_map(s, t, f): [[self.ring.fmt(v) for v in row] for row in
                                                   self.maps[(s, t, f)].to_dense(self.ring.zero)]
                         for s, t, f in self.morphisms()}}

    @classmethod
    def from_json(cls, data: dict, check: bool = True) -> "SetFunctor":
        ring = coeff_ring(data["coeff_ring"])
        dims = {int(s): d for s, d in data["dims"].items()}
        maps = {}
        for key, rows in data["maps"].items():
            s, t, f = parse_set_map(key)
            dense = [[ring.parse(v) for v in row] for row in rows]
            if dense and dense[0]:
                maps[(s, t, f)] = SparseMatrix.from_dense(dense)
            else:
                maps[(s, t, f)] = SparseMatrix.zero(dims[t], dims[s])
        F = cls(data["category"], data["N"], ring, dims, maps, data.get("name", "set"))
        missing = [m for m in F.morphisms() if m not in maps]
        if missing:
            raise DimensionMismatch(f"missing matrices for {len(missing)} maps")
        if check:
            F.check_functoriality()
        return F


def check_natural(F: SetFunctor, G: SetFunctor, tau: dict) -> bool:
    """``tau_t F(f) = G(f) tau_s`` for every map ``f: s -> t``."""
    for s, t, f in F.morphisms():
        if tau[t] @ F.matrix(s, t, f) != G.matrix(s, t, f) @ tau[s]:
            return False
    return True


@dataclass
class SplitResult:
    split: bool
    mode: str
    witness: dict | None = None
    certificate: dict | None = None
    certificate_valid: bool | None = None
    n_unknowns: int = 0
    n_equations: int = 0
    explanation: str = ""

    def to_json(self, ring) -> dict:
        out = {"result": "Split" if self.split else "NoSplit", "mode": self.mode,
               "unknowns": self.n_unknowns, "equations": self.n_equations}
        if self.witness is not None:
            out["witness"] = {str(s): [[ring.fmt(v) for v in row] for row in
                                       M.to_dense(ring.zero)] for s, M in sorted(self.witness.items())}
        if self.certificate is not None:
            out["certificate"] = {str(i): ring.fmt(v) for i, v in sorted(self.certificate.items())}
            out["certificate_valid"] = self.certificate_valid
            out["explanation"] = self.explanation
        return out


def splitting_solver(F: SetFunctor, G: SetFunctor, tau: dict, mode: str) -> SplitResult:
    """Decide whether ``tau: F -> G`` has a natural section (``tau s = id_G``) or
    retraction (``r tau = id_F``).  The unknown is a natural ``x: G -> F``."""
    if mode not in ("section", "retraction"):
        raise NotSupported(f"mode must be section or retraction, not {mode!r}")
    if (F.category, F.N) != (G.category, G.N):
        raise DimensionMismatch("functors on different truncated categories")
    if not check_natural(F, G, tau):
        raise NotNatural("tau is not a natural transformation")
    ring = F.ring
    objs = F.objects
    # unknown (s, i, j): entry (i, j) of x_s : G(s) -> F(s)
    unknowns = [(s, i, j) for s in objs for i in range(F.dims[s]) for j in range(G.dims[s])]
    eqs = []
    labels = []
    for s, t, f in F.morphisms():
        Ff, Gf = F.matrix(s, t, f), G.matrix(s, t, f)
        # (x_t G(f))[i, j] - (F(f) x_s)[i, j] = 0 for i < F(t), j < G(s)
        for i in range(F.dims[t]):
            for j in range(G.dims[s]):
                c: dict = {}
                for l, v in Gf.cols[j].items():
                    axpy(c, v, {(t, i, l): ring.one})
                Ff_row = {jj: col[i] for jj, col in enumerate(Ff.cols) if i in col}
                for l, v in Ff_row.items():
                    axpy(c, -v, {(s, l, j): ring.one})
                if c:
                    eqs.append((c, ring.zero))
                    labels.append(f"naturality {format_set_map(s, t, f)} entry ({i},{j})")
    for s in objs:
        T = tau[s]
        if mode == "section":
            # (tau_s x_s)[i, j] = delta_ij on G(s)
            for i in range(G.dims[s]):
                Trow = {l: col[i] for l, col in enumerate(T.cols) if i in col}
                for j in range(G.dims[s]):
                    c = {(s, l, j): v for l, v in Trow.items()}
                    eqs.append((c, ring.one if i == j else ring.zero))
                    labels.append(f"tau x = id at {s} entry ({i},{j})")
        else:
            # (x_s tau_s)[i, j] = delta_ij on F(s)
            for i in range(F.dims[s]):
                for j in range(F.dims[s]):
                    c = {(s, i, l): v for l, v in T.cols[j].items()}
                    eqs.append((c, ring.one if i == j else ring.zero))
                    labels.append(f"x tau = id at {s} entry ({i},{j})")
    try:
        sol = solve_system(eqs, unknowns, ring)
    except Inconsistent as exc:
        cert = exc.certificate
        used = [labels[i] for i in sorted(cert)]
        return SplitResult(False, mode, certificate=cert,
                           certificate_valid=check_certificate(eqs, cert, ring),
                           n_unknowns=len(unknowns), n_equations=len(eqs),
                           explanation="; ".join(used))
    witness = {}
    for s in objs:
        cols = [{i: sol.values[(s, i, j)] for i in range(F.dims[s]) if sol.values[(s, i, j)] != 0}
                for j in range(G.dims[s])]
        witness[s] = SparseMatrix(F.dims[s], G.dims[s], cols)
    ok = check_natural(G, F, witness)
    for s in objs:
        if mode == "section":
            ok &= tau[s] @ witness[s] == SparseMatrix.identity(G.dims[s], ring)
        else:
            ok &= witness[s] @ tau[s] == SparseMatrix.identity(F.dims[s], ring)
    if not ok:
        raise VerificationFailed("solved splitting fails re-verification")
    return SplitResult(True, mode, witness=witness, n_unknowns=len(unknowns),
                       n_equations=len(eqs))


def builtin_case(category: str, case: str, N: int = 2, ring=QQ):
    """``(F, G, tau, mode)`` for the stock splitting questions.

    ``eps``: augmentation ``P_1 -> const`` on ``Fin``, section sought.
    ``incl12``: ``P_1 -> P_2`` on ``Epi`` induced by the collapse ``2 -> 1``,
    retraction sought.  ``identity``: identity of ``P_1``, section sought.
    """
    if case == "eps":
        if category != "fin":
            raise NotSupported("eps is defined on fin")
        F, G = SetFunctor.projective("fin", 1, N, ring), SetFunctor.constant("fin", N, ring)
        tau = {s: SparseMatrix(1, F.dims[s], [{0: ring.one} for _ in range(F.dims[s])])
               for s in F.objects}
        return F, G, tau, "section"
    if case == "incl12":
        if category != "epi":
            raise NotSupported("incl12 is defined on epi")
        F, G = SetFunctor.projective("epi", 1, N, ring), SetFunctor.projective("epi", 2, N, ring)
        tau = {}
        for s in F.objects:
            src, tgt = set_maps("epi", 1, s), set_maps("epi", 2, s)
            pos = {x: i for i, x in enumerate(tgt)}
            # [f] -> [f . collapse]
            tau[s] = SparseMatrix(len(tgt), len(src), [{pos[(f[0], f[0])]: ring.one} for f in src])
        return F, G, tau, "retraction"
    if case == "identity":
        F = SetFunctor.projective(category, 1, N, ring)
        tau = {s: SparseMatrix.identity(F.dims[s], ring) for s in F.objects}
        return F, F, tau, "section"
    raise NotSupported(f"unknown case {case!r}")


def dumps_functor(F) -> str:
    return json.dumps(F.to_json(), sort_keys=True, ensure_ascii=False)
