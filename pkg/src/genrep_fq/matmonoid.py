"""Matrices over ``F_q`` and the combinatorics of Hom-sets.

A ``b x a`` matrix is a linear map ``F^a -> F^b``.  The Hom-set
``Hom(F^a, F^b)`` is enumerated in lexicographic order of the integer codes
of the (row-major) entries, so the position of a matrix in that order is the
integer whose base-``q`` digits are its entries.  Everything downstream works
with these positions ("indices") for speed; :class:`Mat` is the readable
value type.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .errors import BudgetExceeded, CtxMismatch, DimensionMismatch, GenrepError
from .scalars import FieldCtx, field_ctx

DEFAULT_BUDGET = 2**20
# largest |Hom(b,c)| * |Hom(a,b)| for which a full composition table is built
TABLE_LIMIT = 2**19


@dataclass(frozen=True)
class Mat:
    ctx: FieldCtx
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch("entry count does not match shape")

    # construction ------------------------------------------------------
    @classmethod
    def from_rows(cls, ctx: FieldCtx, rows, cols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch("ragged rows")
            flat.extend(ctx(x).code for x in r)
        return cls(ctx, len(rows), ncols, tuple(flat))

    @classmethod
    def identity(cls, ctx: FieldCtx, n: int) -> "Mat":
        return cls(ctx, n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zero(cls, ctx: FieldCtx, rows: int, cols: int) -> "Mat":
        return cls(ctx, rows, cols, (0,) * (rows * cols))

    @classmethod
    def eye_partial(cls, ctx: FieldCtx, n: int, r: int) -> "Mat":
        """``n x n`` matrix with ones on the first ``r`` diagonal entries."""
        return cls(ctx, n, n, tuple(1 if i == j and i < r else 0
                                    for i in range(n) for j in range(n)))

    # access -------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def index(self) -> int:
        q, idx = self.ctx.q, 0
        for c in self.entries:
            idx = idx * q + c
        return idx

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    # arithmetic -------------------------------------------------------------
    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ctx is not other.ctx:
            raise CtxMismatch("matrices over different fields")
        if self.cols != other.rows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        add, mul = self.ctx.add_table, self.ctx.mul_table
        m, k, n = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        out = []
        for i in range(m):
            for j in range(n):
                s = 0
                for t in range(k):
                    s = add[s][mul[a[i * k + t]][b[t * n + j]]]
                out.append(s)
        return Mat(self.ctx, m, n, tuple(out))

    def apply(self, v) -> tuple:
        """Image of a column vector given as a code sequence."""
        add, mul = self.ctx.add_table, self.ctx.mul_table
        out = []
        for i in range(self.rows):
            s = 0
            for t in range(self.cols):
                s = add[s][mul[self.entries[i * self.cols + t]][v[t]]]
            out.append(s)
        return tuple(out)

    def transpose(self) -> "Mat":
        return transpose(self)

    @property
    def T(self) -> "Mat":
        return transpose(self)

    def rank(self) -> int:
        return len(rref_rows(self.ctx, self.to_rows())[1])

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "Mat":
        if self.rows != self.cols:
            raise DimensionMismatch("inverse of a non-square matrix")
        n = self.rows
        aug = [self.to_rows()[i] + [1 if i == j else 0 for j in range(n)] for i in range(n)]
        red, piv = rref_rows(self.ctx, aug)
        if piv[:n] != list(range(n)):
            raise GenrepError("matrix is singular")
        return Mat(self.ctx, n, n, tuple(x for r in red[:n] for x in r[n:]))

    def block_embed(self, n: int) -> "Mat":
        """Place a square matrix in the upper-left corner of an ``n x n`` zero matrix."""
        r = self.rows
        return Mat(self.ctx, n, n, tuple(
            self.entries[i * r + j] if i < r and j < r else 0
            for i in range(n) for j in range(n)))

    def __str__(self):
        return format_mat(self)

    def __repr__(self):
        return f"Mat({format_mat(self)})"

    def __lt__(self, other: "Mat"):
        return (self.rows, self.cols, self.entries) < (other.rows, other.cols, other.entries)


def format_mat(A: Mat) -> str:
    """Serialize as ``q:mxn:digits`` with one digit per entry code."""
    return f"{A.ctx.q}:{A.rows}x{A.cols}:" + "".join(str(c) for c in A.entries)


def parse_mat(s: str) -> Mat:
    try:
        qs, shape, digits = s.split(":")
        m, n = (int(x) for x in shape.split("x"))
        ctx = field_ctx(int(qs))
    except ValueError as exc:
        raise GenrepError(f"bad matrix string {s!r}") from exc
    if len(digits) != m * n or any(int(d) >= ctx.q for d in digits):
        raise GenrepError(f"bad matrix digits in {s!r}")
    return Mat(ctx, m, n, tuple(int(d) for d in digits))


def transpose(A: Mat) -> Mat:
    return Mat(A.ctx, A.cols, A.rows,
               tuple(A.entries[i * A.cols + j] for j in range(A.cols) for i in range(A.rows)))


def rref_rows(ctx: FieldCtx, rows: list[list[int]]):
    """Reduced row echelon form of code rows; returns (nonzero rows, pivot columns)."""
    add, mul, neg, inv = ctx.add_table, ctx.mul_table, ctx.neg_table, ctx.inv_table
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        sel = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        s = inv[rows[r][c]]
        rows[r] = [mul[s][x] for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = neg[rows[i][c]]
                rows[i] = [add[x][mul[f][y]] for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    """Subspace of ``F^n`` given by its reduced row echelon basis (rows)."""

    n: int
    basis: Mat

    @property
    def dim(self) -> int:
        return self.basis.rows

    @property
    def codim(self) -> int:
        return self.n - self.basis.rows

    @property
    def pivots(self) -> list[int]:
        return rref_rows(self.basis.ctx, self.basis.to_rows())[1] if self.dim else []

    def contains(self, v) -> bool:
        ctx = self.basis.ctx
        rows = self.basis.to_rows() + [list(v)]
        return len(rref_rows(ctx, rows)[1]) == self.dim

    def __lt__(self, other: "Subspace"):
        return (self.n, self.dim, self.basis.entries) < (other.n, other.dim, other.basis.entries)

    def __str__(self):
        return f"<{', '.join(''.join(map(str, self.basis.row(i))) for i in range(self.dim))}>" \
            if self.dim else "<0>"


def span(ctx: FieldCtx, n: int, vectors) -> Subspace:
    vectors = [list(v) for v in vectors]
    if not vectors:
        return Subspace(n, Mat(ctx, 0, n, ()))
    red, _ = rref_rows(ctx, vectors)
    return Subspace(n, Mat(ctx, len(red), n, tuple(x for r in red for x in r)))


def rank_and_kernel(A: Mat) -> tuple[int, Subspace]:
    ctx, n = A.ctx, A.cols
    red, piv = rref_rows(ctx, A.to_rows()) if A.rows else ([], [])
    rank = len(piv)
    free = [c for c in range(n) if c not in piv]
    neg = ctx.neg_table
    vecs = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = neg[red[i][f]]
        vecs.append(v)
    return rank, span(ctx, n, vecs)


def image(A: Mat) -> Subspace:
    return span(A.ctx, A.rows, [A.col(j) for j in range(A.cols)])


def subspace_image(A: Mat, W: Subspace) -> Subspace:
    """``A(W)`` for ``A : F^n -> F^m``."""
    return span(A.ctx, A.rows, [A.apply(W.basis.row(i)) for i in range(W.dim)])


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """Number of ``k``-dimensional subspaces of ``F_q^n`` (0 out of range)."""
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def gl_order(q: int, n: int) -> int:
    out = 1
    for i in range(n):
        out *= q**n - q**i
    return out


@lru_cache(maxsize=None)
def _subspaces(ctx: FieldCtx, n: int, dim: int) -> tuple:
    out = []
    for piv in combinations(range(n), dim):
        slots = [(r, c) for r, p in enumerate(piv) for c in range(p + 1, n) if c not in piv]
        for vals in product(range(ctx.q), repeat=len(slots)):
            rows = [[0] * n for _ in range(dim)]
            for r, p in enumerate(piv):
                rows[r][p] = 1
            for (r, c), v in zip(slots, vals):
                rows[r][c] = v
            out.append(Subspace(n, Mat(ctx, dim, n, tuple(x for row in rows for x in row))))
    out.sort()
    return tuple(out)


def enumerate_subspaces(ctx: FieldCtx, n: int, codim: int) -> list[Subspace]:
    if not 0 <= codim <= n:
        raise DimensionMismatch(f"codimension {codim} out of range for F^{n}")
    return list(_subspaces(ctx, n, n - codim))


def all_subspaces(ctx: FieldCtx, n: int) -> list[Subspace]:
    """Every subspace of ``F^n``, ordered by dimension then basis."""
    return [W for d in range(n + 1) for W in _subspaces(ctx, n, d)]


def section_for_subspace(W: Subspace, k: int) -> tuple[Mat, Mat]:
    """Surjection ``pi: F^n -> F^k`` with kernel ``W`` and a right inverse ``sigma``.

    ``sigma`` sends the ``i``-th unit vector to the ``i``-th non-pivot unit
    vector of the echelon basis of ``W``; ``pi`` subtracts the pivot part.
    """
    if W.codim != k:
        raise DimensionMismatch(f"subspace of codimension {W.codim}, asked for k={k}")
    ctx, n = W.basis.ctx, W.n
    piv = W.pivots
    free = [c for c in range(n) if c not in piv]
    neg = ctx.neg_table
    pi = [[0] * n for _ in range(k)]
    for j in range(n):
        if j in free:
            pi[free.index(j)][j] = 1
        else:
            w = W.basis.row(piv.index(j))
            for i, fc in enumerate(free):
                pi[i][j] = neg[w[fc]]
    sigma = [[1 if free[i] == r else 0 for i in range(k)] for r in range(n)]
    return (Mat(ctx, k, n, tuple(x for r in pi for x in r)),
            Mat(ctx, n, k, tuple(x for r in sigma for x in r)))


# ---------------------------------------------------------------------------
# Hom-sets


class HomSet:
    """``Hom(F^src, F^tgt)``: all ``tgt x src`` matrices, canonically indexed."""

    def __init__(self, ctx: FieldCtx, src: int, tgt: int):
        self.ctx = ctx
        self.src = src
        self.tgt = tgt
        self.length = src * tgt
        self.size = ctx.q ** self.length
        self._ranks = None
        self._entries = None

    def __len__(self):
        return self.size

    def __iter__(self):
        return (self.mat(i) for i in range(self.size))

    def entries_array(self) -> np.ndarray:
        if self._entries is None:
            q, L = self.ctx.q, self.length
            idx = np.arange(self.size, dtype=np.int64)
            powers = q ** np.arange(L - 1, -1, -1, dtype=np.int64)
            self._entries = (idx[:, None] // powers[None, :]) % q if L else \
                np.zeros((self.size, 0), dtype=np.int64)
        return self._entries

    def mat(self, i: int) -> Mat:
        q, L = self.ctx.q, self.length
        digits = [0] * L
        for pos in range(L - 1, -1, -1):
            digits[pos] = i % q
            i //= q
        return Mat(self.ctx, self.tgt, self.src, tuple(digits))

    def index(self, A: Mat) -> int:
        if A.ctx is not self.ctx:
            raise CtxMismatch("matrix from another field")
        if A.shape != (self.tgt, self.src):
            raise DimensionMismatch(f"{A.shape} is not in Hom(F^{self.src}, F^{self.tgt})")
        return A.index

    @property
    def ranks(self) -> list[int]:
        if self._ranks is None:
            self._ranks = [self.mat(i).rank() for i in range(self.size)]
        return self._ranks

    def indices_of_rank(self, r: int) -> list[int]:
        return [i for i, rk in enumerate(self.ranks) if rk == r]

    def __repr__(self):
        return f"Hom(F_{self.ctx.q}^{self.src}, F_{self.ctx.q}^{self.tgt})"


@lru_cache(maxsize=None)
def hom_set(ctx: FieldCtx, src: int, tgt: int) -> HomSet:
    return HomSet(ctx, src, tgt)


@lru_cache(maxsize=None)
def compose_table(ctx: FieldCtx, a: int, b: int, c: int):
    """``T[i][j]`` = index of ``Hom(b,c)[i] @ Hom(a,b)[j]`` in ``Hom(a,c)``.

    Returns None when the table would exceed :data:`TABLE_LIMIT`.
    """
    H1, H2 = hom_set(ctx, b, c), hom_set(ctx, a, b)
    if H1.size * H2.size > TABLE_LIMIT:
        return None
    q = ctx.q
    if c * a == 0:
        return [[0] * H2.size for _ in range(H1.size)]
    add = np.array(ctx.add_table, dtype=np.int64)
    mul = np.array(ctx.mul_table, dtype=np.int64)
    X = H1.entries_array().reshape(H1.size, c, b)
    Y = H2.entries_array().reshape(H2.size, b, a)
    acc = np.zeros((H1.size, H2.size, c, a), dtype=np.int64)
    for t in range(b):
        acc = add[acc, mul[X[:, None, :, t, None], Y[None, :, None, t, :]]]
    powers = q ** np.arange(c * a - 1, -1, -1, dtype=np.int64)
    idx = (acc.reshape(H1.size, H2.size, c * a) * powers).sum(axis=2)
    return idx.tolist()


class Composer:
    """Index-level composition ``Hom(b,c) x Hom(a,b) -> Hom(a,c)``."""

    def __init__(self, ctx: FieldCtx, a: int, b: int, c: int):
        self.table = compose_table(ctx, a, b, c)
        self.left, self.right, self.out = hom_set(ctx, b, c), hom_set(ctx, a, b), hom_set(ctx, a, c)

    def __call__(self, i: int, j: int) -> int:
        if self.table is not None:
            return self.table[i][j]
        return (self.left.mat(i) @ self.right.mat(j)).index

    def row(self, i: int):
        if self.table is not None:
            return self.table[i]
        A = self.left.mat(i)
        return _LazyRow(A, self.right)


class _LazyRow:
    def __init__(self, A: Mat, right: HomSet):
        self.A, self.right = A, right

    def __getitem__(self, j):
        return (self.A @ self.right.mat(j)).index


@lru_cache(maxsize=None)
def composer(ctx: FieldCtx, a: int, b: int, c: int) -> Composer:
    return Composer(ctx, a, b, c)


def _check_budget(size: int, budget: int):
    if size > budget:
        raise BudgetExceeded(f"enumeration of {size} elements exceeds budget {budget}")


def enumerate_mats(ctx: FieldCtx, kind: str, *dims: int, budget: int = DEFAULT_BUDGET) -> list[Mat]:
    """Canonically ordered matrices of the given kind.

    ``hom(m, n)`` is ``Hom(F^m, F^n)``; ``gl(n)``, ``sing(n)``;
    ``inj(k, m)`` injections ``F^k -> F^m``; ``surj(n, k)`` surjections
    ``F^n -> F^k``.
    """
    if any(d < 0 for d in dims):
        raise DimensionMismatch("dimensions must be nonnegative")
    if kind == "hom":
        m, n = dims
        H = hom_set(ctx, m, n)
        _check_budget(H.size, budget)
        return list(H)
    if kind in ("gl", "sing"):
        (n,) = dims
        H = hom_set(ctx, n, n)
        _check_budget(H.size, budget)
        want = (lambda r: r == n) if kind == "gl" else (lambda r: r < n)
        return [H.mat(i) for i, r in enumerate(H.ranks) if want(r)]
    if kind == "inj":
        k, m = dims
        H = hom_set(ctx, k, m)
        _check_budget(H.size, budget)
        return [H.mat(i) for i, r in enumerate(H.ranks) if r == k]
    if kind == "surj":
        n, k = dims
        H = hom_set(ctx, n, k)
        _check_budget(H.size, budget)
        return [H.mat(i) for i, r in enumerate(H.ranks) if r == k]
    raise GenrepError(f"unknown enumeration kind {kind!r}")


@lru_cache(maxsize=None)
def gl_indices(ctx: FieldCtx, n: int) -> tuple[int, ...]:
    return tuple(hom_set(ctx, n, n).indices_of_rank(n))


@lru_cache(maxsize=None)
def inverse_index(ctx: FieldCtx, n: int) -> dict:
    """Map index of ``g`` in GL_n to index of ``g^{-1}``."""
    comp = composer(ctx, n, n, n)
    ident = Mat.identity(ctx, n).index
    gl = gl_indices(ctx, n)
    out = {}
    for g in gl:
        if g in out:
            continue
        row = comp.row(g)
        for h in gl:
            if row[h] == ident:
                out[g] = h
                out[h] = g
                break
    return out


def gl_generators(ctx: FieldCtx, n: int) -> list[Mat]:
    """Transvections ``I + x^i E_rs`` and ``diag(w, 1, ..., 1)``: they generate GL_n."""
    gens = []
    for r in range(n):
        for s in range(n):
            if r == s:
                continue
            for i in range(ctx.e):
                ent = [1 if a == b else 0 for a in range(n) for b in range(n)]
                ent[r * n + s] = ctx.p**i
                gens.append(Mat(ctx, n, n, tuple(ent)))
    if n and ctx.q > 2:
        ent = [1 if a == b else 0 for a in range(n) for b in range(n)]
        ent[0] = ctx.generator
        gens.append(Mat(ctx, n, n, tuple(ent)))
    return gens


def conjugation_permutation(ctx: FieldCtx, n: int, g: Mat) -> list[int]:
    """Index permutation ``A -> g A g^{-1}`` of ``M_n``."""
    comp = composer(ctx, n, n, n)
    gi, ginv = g.index, g.inverse().index
    row = comp.row(gi)
    size = hom_set(ctx, n, n).size
    return [comp(row[a], ginv) for a in range(size)]


def is_semi_idempotent(A: Mat) -> bool:
    """True iff ``A`` fixes every vector of the image of ``A^n``."""
    if A.rows != A.cols:
        raise DimensionMismatch("semi-idempotence needs a square matrix")
    n = A.rows
    P = Mat.identity(A.ctx, n)
    for _ in range(n):
        P = P @ A
    eventual = image(P)
    for i in range(eventual.dim):
        v = eventual.basis.row(i)
        if A.apply(v) != tuple(v):
            return False
    return True


def conjugacy_orbits(ctx: FieldCtx, n: int, restrict: str = "all_singular",
                     budget: int = DEFAULT_BUDGET, verify_full: bool | None = None) -> list[list[Mat]]:
    """GL_n-conjugacy classes of singular matrices (optionally semi-idempotent).

    Orbits come from closure under conjugation by :func:`gl_generators`; for
    ``n <= 2`` (or when ``verify_full``) each orbit is re-derived by a full
    scan over GL_n.
    """
    if restrict not in ("all_singular", "semi_idempotent"):
        raise GenrepError(f"unknown restriction {restrict!r}")
    H = hom_set(ctx, n, n)
    _check_budget(H.size, budget)
    sing = [i for i, r in enumerate(H.ranks) if r < n]
    perms = [conjugation_permutation(ctx, n, g) for g in gl_generators(ctx, n)]
    seen = set()
    orbits = []
    for a in sing:
        if a in seen:
            continue
        orbit = {a}
        frontier = [a]
        while frontier:
            nxt = []
            for x in frontier:
                for perm in perms:
                    y = perm[x]
                    if y not in orbit:
                        orbit.add(y)
                        nxt.append(y)
            frontier = nxt
        seen |= orbit
        orbits.append(sorted(orbit))
    if verify_full is None:
        verify_full = n <= 2
    if verify_full:
        comp = composer(ctx, n, n, n)
        invs = inverse_index(ctx, n)
        for orb in orbits:
            a = orb[0]
            full = {comp(comp(g, a), invs[g]) for g in gl_indices(ctx, n)}
            if full != set(orb):
                raise GenrepError("generator closure disagrees with full conjugation orbit")
    if restrict == "semi_idempotent":
        orbits = [orb for orb in orbits if is_semi_idempotent(H.mat(orb[0]))]
    return [[H.mat(i) for i in orb] for orb in orbits]
