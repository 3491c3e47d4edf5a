"""Exact sparse linear algebra over a coefficient ring.

Vectors are plain dicts ``key -> nonzero scalar``; keys must be mutually
comparable so that every choice made here is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DimensionMismatch, Inconsistent


def axpy(y: dict, a, x: dict) -> None:
    """In place ``y += a * x``, pruning zeros."""
    for k, v in x.items():
        s = y.get(k)
        s = a * v if s is None else s + a * v
        if s == 0:
            y.pop(k, None)
        else:
            y[k] = s


def scaled(x: dict, a) -> dict:
    if a == 0:
        return {}
    out = {}
    for k, v in x.items():
        w = a * v
        if w != 0:
            out[k] = w
    return out


def combine(terms) -> dict:
    """Sum of ``coeff * vector`` over an iterable of pairs."""
    out: dict = {}
    for a, x in terms:
        axpy(out, a, x)
    return out


class Echelon:
    """Incremental Gauss-Jordan basis of a subspace.

    Each stored vector has value one at its pivot key and zero at every
    other pivot key, so coordinates of a vector in the span are read off at
    the pivots.  ``weights`` (optional) biases the pivot choice towards keys
    of small weight, which keeps fill-in low for near-permutation data.
    """

    def __init__(self, ring, weights: dict | None = None):
        self.ring = ring
        self.basis: list[dict] = []
        self.pivots: list = []
        self.pivot_index: dict = {}
        self._occ: dict = {}
        self.weights = weights

    def __len__(self):
        return len(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, v: dict) -> tuple[dict, dict]:
        """Return ``(residual, coords)`` with ``v = residual + sum coords[i] b_i``."""
        coords = {}
        w = dict(v)
        for k, c in v.items():
            i = self.pivot_index.get(k)
            if i is not None:
                coords[i] = c
        for i, c in coords.items():
            axpy(w, -c, self.basis[i])
        return w, coords

    def coords(self, v: dict) -> dict:
        """Coordinates of ``v``, assumed to lie in the span."""
        out = {}
        for k, c in v.items():
            i = self.pivot_index.get(k)
            if i is not None:
                out[i] = c
        return out

    def contains(self, v: dict) -> bool:
        return not self.reduce(v)[0]

    def _choose_pivot(self, w: dict):
        if self.weights is None:
            return min(w)
        wt = self.weights
        return min(w, key=lambda k: (wt.get(k, 0), k))

    def add(self, v: dict) -> bool:
        """Insert ``v``; return True iff it enlarged the span."""
        w, _ = self.reduce(v)
        if not w:
            return False
        piv = self._choose_pivot(w)
        w = scaled(w, self.ring.inv(w[piv]))
        for i in sorted(self._occ.get(piv, ())):
            b = self.basis[i]
            c = b[piv]
            before = set(b)
            axpy(b, -c, w)
            after = set(b)
            for k in before - after:
                self._occ[k].discard(i)
            for k in after - before:
                self._occ.setdefault(k, set()).add(i)
        idx = len(self.basis)
        self.basis.append(w)
        self.pivots.append(piv)
        self.pivot_index[piv] = idx
        for k in w:
            self._occ.setdefault(k, set()).add(idx)
        return True

    def extend(self, vectors) -> int:
        return sum(1 for v in vectors if self.add(v))


def sparse_rank(vectors, ring) -> int:
    ech = Echelon(ring)
    ech.extend(vectors)
    return ech.rank


class SparseMatrix:
    """Column-sparse matrix: ``cols[j]`` is the image of basis vector ``j``."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols):
        cols = list(cols)
        if len(cols) != ncols:
            raise DimensionMismatch("column count mismatch")
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols

    @classmethod
    def identity(cls, n: int, ring) -> "SparseMatrix":
        return cls(n, n, [{i: ring.one} for i in range(n)])

    @classmethod
    def zero(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(nrows, ncols, [{} for _ in range(ncols)])

    @classmethod
    def from_dense(cls, rows) -> "SparseMatrix":
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        cols = [{i: rows[i][j] for i in range(nrows) if rows[i][j] != 0} for j in range(ncols)]
        return cls(nrows, ncols, cols)

    def to_dense(self, zero):
        out = [[zero] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def apply(self, v: dict) -> dict:
        out: dict = {}
        for j, c in v.items():
            axpy(out, c, self.cols[j])
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        return SparseMatrix(self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatch("shape mismatch in matrix sum")
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            axpy(c, 1, b)
            cols.append(c)
        return SparseMatrix(self.nrows, self.ncols, cols)

    def scale(self, a) -> "SparseMatrix":
        return SparseMatrix(self.nrows, self.ncols, [scaled(c, a) for c in self.cols])

    def trace(self, zero):
        t = zero
        for j, col in enumerate(self.cols):
            v = col.get(j)
            if v is not None:
                t = t + v
        return t

    def rows(self) -> list[dict]:
        out = [dict() for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, v in col.items():
                out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.cols == other.cols

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self.cols))})"


def nullspace(rows: list[dict], unknowns: list, ring) -> list[dict]:
    """Basis of ``{x : row . x = 0 for all rows}`` over the given unknowns."""
    ech = Echelon(ring)
    for r in rows:
        ech.add(r)
    pivset = set(ech.pivots)
    free = [u for u in unknowns if u not in pivset]
    basis = []
    for f in free:
        v = {f: ring.one}
        for i, piv in enumerate(ech.pivots):
            c = ech.basis[i].get(f)
            if c is not None:
                v[piv] = -c
        basis.append(v)
    return basis


@dataclass
class Solution:
    values: dict
    rank: int
    nullity: int
    free: list = field(default_factory=list)


def solve_system(equations, unknowns, ring) -> Solution:
    """Solve ``sum_u coeffs[u] * x_u = rhs`` for a list of ``(coeffs, rhs)``.

    Gauss-Jordan with full pivoting over the unknowns.  On inconsistency
    raises :class:`Inconsistent` whose certificate maps equation index to a
    multiplier ``lam`` with ``sum lam_i coeffs_i == 0`` and
    ``sum lam_i rhs_i != 0``.
    """
    order = {u: i for i, u in enumerate(unknowns)}
    rows = []  # (coeffs, rhs, combo)
    pivot_of = {}
    for idx, (coeffs, rhs) in enumerate(equations):
        c = {u: v for u, v in coeffs.items() if v != 0}
        r = rhs
        combo = {idx: ring.one}
        # rows are fully reduced, so one pass clears every pivot
        for u in [u for u in c if u in pivot_of]:
            prow = rows[pivot_of[u]]
            a = c[u]
            axpy(c, -a, prow[0])
            r = r - a * prow[1]
            axpy(combo, -a, prow[2])
        if not c:
            if r != 0:
                raise Inconsistent(
                    f"equation {idx} reduces to 0 = {ring.fmt(r)}", certificate=combo)
            continue
        piv = min(c, key=lambda u: order[u])
        inv = ring.inv(c[piv])
        c, r, combo = scaled(c, inv), r * inv, scaled(combo, inv)
        for prow in rows:
            a = prow[0].get(piv)
            if a is not None:
                axpy(prow[0], -a, c)
                prow[1] = prow[1] - a * r
                axpy(prow[2], -a, combo)
        pivot_of[piv] = len(rows)
        rows.append([c, r, combo])
    values = {u: ring.zero for u in unknowns}
    for u, i in pivot_of.items():
        values[u] = rows[i][1]
    free = [u for u in unknowns if u not in pivot_of]
    return Solution(values=values, rank=len(rows), nullity=len(free), free=free)


def check_certificate(equations, certificate: dict, ring) -> bool:
    """Independent check that a certificate proves infeasibility."""
    lhs: dict = {}
    rhs = ring.zero
    for i, lam in certificate.items():
        coeffs, r = equations[i]
        axpy(lhs, lam, coeffs)
        rhs = rhs + lam * r
    return not lhs and rhs != 0
