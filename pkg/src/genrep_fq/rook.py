"""The rook monoid ``R_n`` of partial injections of ``{1..n}`` and the
decomposition ``K[R_n] = prod_k M_{C(n,k)}(K[S_k])``.

The isomorphism goes through the Mobius basis
``nu_f = sum_{g <= f} (-1)^{|f|-|g|} [g]`` (``g <= f`` meaning ``g`` is a
restriction of ``f``), in which ``nu_f nu_h = nu_{fh}`` when
``dom f = ran h`` and vanishes otherwise.  Every coefficient is an integer,
so the decomposition holds over any commutative ring.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import comb, factorial

from .errors import BudgetExceeded, VerificationFailed
from .linalg import Echelon, axpy
from .scalars import QQ

MAX_N = 5


@dataclass(frozen=True)
class PartialInj:
    """``images[i]`` is the image of ``i`` (0-based) or ``None``."""

    n: int
    images: tuple

    def __post_init__(self):
        vals = [v for v in self.images if v is not None]
        if len(vals) != len(set(vals)) or len(self.images) != self.n:
            raise ValueError(f"not a partial injection: {self.images}")

    @classmethod
    def identity(cls, n: int, on=None) -> "PartialInj":
        on = range(n) if on is None else set(on)
        return cls(n, tuple(i if i in on else None for i in range(n)))

    @property
    def domain(self) -> frozenset:
        return frozenset(i for i, v in enumerate(self.images) if v is not None)

    @property
    def range(self) -> frozenset:
        return frozenset(v for v in self.images if v is not None)

    @property
    def rank(self) -> int:
        return len(self.domain)

    def __mul__(self, other: "PartialInj") -> "PartialInj":
        """``self`` after ``other``."""
        return PartialInj(self.n, tuple(None if v is None else self.images[v]
                                        for v in other.images))

    def restrict(self, dom) -> "PartialInj":
        return PartialInj(self.n, tuple(v if i in dom else None for i, v in enumerate(self.images)))

    def restrictions(self):
        """Every ``g <= self``, with the sign ``(-1)^{|self|-|g|}``."""
        dom = sorted(self.domain)
        for r in range(len(dom) + 1):
            for sub in combinations(dom, r):
                yield self.restrict(set(sub)), (-1) ** (len(dom) - r)

    def rook_matrix(self) -> list[list[int]]:
        """0/1 matrix with a one at (f(i), i)."""
        m = [[0] * self.n for _ in range(self.n)]
        for i, v in enumerate(self.images):
            if v is not None:
                m[v][i] = 1
        return m

    def sort_key(self):
        return tuple(-1 if v is None else v for v in self.images)

    def __str__(self):
        return format_rook(self)


def format_rook(f: PartialInj) -> str:
    if f.n == 0:
        return "∅"
    return ", ".join(f"{i + 1}→{'∅' if v is None else v + 1}" for i, v in enumerate(f.images))


def parse_rook(s: str) -> PartialInj:
    s = s.strip()
    if s == "∅":
        return PartialInj(0, ())
    pairs = [p.split("→") for p in s.split(",")]
    n = len(pairs)
    images = [None] * n
    for a, b in pairs:
        i = int(a) - 1
        images[i] = None if b.strip() == "∅" else int(b) - 1
    return PartialInj(n, tuple(images))


def rook_order(n: int) -> int:
    return sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))


@lru_cache(maxsize=None)
def _enumerate(n: int) -> tuple:
    out = []
    for k in range(n + 1):
        for dom in combinations(range(n), k):
            for img in permutations(range(n), k):
                images = [None] * n
                for i, v in zip(dom, img):
                    images[i] = v
                out.append(PartialInj(n, tuple(images)))
    out.sort(key=PartialInj.sort_key)
    return tuple(out)


def enumerate_rook(n: int) -> list[PartialInj]:
    """All of ``R_n`` in lexicographic order of image tuples (unmapped first)."""
    if n > MAX_N or n < 0:
        raise BudgetExceeded(f"R_{n} is outside the supported range n <= {MAX_N}")
    return list(_enumerate(n))


class RookMonoid:
    def __init__(self, n: int):
        self.n = n
        self.elements = enumerate_rook(n)
        self.index = {f: i for i, f in enumerate(self.elements)}
        size = len(self.elements)
        self.table = [[self.index[f * g] for g in self.elements] for f in self.elements]
        self.identity = self.index[PartialInj.identity(n)]
        self.size = size

    def mul(self, ring, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, c in x.items():
            row = self.table[a]
            for b, d in y.items():
                t = row[b]
                s = out.get(t, ring.zero) + c * d
                if s == 0:
                    out.pop(t, None)
                else:
                    out[t] = s
        return out


@lru_cache(maxsize=None)
def rook_monoid(n: int) -> RookMonoid:
    return RookMonoid(n)


def subsets(n: int, k: int) -> list[tuple]:
    """``k``-subsets of ``{0..n-1}``, lexicographic."""
    return list(combinations(range(n), k))


# ---------------------------------------------------------------------------
# Mobius idempotents


@dataclass
class MobiusFamily:
    n: int
    ring: object
    idempotents: dict  # subset tuple -> element dict

    def verify(self) -> dict:
        R = rook_monoid(self.n)
        ring = self.ring
        items = sorted(self.idempotents.items(), key=lambda kv: (len(kv[0]), kv[0]))
        idem = all(R.mul(ring, e, e) == e for _, e in items)
        orth = all(not R.mul(ring, e, f) for s, e in items for t, f in items if s != t)
        total: dict = {}
        for _, e in items:
            axpy(total, ring.one, e)
        complete = total == {R.identity: ring.one}
        integral = all(_integral(v) for _, e in items for v in e.values())
        signs = all(v == ring.one or v == -ring.one for _, e in items for v in e.values())
        return {"idempotent": idem, "orthogonal": orth, "complete": complete,
                "integral": integral, "unit_coefficients": signs, "count": len(items)}


def _integral(v) -> bool:
    return getattr(v, "denominator", 1) == 1


def mobius_idempotents(n: int, ring=QQ, verify: bool = True) -> MobiusFamily:
    """``eta_T = sum_{U <= T} (-1)^{|T|-|U|} [id_U]`` for every subset ``T``."""
    R = rook_monoid(n)
    fam = {}
    for k in range(n + 1):
        for T in subsets(n, k):
            e: dict = {}
            for g, sign in PartialInj.identity(n, T).restrictions():
                e[R.index[g]] = ring(sign)
            fam[T] = e
    out = MobiusFamily(n, ring, fam)
    if verify:
        rep = out.verify()
        if not all(v for k, v in rep.items() if k != "count"):
            raise VerificationFailed(f"Mobius family for n={n} failed: {rep}")
    return out


# ---------------------------------------------------------------------------
# block side


class RookBlock:
    """``blocks[k][(i, j)] = {permutation tuple: coeff}`` over ``K[S_k]``."""

    __slots__ = ("n", "ring", "blocks")

    def __init__(self, n: int, ring, blocks=None):
        self.n, self.ring = n, ring
        self.blocks = blocks if blocks is not None else [dict() for _ in range(n + 1)]

    @property
    def sizes(self) -> list[int]:
        return [comb(self.n, k) for k in range(self.n + 1)]

    @classmethod
    def identity(cls, n: int, ring) -> "RookBlock":
        return cls(n, ring, [{(i, i): {tuple(range(k)): ring.one} for i in range(comb(n, k))}
                             for k in range(n + 1)])

    def add_entry(self, k, i, j, perm, c):
        entry = self.blocks[k].setdefault((i, j), {})
        s = entry.get(perm, self.ring.zero) + c
        if s == 0:
            entry.pop(perm, None)
            if not entry:
                del self.blocks[k][(i, j)]
        else:
            entry[perm] = s

    def __add__(self, other: "RookBlock") -> "RookBlock":
        out = RookBlock(self.n, self.ring, [{ij: dict(e) for ij, e in b.items()}
                                            for b in self.blocks])
        for k, b in enumerate(other.blocks):
            for (i, j), e in b.items():
                for p, c in e.items():
                    out.add_entry(k, i, j, p, c)
        return out

    def scale(self, a) -> "RookBlock":
        if a == 0:
            return RookBlock(self.n, self.ring)
        return RookBlock(self.n, self.ring, [{ij: {p: a * c for p, c in e.items()}
                                              for ij, e in b.items()} for b in self.blocks])

    def __mul__(self, other: "RookBlock") -> "RookBlock":
        out = RookBlock(self.n, self.ring)
        for k, (A, B) in enumerate(zip(self.blocks, other.blocks)):
            rows: dict = {}
            for (j, l), e in B.items():
                rows.setdefault(j, []).append((l, e))
            for (i, j), a in A.items():
                for l, b in rows.get(j, ()):
                    for s, c in a.items():
                        for t, d in b.items():
                            out.add_entry(k, i, l, tuple(s[x] for x in t), c * d)
        return out

    def normalized(self):
        return [tuple(sorted((ij, tuple(sorted(e.items()))) for ij, e in b.items()))
                for b in self.blocks]

    def __eq__(self, other):
        return isinstance(other, RookBlock) and self.normalized() == other.normalized()

    def coefficients(self):
        for b in self.blocks:
            for e in b.values():
                yield from e.values()


class RookIso:
    def __init__(self, n: int, ring=QQ):
        self.n, self.ring = n, ring
        self.monoid = rook_monoid(n)
        self.subsets = [subsets(n, k) for k in range(n + 1)]
        self.where = {T: i for k in range(n + 1) for i, T in enumerate(self.subsets[k])}
        self._cache: dict = {}

    def _perm(self, g: PartialInj) -> tuple:
        """``beta_ran^{-1} g beta_dom`` as a permutation of ``{0..k-1}``."""
        dom = sorted(g.domain)
        ran = sorted(g.range)
        pos = {v: i for i, v in enumerate(ran)}
        return tuple(pos[g.images[d]] for d in dom)

    def phi_basis(self, a: int) -> RookBlock:
        hit = self._cache.get(a)
        if hit is not None:
            return hit
        out = RookBlock(self.n, self.ring)
        for g, _ in self.monoid.elements[a].restrictions():
            k = g.rank
            out.add_entry(k, self.where[tuple(sorted(g.range))], self.where[tuple(sorted(g.domain))],
                          self._perm(g), self.ring.one)
        self._cache[a] = out
        return out

    def phi(self, x: dict) -> RookBlock:
        out = RookBlock(self.n, self.ring)
        for a, c in x.items():
            out = out + self.phi_basis(a).scale(c)
        return out

    def phi_inverse(self, b: RookBlock) -> dict:
        out: dict = {}
        R = self.monoid
        for k, blk in enumerate(b.blocks):
            for (i, j), e in blk.items():
                ran, dom = self.subsets[k][i], self.subsets[k][j]
                for perm, c in e.items():
                    images = [None] * self.n
                    for x, d in enumerate(dom):
                        images[d] = ran[perm[x]]
                    f = PartialInj(self.n, tuple(images))
                    for g, sign in f.restrictions():
                        t = R.index[g]
                        s = out.get(t, self.ring.zero) + sign * c
                        if s == 0:
                            out.pop(t, None)
                        else:
                            out[t] = s
        return out


def rook_phi(x: dict, n: int, ring=QQ) -> RookBlock:
    return RookIso(n, ring).phi(x)


def verify_rook(n: int, ring=QQ, samples: int | None = None, seed: int = 0) -> dict:
    """Exhaustive (or sampled) verification of the rook decomposition."""
    t0 = time.perf_counter()
    checks = []

    def record(name, ok, **extra):
        checks.append({"name": name, "status": "pass" if ok else "fail", **extra})

    R = rook_monoid(n)
    terms = [comb(n, k) ** 2 * factorial(k) for k in range(n + 1)]
    record("order", R.size == rook_order(n) == sum(terms), size=R.size)
    record("dimension_identity", R.size == sum(terms),
           identity=f"{R.size} = " + "+".join(map(str, terms)))
    fam = mobius_idempotents(n, ring, verify=False).verify()
    for key in ("idempotent", "orthogonal", "complete", "integral", "unit_coefficients"):
        record(f"mobius_{key}", fam[key])
    iso = RookIso(n, ring)
    images = [iso.phi_basis(a) for a in range(R.size)]
    record("unital", images[R.identity] == RookBlock.identity(n, ring))
    if samples is None:
        pairs = ((a, b) for a in range(R.size) for b in range(R.size))
        npairs = R.size ** 2
    else:
        rnd = random.Random(seed)
        pairs = ((rnd.randrange(R.size), rnd.randrange(R.size)) for _ in range(samples))
        npairs = samples
    mult = all(images[a] * images[b] == images[R.table[a][b]] for a, b in pairs)
    record("multiplicative", mult, pairs=npairs, **({"seed": seed} if samples else {}))
    round_trip = all(iso.phi_inverse(images[a]) == {a: ring.one} for a in range(R.size))
    record("phi_inverse_round_trip", round_trip, checked=R.size)
    units = 0
    units_ok = True
    inverse_integral = True
    for k in range(n + 1):
        s = comb(n, k)
        for perm in permutations(range(k)):
            for i in range(s):
                for j in range(s):
                    E = RookBlock(n, ring)
                    E.add_entry(k, i, j, perm, ring.one)
                    x = iso.phi_inverse(E)
                    inverse_integral &= all(_integral(v) for v in x.values())
                    units_ok &= iso.phi(x) == E
                    units += 1
    record("bijective_on_matrix_units", units_ok and units == R.size, checked=units)
    record("integral_entries", all(_integral(v) for b in images for v in b.coefficients()))
    record("integral_inverse_images", inverse_integral)
    corners = True
    mob = mobius_idempotents(n, ring, verify=False)
    for T, eta in mob.idempotents.items():
        ech = Echelon(ring)
        for a in range(R.size):
            ech.add(R.mul(ring, R.mul(ring, eta, {a: ring.one}), eta))
        corners &= ech.rank == factorial(len(T))
    record("corner_dimensions", corners, corners=len(mob.idempotents))
    status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
    return {"n": n, "coeff_ring": ring.name, "checks": checks, "status": status,
            "timing": {"total_s": round(time.perf_counter() - t0, 3)}}
