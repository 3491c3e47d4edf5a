"""The unit ``e_n^S`` of the singular ideal ``K[Sing_n(F_q)]``.

The unit is searched among GL_n-invariant elements, i.e. combinations of
conjugacy-orbit sums (by default only orbits of semi-idempotent matrices),
subject to the single linear condition ``e * [E] = [E]`` where ``E`` is the
rank ``n-1`` diagonal idempotent.  Any invariant solution of that condition
is automatically a two-sided unit; :func:`verify_unit` re-checks this by
exhaustion rather than trusting it.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import Inconsistent, VerificationFailed
from .linalg import solve_system
from .matmonoid import (DEFAULT_BUDGET, Mat, composer, conjugacy_orbits, format_mat,
                        hom_set)
from .monoidring import RingElem, predicates
from .scalars import FieldCtx, QQ, field_ctx


@dataclass
class Ansatz:
    ctx: FieldCtx
    n: int
    restrict: str
    orbits: list[list[Mat]]

    def orbit_sum(self, c: int, ring) -> RingElem:
        return RingElem.from_mats(ring, [(A, 1) for A in self.orbits[c]])

    def element(self, coeffs, ring) -> RingElem:
        """Expand ``sum_c coeffs[c] * O_c``."""
        terms = {}
        for c, orb in enumerate(self.orbits):
            for A in orb:
                terms[A.index] = ring(coeffs[c])
        return RingElem(ring, self.ctx, self.n, self.n, terms)


@dataclass
class SingularUnit:
    q: int
    n: int
    ring: object
    restrict: str
    orbits: list[list[Mat]]
    coefficients: list
    eS: RingElem
    eG: RingElem
    rank: int = 0
    nullity: int = 0
    n_equations: int = 0
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "coeff_ring": self.ring.name,
            "ansatz": self.restrict,
            "orbits": [
                {"representative": format_mat(orb[0]), "size": len(orb),
                 "coefficient": self.ring.fmt(c)}
                for orb, c in zip(self.orbits, self.coefficients)
            ],
            "eS": self.eS.to_json(),
        }


def e_bar(ctx: FieldCtx, n: int) -> Mat:
    """Diagonal idempotent of rank ``n - 1`` (ones on the first n-1 entries)."""
    return Mat.eye_partial(ctx, n, n - 1)


def build_ansatz(ctx: FieldCtx, n: int, restrict: str = "semi_idempotent",
                 budget: int = DEFAULT_BUDGET) -> Ansatz:
    return Ansatz(ctx, n, restrict, conjugacy_orbits(ctx, n, restrict, budget=budget))


def unit_equations(ansatz: Ansatz, ring):
    """Linear system ``(sum x_c O_c) * [E] = [E]``, one equation per matrix
    with zero last column."""
    ctx, n = ansatz.ctx, ansatz.n
    E = e_bar(ctx, n)
    comp = composer(ctx, n, n, n)
    eidx = E.index
    counts: dict = {}
    for c, orb in enumerate(ansatz.orbits):
        for A in orb:
            b = comp(A.index, eidx)
            row = counts.setdefault(b, {})
            row[c] = row.get(c, 0) + 1
    H = hom_set(ctx, n, n)
    # the image of right multiplication by [E]: matrices whose last column vanishes
    targets = sorted({comp(a, eidx) for a in range(H.size)})
    eqs = []
    for b in targets:
        coeffs = {c: ring(k) for c, k in counts.get(b, {}).items()}
        eqs.append((coeffs, ring.one if b == eidx else ring.zero))
    return eqs


def _solve_with(ctx: FieldCtx, n: int, ring, restrict: str, budget: int) -> SingularUnit:
    ansatz = build_ansatz(ctx, n, restrict, budget)
    eqs = unit_equations(ansatz, ring)
    sol = solve_system(eqs, list(range(len(ansatz.orbits))), ring)
    coeffs = [sol.values[c] for c in range(len(ansatz.orbits))]
    eS = ansatz.element(coeffs, ring)
    eG = RingElem.one(ring, ctx, n) - eS
    return SingularUnit(ctx.q, n, ring, restrict, ansatz.orbits, coeffs, eS, eG,
                        rank=sol.rank, nullity=sol.nullity, n_equations=len(eqs))


def _passes(u: SingularUnit) -> bool:
    flags = predicates(u.eS)
    return all(flags[k] for k in ("idempotent", "central", "transpose_fixed",
                                  "gl_conjugation_fixed", "unit_on_singulars"))


@lru_cache(maxsize=None)
def solve_singular_unit(q: int, n: int, ring=QQ, budget: int = DEFAULT_BUDGET) -> SingularUnit:
    """Solve for ``e_n^S`` over ``ring``.

    Raises :class:`Inconsistent` when no unit exists in the ansatz (e.g. when
    ``p = char F_q`` is not invertible in ``ring``).
    """
    ctx = field_ctx(q)
    if n == 0:
        # Sing_0 is empty: the singular ideal is zero and so is its unit
        zero = RingElem.zero(ring, ctx, 0, 0)
        return SingularUnit(q, 0, ring, "semi_idempotent", [], [], zero,
                            RingElem.one(ring, ctx, 0))
    p_invertible = ring.is_unit_int(ctx.p)
    try:
        u = _solve_with(ctx, n, ring, "semi_idempotent", budget)
    except Inconsistent as exc:
        if not p_invertible:
            raise Inconsistent(
                f"no unit of K[Sing_{n}(F_{q})] over {ring!r}: the characteristic "
                f"p={ctx.p} of F_{q} must be invertible in K", exc.certificate) from None
        u = None
    if u is not None and u.nullity == 0 and _passes(u):
        return u
    # semi-idempotent orbits did not suffice: widen the ansatz
    try:
        u = _solve_with(ctx, n, ring, "all_singular", budget)
    except Inconsistent as exc:
        raise Inconsistent(
            f"no GL-invariant unit of K[Sing_{n}(F_{q})] over {ring!r}",
            exc.certificate) from None
    if u.nullity != 0 or not _passes(u):
        raise VerificationFailed(
            f"solved element for (q={q}, n={n}) fails the unit predicates")
    u.notes.append("semi-idempotent ansatz insufficient; used all singular orbits")
    return u


def singular_unit_or_none(q: int, n: int, ring=QQ):
    try:
        return solve_singular_unit(q, n, ring)
    except Inconsistent:
        return None


def verify_unit(u: SingularUnit) -> dict:
    """Exhaustive re-check of every defining property of ``u``."""
    ctx = field_ctx(u.q)
    n, ring = u.n, u.ring
    H = hom_set(ctx, n, n)
    sing = [a for a in range(H.size) if H.ranks[a] < n]
    checks = []

    def record(name, ok, **counts):
        checks.append({"name": name, "status": "pass" if ok else "fail", **counts})

    t0 = time.perf_counter()
    flags = predicates(u.eS)
    t_pred = time.perf_counter() - t0
    record("idempotent", flags["idempotent"])
    record("central", flags["central"], checked=H.size)
    record("transpose_fixed", flags["transpose_fixed"])
    record("gl_conjugation_fixed", flags["gl_conjugation_fixed"], checked=H.size - len(sing))
    record("supported_on_singulars", flags["in_singular_ideal"])
    record("two_sided_unit_on_singulars", flags["unit_on_singulars"], checked=len(sing))

    comp = composer(ctx, n, n, n)
    killed = True
    for a in sing:
        row = comp.row(a)
        for side in ("left", "right"):
            acc: dict = {}
            for k, v in u.eG.terms.items():
                t = comp(k, a) if side == "left" else row[k]
                acc[t] = acc.get(t, ring.zero) + v
            if any(v != 0 for v in acc.values()):
                killed = False
    record("eG_annihilates_singulars", killed, checked=len(sing))
    record("complement", u.eG == RingElem.one(ring, ctx, n) - u.eS)
    if n:
        E = RingElem.basis(ring, e_bar(ctx, n))
        record("criterion_e_times_ebar", u.eS * E == E)
    record("unique_solution", u.nullity == 0, unknowns=len(u.orbits))
    elapsed = time.perf_counter() - t0
    return {
        "q": u.q,
        "n": n,
        "coeff_ring": ring.name,
        "singular_count": len(sing),
        "checks": checks,
        "status": "pass" if all(c["status"] == "pass" for c in checks) else "fail",
        "timing": {"predicates_s": round(t_pred, 4), "total_s": round(elapsed, 4)},
    }
