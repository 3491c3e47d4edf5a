"""Exact coefficient arithmetic.

Two kinds of numbers appear in the package:

* elements of the finite field ``F_q`` (``q = p**e <= 9``), which are the
  entries of matrices.  An element is stored as an integer *code*
  ``sum(c_i * p**i)`` where ``c_i`` are the coefficients of its polynomial
  representative modulo a fixed irreducible polynomial;
* scalars of the coefficient ring ``K`` of a semigroup ring, either exact
  rationals (:class:`fractions.Fraction`) or residues modulo a prime ``l``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd

from .errors import CtxMismatch, DivisionByZero, GenrepError, NotInvertible

# Built-in moduli, low-to-high coefficients including the leading 1.
MODULI = {
    4: (2, 2, (1, 1, 1)),  # x^2 + x + 1
    8: (2, 3, (1, 1, 0, 1)),  # x^3 + x + 1
    9: (3, 2, (1, 0, 1)),  # x^2 + 1
}
SUPPORTED_Q = (2, 3, 4, 5, 7, 8, 9)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_is_irreducible(p: int, modulus: tuple[int, ...]) -> bool:
    """Exhaustive check, valid for degree <= 3 (no roots <=> irreducible)."""
    deg = len(modulus) - 1
    if deg == 1:
        return True
    if deg > 3:
        raise GenrepError("irreducibility check only implemented for degree <= 3")
    for x in range(p):
        if sum(c * x**i for i, c in enumerate(modulus)) % p == 0:
            return False
    return True


class FieldCtx:
    """The finite field ``F_p[x]/(modulus)`` with precomputed tables."""

    def __init__(self, p: int, e: int = 1, modulus: tuple[int, ...] | None = None):
        if not is_prime(p):
            raise GenrepError(f"{p} is not prime")
        if e < 1:
            raise GenrepError("extension degree must be >= 1")
        if modulus is None:
            modulus = (0, 1) if e == 1 else MODULI[p**e][2]
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise GenrepError("modulus must be monic of degree e")
        if not _poly_is_irreducible(p, modulus):
            raise GenrepError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.e = e
        self.modulus = modulus
        self.q = p**e
        q = self.q
        digits = [self._digits(a) for a in range(q)]
        self.add_table = tuple(
            tuple(self._code([(x + y) % p for x, y in zip(digits[a], digits[b])])
                  for b in range(q))
            for a in range(q))
        self.mul_table = tuple(
            tuple(self._code(self._polymulmod(digits[a], digits[b])) for b in range(q))
            for a in range(q))
        self.neg_table = tuple(self._code([(-x) % p for x in digits[a]]) for a in range(q))
        inv = [None] * q
        for a in range(1, q):
            for b in range(1, q):
                if self.mul_table[a][b] == 1:
                    inv[a] = b
                    break
        self.inv_table = tuple(inv)
        self.generator = self._find_generator()

    def _digits(self, code: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(code % self.p)
            code //= self.p
        return out

    def _code(self, digits) -> int:
        return sum(int(d) * self.p**i for i, d in enumerate(digits))

    def _polymulmod(self, a, b):
        p, e, mod = self.p, self.e, self.modulus
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
        for d in range(len(prod) - 1, e - 1, -1):
            c = prod[d]
            if c:
                for i in range(e + 1):
                    prod[d - e + i] = (prod[d - e + i] - c * mod[i]) % p
        return prod[:e]

    def _find_generator(self) -> int:
        for g in range(1, self.q):
            x, order = g, 1
            while x != 1:
                x = self.mul_table[x][g]
                order += 1
            if order == self.q - 1:
                return g
        raise GenrepError("no multiplicative generator")  # unreachable for a field

    # element-level API -------------------------------------------------
    def __call__(self, value) -> "FieldElem":
        if isinstance(value, FieldElem):
            if value.ctx is not self:
                raise CtxMismatch("field element from another context")
            return value
        if isinstance(value, (tuple, list)):
            if len(value) != self.e:
                raise GenrepError("coefficient sequence has wrong length")
            return FieldElem(self, self._code([c % self.p for c in value]))
        return FieldElem(self, self._code(self._digits(int(value) % self.p)))

    def elem(self, code: int) -> "FieldElem":
        return FieldElem(self, code)

    def elements(self) -> list["FieldElem"]:
        return [FieldElem(self, c) for c in range(self.q)]

    def format_code(self, code: int) -> str:
        """Base-p digit string, most significant coefficient first."""
        return "".join(str(d) for d in reversed(self._digits(code)))

    def parse_code(self, s: str) -> int:
        if len(s) != self.e or any(not ch.isdigit() or int(ch) >= self.p for ch in s):
            raise GenrepError(f"bad F_{self.q} element string {s!r}")
        return self._code(int(ch) for ch in reversed(s))

    def __repr__(self):
        return f"FieldCtx(q={self.q})"


@lru_cache(maxsize=None)
def field_ctx(q: int) -> FieldCtx:
    """Shared context for ``F_q``; only the supported built-in sizes."""
    if q not in SUPPORTED_Q:
        raise GenrepError(f"q={q} not supported; choose one of {SUPPORTED_Q}")
    if q in MODULI:
        p, e, mod = MODULI[q]
        return FieldCtx(p, e, mod)
    return FieldCtx(q, 1)


class FieldElem:
    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int):
        self.ctx = ctx
        self.code = code

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(self.ctx._digits(self.code))

    def _other(self, other) -> int:
        if isinstance(other, FieldElem):
            if other.ctx is not self.ctx:
                raise CtxMismatch("field elements from different contexts")
            return other.code
        if isinstance(other, int):
            return self.ctx(other).code
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx, self.ctx.add_table[self.code][b])

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg_table[self.code])

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx, self.ctx.add_table[self.code][self.ctx.neg_table[b]])

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FieldElem(self.ctx, self.ctx.mul_table[self.code][b])

    __rmul__ = __mul__

    def inv(self) -> "FieldElem":
        if self.code == 0:
            raise DivisionByZero("inverse of 0 in F_q")
        return FieldElem(self.ctx, self.ctx.inv_table[self.code])

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self * FieldElem(self.ctx, b).inv()

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.ctx is other.ctx and self.code == other.code
        if isinstance(other, int):
            return self.code == self.ctx(other).code
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.q, self.code))

    def __str__(self):
        return self.ctx.format_code(self.code)

    def __repr__(self):
        return f"F{self.ctx.q}({self})"


# ---------------------------------------------------------------------------
# coefficient rings


class Residue:
    """Element of the prime field ``F_l``."""

    __slots__ = ("value", "ell")

    def __init__(self, value: int, ell: int):
        self.value = value % ell
        self.ell = ell

    def _other(self, other):
        if isinstance(other, Residue):
            if other.ell != self.ell:
                raise CtxMismatch(f"F_{self.ell} and F_{other.ell} residues mixed")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            raise CtxMismatch("rational mixed with prime-field residue")
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Residue(self.value + b, self.ell)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Residue(self.value - b, self.ell)

    def __rsub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Residue(b - self.value, self.ell)

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return Residue(self.value * b, self.ell)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.ell)

    def inv(self) -> "Residue":
        if self.value == 0:
            raise NotInvertible(f"0 is not invertible in F_{self.ell}")
        return Residue(pow(self.value, -1, self.ell), self.ell)

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return self * Residue(b, self.ell).inv()

    def __eq__(self, other):
        if isinstance(other, Residue):
            return self.ell == other.ell and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.ell
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.ell))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} (mod {self.ell})"


class RationalField:
    """``K = Q`` with :class:`Fraction` values (always in lowest terms)."""

    name = "rat"
    characteristic = 0

    zero = Fraction(0)
    one = Fraction(1)

    def __call__(self, value) -> Fraction:
        if isinstance(value, Residue):
            raise CtxMismatch("residue passed to the rational field")
        if isinstance(value, str):
            return self.parse(value)
        return Fraction(value)

    def owns(self, value) -> bool:
        return isinstance(value, (Fraction, int)) and not isinstance(value, bool)

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise NotInvertible("1/0 in Q")
        return 1 / Fraction(a)

    def is_unit_int(self, n: int) -> bool:
        return n != 0

    # integer fast path: values -> (numerators, common denominator)
    def lift(self, values):
        den = 1
        for v in values:
            d = v.denominator
            den = den * d // gcd(den, d)
        return [v.numerator * (den // v.denominator) for v in values], den

    def unlift(self, n: int, den: int) -> Fraction:
        return Fraction(n, den)

    def fmt(self, a) -> str:
        a = Fraction(a)
        return f"{a.numerator}/{a.denominator}"

    def parse(self, s: str) -> Fraction:
        return Fraction(s.strip())

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rat")

    def __repr__(self):
        return "QQ"


class PrimeField:
    """``K = F_l`` for a prime ``l``."""

    def __init__(self, ell: int):
        if not is_prime(ell):
            raise GenrepError(f"{ell} is not prime")
        self.ell = ell
        self.name = f"gf:{ell}"
        self.characteristic = ell
        self.zero = Residue(0, ell)
        self.one = Residue(1, ell)

    def __call__(self, value) -> Residue:
        if isinstance(value, Residue):
            if value.ell != self.ell:
                raise CtxMismatch(f"residue mod {value.ell} passed to F_{self.ell}")
            return value
        if isinstance(value, str):
            return self.parse(value)
        if isinstance(value, Fraction):
            if value.denominator % self.ell == 0:
                raise NotInvertible(f"{value} has no image in F_{self.ell}")
            return Residue(value.numerator, self.ell) * Residue(value.denominator, self.ell).inv()
        return Residue(int(value), self.ell)

    def owns(self, value) -> bool:
        return isinstance(value, Residue) and value.ell == self.ell

    def inv(self, a: Residue) -> Residue:
        return self(a).inv()

    def is_unit_int(self, n: int) -> bool:
        return n % self.ell != 0

    def lift(self, values):
        return [v.value for v in values], 1

    def unlift(self, n: int, den: int) -> Residue:
        return Residue(n, self.ell)

    def fmt(self, a) -> str:
        return str(self(a).value)

    def parse(self, s: str) -> Residue:
        s = s.strip()
        if "/" in s:
            return self(Fraction(s))
        return Residue(int(s), self.ell)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.ell == self.ell

    def __hash__(self):
        return hash(("gf", self.ell))

    def __repr__(self):
        return f"GF({self.ell})"


QQ = RationalField()


def coeff_ring(text: str = "rat"):
    """Parse a coefficient-ring flag: ``rat`` or ``gf:L``."""
    if text in ("rat", "Q", "QQ"):
        return QQ
    if text.startswith("gf:"):
        return PrimeField(int(text[3:]))
    raise GenrepError(f"unknown coefficient ring {text!r}")


def check_field_axioms(ctx: FieldCtx) -> bool:
    """Exhaustive associativity/distributivity/inverse check (q <= 9)."""
    q, add, mul = ctx.q, ctx.add_table, ctx.mul_table
    for a, b, c in product(range(q), repeat=3):
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            return False
        if add[add[a][b]][c] != add[a][add[b][c]]:
            return False
        if mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]:
            return False
    for a in range(q):
        if add[a][ctx.neg_table[a]] != 0:
            return False
        if a and (mul[a][ctx.inv_table[a]] != 1 or mul[ctx.inv_table[a]][a] != 1):
            return False
    return True
