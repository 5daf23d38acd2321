"""Arithmetic in GF(q) for prime-power q.

Elements are plain ints in ``range(q)``.  In an extension field the int is the
base-``p`` digit string of the polynomial coefficients, constant term least
significant, so ``1`` is always the multiplicative identity and the
canonical element order is just integer order.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

from .exceptions import (
    DegreeZeroError,
    FieldOverflowError,
    NotPrimeError,
    ZeroInverseError,
)

__all__ = [
    "Field",
    "Poly",
    "field_new",
    "field_from_order",
    "is_prime",
    "prime_power",
    "poly_eval",
]

WORD_MAX = 2**63 - 1
_TABLE_LIMIT = 256


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every 64-bit input."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for sp in small:
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_power(q: int):
    """Return ``(p, e)`` with ``q == p**e`` and p prime, or None."""
    if q < 2:
        return None
    p = 2
    while p * p <= q and q % p:
        p += 1
    if q % p:
        p = q
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    return (p, e) if r == 1 else None


# --- polynomials over GF(p), used only while building extension fields ---

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmod(a, m, p):
    """Remainder of a modulo monic m, coefficient lists constant-first."""
    a = _trim(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * mc) % p
        a = _trim(a)
    return a


def _is_irreducible(f, p):
    e = len(f) - 1
    for deg in range(1, e // 2 + 1):
        for low in product(range(p), repeat=deg):
            if not _pmod(f, list(low) + [1], p):
                return False
    return True


def _smallest_irreducible(p, e):
    # lexicographic in (c0, c1, ..., c_{e-1}): c0 is the most significant key
    for coeffs in product(range(p), repeat=e):
        if coeffs[0] == 0:
            continue
        f = list(coeffs) + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError(f"no irreducible of degree {e} over GF({p})")


class Field:
    """The finite field GF(p**e).

    Instances are immutable.  Use :func:`field_new` to get the cached
    canonical instance for a given ``(p, e)``.
    """

    def __init__(self, p: int, e: int = 1):
        if e < 1:
            raise DegreeZeroError(f"extension degree must be >= 1, got {e}")
        if not is_prime(p):
            raise NotPrimeError(f"{p} is not prime")
        if p**e > WORD_MAX:
            raise FieldOverflowError(f"{p}^{e} does not fit in a machine word")
        self.p = p
        self.e = e
        self.q = p**e
        self.reduction_poly = () if e == 1 else _smallest_irreducible(p, e)
        self._tables = None
        if e > 1 and self.q <= _TABLE_LIMIT:
            self._build_tables()

    def __repr__(self):
        return f"Field(p={self.p}, e={self.e})"

    def __eq__(self, other):
        return isinstance(other, Field) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self):
        return hash((self.p, self.e))

    def __len__(self):
        return self.q

    def elements(self):
        return range(self.q)

    # digit view of extension elements
    def digits(self, a: int):
        out = []
        for _ in range(self.e):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        v = 0
        for c in reversed(list(digits)):
            v = v * self.p + c
        return v

    def _check(self, a):
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of GF({self.q})")

    def _build_tables(self):
        q = self.q
        add = [[self._add_slow(a, b) for b in range(q)] for a in range(q)]
        mul = [[self._mul_slow(a, b) for b in range(q)] for a in range(q)]
        neg = [self._neg_slow(a) for a in range(q)]
        inv = [0] * q
        for a in range(1, q):
            inv[a] = mul[a].index(1)
        self._tables = (add, mul, neg, inv)

    def _add_slow(self, a, b):
        p = self.p
        return self.from_digits([(x + y) % p for x, y in zip(self.digits(a), self.digits(b))])

    def _neg_slow(self, a):
        p = self.p
        return self.from_digits([(-x) % p for x in self.digits(a)])

    def _mul_slow(self, a, b):
        p = self.p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        r = _pmod(prod, self.reduction_poly, p)
        return self.from_digits(r + [0] * (self.e - len(r)))

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self._tables:
            return self._tables[0][a][b]
        return self._add_slow(a, b)

    def neg(self, a: int) -> int:
        if self.e == 1:
            return (-a) % self.p
        if self._tables:
            return self._tables[2][a]
        return self._neg_slow(a)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if self._tables:
            return self._tables[1][a][b]
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroInverseError("0 has no multiplicative inverse")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        if self._tables:
            return self._tables[3][a]
        # a^(q-2) by square-and-multiply
        result, base, k = 1, a, self.q - 2
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def arith(self, op: str, a: int, b: int = None) -> int:
        self._check(a)
        if op in ("add", "mul", "sub"):
            if b is None:
                raise TypeError(f"{op} needs two operands")
            self._check(b)
            return getattr(self, op)(a, b)
        if op in ("neg", "inv"):
            return getattr(self, op)(a)
        raise ValueError(f"unknown field operation {op!r}")

    def descriptor(self) -> dict:
        return {
            "p_char": self.p,
            "ext_degree": self.e,
            "reduction_poly": list(self.reduction_poly),
        }


@lru_cache(maxsize=None)
def field_new(p: int, e: int = 1) -> Field:
    return Field(p, e)


def field_from_order(q: int) -> Field:
    pe = prime_power(q)
    if pe is None:
        raise NotPrimeError(f"{q} is not a prime power")
    return field_new(*pe)


@dataclass(frozen=True)
class Poly:
    """Univariate polynomial, coefficients constant-term first, no trailing zeros."""

    coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_trim(self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_monic(self, degree: int = None) -> bool:
        if not self.coeffs or self.coeffs[-1] != 1:
            return False
        return degree is None or self.degree == degree


def poly_eval(field: Field, f, x: int) -> int:
    coeffs = f.coeffs if isinstance(f, Poly) else f
    acc = 0
    for c in reversed(coeffs):
        acc = field.add(field.mul(acc, x), c)
    return acc
