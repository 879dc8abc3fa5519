"""Quadratic symbols and 2-torsion Brauer classes over Q and its completions.

Nonzero rationals only matter up to squares here, so every argument is first
reduced to its squarefree integer core; no floating point is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

import numpy as np
from sympy import factorint, isprime

Rational = Union[int, Fraction]
INF = "inf"


class BrauerError(ValueError):
    pass


def squarefree_part(x: Rational) -> int:
    """Squarefree integer in the square class of the nonzero rational ``x``."""
    x = Fraction(x)
    if x == 0:
        raise BrauerError("zero has no square class")
    n = x.numerator * x.denominator  # same class as num/den
    sign = -1 if n < 0 else 1
    core = 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            core *= p
    return sign * core


def valuation(n: int, p: int) -> int:
    if n == 0:
        raise BrauerError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion."""
    if p <= 2 or not isprime(p):
        raise BrauerError(f"{p} is not an odd prime")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# ---------------------------------------------------------------------------
# places and Hilbert symbols


def check_place(v) -> None:
    if v == INF:
        return
    if not isinstance(v, int) or not isprime(v):
        raise BrauerError(f"bad place {v!r}")


def hilbert_symbol(a: Rational, b: Rational, v) -> int:
    """Norm-residue symbol (a, b)_v: +1 iff a x^2 + b y^2 = z^2 is nontrivially solvable over Q_v."""
    check_place(v)
    if a == 0 or b == 0:
        raise BrauerError("Hilbert symbol of zero")
    a, b = squarefree_part(a), squarefree_part(b)
    if v == INF:
        return -1 if (a < 0 and b < 0) else 1
    p = v
    alpha, beta = valuation(a, p), valuation(b, p)
    u, w = a // p**alpha, b // p**beta
    if p != 2:
        s = (-1) ** (alpha * beta * ((p - 1) // 2))
        return s * legendre(u, p) ** beta * legendre(w, p) ** alpha
    return (-1) ** ((_eps(u) * _eps(w) + alpha * _omega(w) + beta * _omega(u)) % 2)


def _eps(u: int) -> int:
    # u odd: 0 if u = 1 mod 4
    return ((u % 8 - 1) // 2) % 2


def _omega(u: int) -> int:
    # u odd: 0 if u = +-1 mod 8
    r = u % 8
    return ((r * r - 1) // 8) % 2


def hilbert_symbol_by_search(a: int, b: int, v) -> int:
    """(a, b)_v decided by searching a x^2 + b y^2 = z^2 modulo p^k.

    Independent of the closed formulas: a residue solution lifts to Q_p by
    Hensel when some partial derivative has valuation e with 2e + 1 <= k, and
    every primitive p-adic solution reduces to such a residue solution once
    k >= 2(v(2) + 1) + 1.  Slow for large p; meant as a cross-check.
    """
    check_place(v)
    a, b = squarefree_part(a), squarefree_part(b)
    if v == INF:
        return -1 if (a < 0 and b < 0) else 1
    p = v
    emax = (1 if p == 2 else 0) + (1 if (a * b) % p == 0 else 0)
    k = 2 * emax + 1
    q = p**k
    xs = np.arange(q, dtype=np.int64)
    sq = xs * xs % q

    def val(arr):
        # p-adic valuation of residues mod q, capped at k
        arr = arr % q
        out = np.full(arr.shape, k, dtype=np.int64)
        for j in range(k - 1, -1, -1):
            out[arr % p**(j + 1) != 0] = j
        return out

    no_root = 10 * k
    best_z = np.full(q, no_root, dtype=np.int64)
    np.minimum.at(best_z, sq, val(2 * xs))
    vx, vy = val(2 * a * xs), val(2 * b * xs)
    zmin = best_z[(a * sq[:, None] + b * sq[None, :]) % q]
    e = np.minimum(np.minimum(vx[:, None], vy[None, :]), zmin)
    return 1 if bool(np.any((zmin < no_root) & (2 * e + 1 <= k))) else -1


def support(a: int, b: int) -> list:
    """Places where (a, b) can ramify: 2, infinity and primes dividing a b."""
    primes = set(factorint(abs(squarefree_part(a) * squarefree_part(b)))) | {2}
    return sorted(primes) + [INF]


# ---------------------------------------------------------------------------
# fields, symbols, classes


@dataclass(frozen=True)
class FieldLabel:
    kind: str  # 'Q', 'Qp', 'R', 'quadratic'
    p: int | None = None
    D: int | None = None

    def __post_init__(self):
        if self.kind == "Qp":
            check_place(self.p)
            if self.p == INF:
                raise BrauerError("use FieldLabel.R() for the real place")
        elif self.kind == "quadratic":
            if self.D is None or self.D == 1 or squarefree_part(self.D) != self.D:
                raise BrauerError(f"quadratic field needs squarefree D != 1, got {self.D}")
        elif self.kind not in ("Q", "R"):
            raise BrauerError(f"unknown field kind {self.kind}")

    @classmethod
    def Q(cls):
        return cls("Q")

    @classmethod
    def R(cls):
        return cls("R")

    @classmethod
    def Qp(cls, p: int):
        return cls("Qp", p=p)

    @classmethod
    def quadratic(cls, D: int):
        return cls("quadratic", D=D)

    def __str__(self):
        return {"Q": "Q", "R": "R", "Qp": f"Q_{self.p}",
                "quadratic": f"Q(sqrt({self.D}))"}[self.kind]

    def places(self, a: int, b: int) -> list:
        if self.kind == "Q":
            return support(a, b)
        if self.kind == "Qp":
            return [self.p]
        if self.kind == "R":
            return [INF]
        raise BrauerError("no local invariants are computed over quadratic fields")


@dataclass(frozen=True)
class QuatSymbol:
    a: int
    b: int
    field: FieldLabel = field(default_factory=FieldLabel.Q)

    def __post_init__(self):
        for x in (self.a, self.b):
            if x == 0 or squarefree_part(x) != x:
                raise BrauerError(f"symbol arguments must be squarefree and nonzero, got {x}")

    def __str__(self):
        return f"({self.a},{self.b})"


def symbol(a: Rational, b: Rational, fld: FieldLabel | None = None) -> QuatSymbol:
    return QuatSymbol(squarefree_part(a), squarefree_part(b), fld or FieldLabel.Q())


@dataclass(frozen=True)
class BrauerClass2:
    """A formal sum of quaternion symbols with its local invariants (0 or 1 meaning 1/2)."""

    field: FieldLabel
    symbols: tuple[QuatSymbol, ...]
    invariants: dict = field(compare=False, hash=False)

    def __eq__(self, other):
        if not isinstance(other, BrauerClass2):
            return NotImplemented
        if self.field != other.field:
            raise BrauerError("classes over different fields")
        return self.invariants == other.invariants

    __hash__ = None

    @property
    def is_zero(self) -> bool:
        return not self.invariants

    def ramified_places(self) -> list:
        return list(self.invariants)

    def __add__(self, other: "BrauerClass2") -> "BrauerClass2":
        return brauer_class(self.symbols + other.symbols, self.field)

    def to_json(self) -> dict:
        return {
            "field": str(self.field),
            "symbols": [[s.a, s.b] for s in self.symbols],
            "invariants": {str(v): 1 for v in self.invariants},
        }


def brauer_class(symbols: Iterable[QuatSymbol | tuple], fld: FieldLabel | None = None) -> BrauerClass2:
    syms = []
    for s in symbols:
        if not isinstance(s, QuatSymbol):
            s = symbol(*s, fld)
        syms.append(s)
    fields = {s.field for s in syms} | ({fld} if fld else set())
    if len(fields) > 1:
        raise BrauerError("symbols over mixed fields")
    F = fields.pop() if fields else FieldLabel.Q()
    inv: dict = {}
    for s in syms:
        for v in F.places(s.a, s.b):
            if hilbert_symbol(s.a, s.b, v) == -1:
                inv[v] = inv.get(v, 0) ^ 1
    inv = {v: 1 for v in _sort_places(inv) if inv[v]}
    if F.kind == "Q" and len(inv) % 2:
        raise AssertionError("product formula violated")
    return BrauerClass2(F, tuple(syms), inv)


def class_over_Q(symbols) -> BrauerClass2:
    return brauer_class(symbols, FieldLabel.Q())


def _sort_places(places):
    return sorted(places, key=lambda v: (v == INF, 0 if v == INF else v))


def witt_obstruction(a: Rational, b: Rational, fld: FieldLabel | None = None) -> BrauerClass2:
    """Obstruction to embedding Q(sqrt a, sqrt b) in a quaternion extension: (-1,a)+(-1,b)+(a,b)."""
    return brauer_class([symbol(-1, a, fld), symbol(-1, b, fld), symbol(a, b, fld)], fld)


# ---------------------------------------------------------------------------
# quadratic fields: one-way triviality with declared squares


def _is_declared_square(x: int, D: int | None) -> bool:
    core = squarefree_part(x)
    return core == 1 or (D is not None and core == D)


def symbol_trivial_given_squares(s: QuatSymbol) -> bool:
    """True when an argument is a square in the field; False means undecided."""
    D = s.field.D if s.field.kind == "quadratic" else None
    return _is_declared_square(s.a, D) or _is_declared_square(s.b, D)


def sum_trivial_given_squares(symbols: Iterable[QuatSymbol]) -> bool:
    """Conservative test that a sum of symbols vanishes.

    Symbols sharing their second argument are merged by multiplying first
    arguments; the sum is declared trivial if every merged symbol is.
    """
    symbols = list(symbols)
    fields = {s.field for s in symbols}
    if len(fields) != 1:
        raise BrauerError("symbols over mixed fields")
    F = fields.pop()
    merged: dict[int, int] = {}
    for s in symbols:
        a, b = s.a, s.b
        if b not in merged and a in merged:
            a, b = b, a
        merged[b] = squarefree_part(merged.get(b, 1) * a)
    return all(symbol_trivial_given_squares(QuatSymbol(a, b, F)) for b, a in merged.items())
