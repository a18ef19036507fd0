"""Exact arithmetic in F_p and the squared-distance form on F_p^2.

The ambient quadratic form is fixed here, and only here, as

    ||(x, y)|| = x^2 + y^2  (mod p).

Every distance, sphere and congruence statement in this package is
relative to that form.  It is *not* a metric: ||u|| = 0 has nonzero
solutions ("isotropic" vectors) exactly when p = 1 (mod 4).  To study a
different nondegenerate form, edit ``norm``/``dot`` below; nothing else
in the package hardcodes the coefficients.

Points and vectors are plain ``(x, y)`` tuples of canonical residues;
negative or oversized inputs are reduced at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

Point = tuple[int, int]

MAX_MODULUS = 2**31 - 1


def is_prime(n: int) -> bool:
    """Deterministic trial division; fine for desk-scale moduli."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldParams:
    """An odd prime modulus, validated at construction."""

    p: int

    def __post_init__(self) -> None:
        if not isinstance(self.p, int) or isinstance(self.p, bool):
            raise TypeError(f"modulus must be an int, got {type(self.p).__name__}")
        if self.p == 2:
            raise ValueError("p = 2 is unsupported: polarization needs odd characteristic")
        if self.p > MAX_MODULUS:
            raise ValueError(f"modulus {self.p} exceeds the supported range (<= 2^31 - 1)")
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not an odd prime")

    def reduce(self, a: int) -> int:
        return a % self.p

    def point(self, x: int, y: int) -> Point:
        return (x % self.p, y % self.p)


def norm(u: Point, fp: FieldParams) -> int:
    """Squared length x^2 + y^2 mod p.  The form of the whole package."""
    x, y = u
    return (x * x + y * y) % fp.p


def dot(u: Point, v: Point, fp: FieldParams) -> int:
    """The bilinear form x1*x2 + y1*y2 mod p polarizing ``norm``."""
    return (u[0] * v[0] + u[1] * v[1]) % fp.p


def add(a: Point, b: Point, fp: FieldParams) -> Point:
    return ((a[0] + b[0]) % fp.p, (a[1] + b[1]) % fp.p)


def sub(a: Point, b: Point, fp: FieldParams) -> Point:
    return ((a[0] - b[0]) % fp.p, (a[1] - b[1]) % fp.p)


def neg(a: Point, fp: FieldParams) -> Point:
    return ((-a[0]) % fp.p, (-a[1]) % fp.p)


def distance(a: Point, b: Point, fp: FieldParams) -> int:
    """||a - b||: symmetric and translation invariant, but not a metric."""
    return norm(sub(a, b, fp), fp)


def legendre_symbol(a: int, fp: FieldParams) -> int:
    """Quadratic character of a mod p via Euler's criterion: -1, 0 or +1."""
    r = pow(a % fp.p, (fp.p - 1) // 2, fp.p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


@lru_cache(maxsize=None)
def min_sqrt_table(p: int) -> dict[int, int]:
    """Map each quadratic residue s to the smallest y with y^2 = s (mod p)."""
    table: dict[int, int] = {}
    for y in range(p):
        s = (y * y) % p
        if s not in table:
            table[s] = y
    return table
