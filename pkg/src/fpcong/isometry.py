"""The isometry group of the plane over F_p: maps x -> Mx + z with M'M = I.

The orthogonal group O_2(F_p) is tiny -- 2(p - chi(-1)) matrices, where
chi is the quadratic character -- so it is enumerated once per modulus
and cached.  Congruence oracles elsewhere are plain scans over that
table.  Matrices are stored row-major as four residues (m11, m12, m21,
m22); reflections (det = -1) are always included.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Sequence

from .field import FieldParams, Point, add, min_sqrt_table, sub

Matrix = tuple[int, int, int, int]

IDENTITY: Matrix = (1, 0, 0, 1)


class Isometry(NamedTuple):
    rot: Matrix
    trans: Point


def identity_isometry() -> Isometry:
    return Isometry(IDENTITY, (0, 0))


def is_orthogonal(m: Matrix, fp: FieldParams) -> bool:
    """True iff M'M = I mod p."""
    p = fp.p
    m11, m12, m21, m22 = (e % p for e in m)
    return (
        (m11 * m11 + m21 * m21) % p == 1
        and (m12 * m12 + m22 * m22) % p == 1
        and (m11 * m12 + m21 * m22) % p == 0
    )


def det(m: Matrix, fp: FieldParams) -> int:
    return (m[0] * m[3] - m[1] * m[2]) % fp.p


@lru_cache(maxsize=None)
def _unit_circle(p: int) -> tuple[Point, ...]:
    """All (a, b) with a^2 + b^2 = 1, in ascending (a, b) order."""
    table = min_sqrt_table(p)
    sols = []
    for a in range(p):
        r = (1 - a * a) % p
        b = table.get(r)
        if b is None:
            continue
        sols.append((a, b))
        if b != (p - b) % p:
            sols.append((a, (p - b) % p))
    return tuple(sorted(sols))


@lru_cache(maxsize=None)
def _orthogonal_table(p: int) -> tuple[Matrix, ...]:
    circle = _unit_circle(p)
    rotations = [(a, (-b) % p, b, a) for a, b in circle]
    reflections = [(a, b, b, (-a) % p) for a, b in circle]
    return tuple(rotations + reflections)


def enumerate_orthogonal(fp: FieldParams) -> tuple[Matrix, ...]:
    """Every orthogonal 2x2 matrix over F_p, rotations then reflections.

    Rotations are (a, -b; b, a) and reflections (a, b; b, -a) for (a, b)
    on the unit circle a^2 + b^2 = 1, giving 2(p - chi(-1)) matrices in
    a fixed deterministic order.
    """
    return _orthogonal_table(fp.p)


def apply_matrix(m: Matrix, u: Point, p: int) -> Point:
    return ((m[0] * u[0] + m[1] * u[1]) % p, (m[2] * u[0] + m[3] * u[1]) % p)


def apply(g: Isometry, x: Point, fp: FieldParams) -> Point:
    """The action x -> rot.x + trans."""
    return add(apply_matrix(g.rot, x, fp.p), g.trans, fp)


def mat_mul(a: Matrix, b: Matrix, p: int) -> Matrix:
    return (
        (a[0] * b[0] + a[1] * b[2]) % p,
        (a[0] * b[1] + a[1] * b[3]) % p,
        (a[2] * b[0] + a[3] * b[2]) % p,
        (a[2] * b[1] + a[3] * b[3]) % p,
    )


def compose(g: Isometry, h: Isometry, fp: FieldParams) -> Isometry:
    """g after h: apply(compose(g, h), x) == apply(g, apply(h, x))."""
    rot = mat_mul(g.rot, h.rot, fp.p)
    trans = add(apply_matrix(g.rot, h.trans, fp.p), g.trans, fp)
    return Isometry(rot, trans)


def inverse(g: Isometry, fp: FieldParams) -> Isometry:
    # orthogonal, so the inverse rotation is the transpose
    rt: Matrix = (g.rot[0], g.rot[2], g.rot[1], g.rot[3])
    p = fp.p
    tx, ty = apply_matrix(rt, g.trans, p)
    return Isometry(rt, ((-tx) % p, (-ty) % p))


def solve_isometry(
    src: Sequence[Point],
    dst: Sequence[Point],
    fp: FieldParams,
    group: Sequence[Matrix] | None = None,
) -> list[Isometry]:
    """All isometries g with g(src[i]) = dst[i] for every i, in order.

    Scans the precomputed orthogonal group: M must map each difference
    src[i] - src[0] onto dst[i] - dst[0], and then the translation is
    forced to z = dst[0] - M.src[0].  An empty result means the tuples
    are not congruent in this vertex order.
    """
    if len(src) != len(dst):
        raise ValueError("vertex tuples must have equal length")
    if group is None:
        group = enumerate_orthogonal(fp)
    p = fp.p
    base_s, base_d = src[0], dst[0]
    diffs = [(sub(s, base_s, fp), sub(d, base_d, fp)) for s, d in zip(src[1:], dst[1:])]
    out = []
    for m in group:
        if all(apply_matrix(m, u, p) == v for u, v in diffs):
            z = sub(base_d, apply_matrix(m, base_s, p), fp)
            out.append(Isometry(m, z))
    return out
