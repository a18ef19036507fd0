"""Congruence classes of segments and triangles in F_p^2.

Two simplices are congruent when some orthogonal matrix plus a
translation carries one vertex tuple onto the other -- in order for
ordered mode, up to a vertex permutation for unordered mode.  Three
kinds of classification key coexist:

* orbit-canonical key: translate the first vertex to the origin and
  take the lexicographic minimum of the image tuple over the whole
  orthogonal group (and over vertex permutations in unordered mode).
  Complete by construction; the slow reference oracle.
* gram key: (||u||, ||v||, <u,v>) for the edge vectors u = v2 - v1,
  v = v3 - v1.  A complete invariant for triangles whose edge vectors
  are linearly independent (odd characteristic); collinear and
  repeated-vertex triangles fall back to the orbit key, since side
  lengths do not separate those classes.
* segment key: (||u||, zero-flag).  Complete for all segments.

``count_classes`` streams every simplex drawn from a point set through
these keys.  Internally it aggregates by translation-normalized
difference vectors first (all translates of a shape share one key), so
the hot path is a numpy unique/bincount pass plus a short python loop
over the rare degenerate shapes.

Multiplicity tables are exact integers; totals beyond 2^63 are treated
as out of desk scale and rejected.
"""

from __future__ import annotations

import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Iterable, NamedTuple

import numpy as np

from .field import FieldParams, Point, dot, min_sqrt_table, norm, sub
from .isometry import apply_matrix, enumerate_orthogonal, solve_isometry

MODE_ORDERED = "ordered"
MODE_UNORDERED = "unordered"

GRAM = "gram"
ORBIT = "orbit"
DEGENERATE = "degenerate"

ORACLE_ENV = "FPC_ORACLE"
ORACLE_MAX_POINTS = 40
FAST_MAX_MODULUS = 10**4  # difference codes must fit comfortably in int64
COUNTER_LIMIT = 1 << 63

Key = tuple


class Simplex(NamedTuple):
    vertices: tuple[Point, ...]
    mode: str = MODE_ORDERED


def _check_simplex(s: Simplex) -> None:
    if len(s.vertices) not in (2, 3):
        raise ValueError(f"simplex must have 2 or 3 vertices, got {len(s.vertices)}")
    if s.mode not in (MODE_ORDERED, MODE_UNORDERED):
        raise ValueError(f"unknown mode {s.mode!r}")


# ---------------------------------------------------------------------------
# keys
# ---------------------------------------------------------------------------

def orbit_canonical_key(s: Simplex, fp: FieldParams) -> Key:
    """Reference key: lexicographic minimum of the normalized orbit.

    The first vertex is translated to the origin, every enumerated
    orthogonal matrix is applied (after every vertex permutation in
    unordered mode), and the smallest resulting coordinate tuple wins.
    Residues compare as integers 0..p-1, points as (x, y), tuples left
    to right.
    """
    _check_simplex(s)
    p = fp.p
    verts = [(x % p, y % p) for x, y in s.vertices]
    group = enumerate_orthogonal(fp)
    orders = permutations(verts) if s.mode == MODE_UNORDERED else [tuple(verts)]
    best = None
    for order in orders:
        bx, by = order[0]
        shifted = [((x - bx) % p, (y - by) % p) for x, y in order]
        for m in group:
            img = tuple(apply_matrix(m, v, p) for v in shifted)
            if best is None or img < best:
                best = img
    return (ORBIT, best)


def _gram_unordered_min(qu: int, qv: int, b: int, p: int) -> tuple[int, int, int]:
    # images of (||u||, ||v||, <u,v>) under the six vertex permutations
    c = (qu + qv - 2 * b) % p
    d = (qu - b) % p
    e = (qv - b) % p
    return min((qu, qv, b), (qv, qu, b), (qu, c, d), (c, qv, e), (c, qu, d), (qv, c, e))


def gram_key(s: Simplex, fp: FieldParams):
    """Gram-invariant key for a triangle, or ``"degenerate"``.

    Returns (||u||, ||v||, <u,v>) for the edge vectors u = v2 - v1 and
    v = v3 - v1 when they are linearly independent; unordered mode takes
    the minimum over the induced vertex-permutation action.  Dependent
    edge vectors (collinear or repeated vertices) yield "degenerate" and
    callers must fall back to the orbit key.
    """
    _check_simplex(s)
    if len(s.vertices) != 3:
        raise ValueError("gram_key applies to triangles only")
    v1, v2, v3 = s.vertices
    u = sub(v2, v1, fp)
    v = sub(v3, v1, fp)
    if (u[0] * v[1] - u[1] * v[0]) % fp.p == 0:
        return DEGENERATE
    qu, qv, b = norm(u, fp), norm(v, fp), dot(u, v, fp)
    if s.mode == MODE_ORDERED:
        return (GRAM, (qu, qv, b))
    return (GRAM, _gram_unordered_min(qu, qv, b, fp.p))


def segment_key(s: Simplex, fp: FieldParams) -> Key:
    """(||u||, zero-flag) -- a complete congruence invariant for segments.

    The orthogonal group is transitive on every nonzero sphere, and -I
    swaps the endpoints, so the key is the same in both modes.
    """
    _check_simplex(s)
    if len(s.vertices) != 2:
        raise ValueError("segment_key applies to segments only")
    u = sub(s.vertices[1], s.vertices[0], fp)
    return (GRAM, (norm(u, fp), 1 if u == (0, 0) else 0))


# --- fast orbit keys for degenerate shapes --------------------------------
#
# The orbit of a nonzero vector u under O_2 is the whole sphere of
# radius ||u|| (the nonzero isotropic vectors when ||u|| = 0), so the
# lexicographic minimum over the orbit of a *dependent* pair (u, t.u)
# is (w, t.w) at the minimal sphere point w.  This reproduces
# orbit_canonical_key in O(1) per shape; the test suite checks equality
# against the group scan.

@lru_cache(maxsize=None)
def _sphere_min(p: int, lam: int) -> Point:
    """Smallest (x, y) with x^2 + y^2 = lam; nonzero vectors only for lam = 0."""
    table = min_sqrt_table(p)
    if lam == 0:
        y = table.get(p - 1)
        if y is None:
            raise ValueError(f"no nonzero isotropic vectors mod {p}")
        return (1, y)
    for x in range(p):
        y = table.get((lam - x * x) % p)
        if y is not None:
            return (x, y)
    raise AssertionError("every residue is a sum of two squares mod an odd prime")


def _orbit_min_vector(p: int, u: Point) -> Point:
    if u == (0, 0):
        return (0, 0)
    return _sphere_min(p, (u[0] * u[0] + u[1] * u[1]) % p)


def _dependent_pair_min(p: int, u: Point, v: Point) -> tuple[Point, Point]:
    """Minimum of (Mu, Mv) over the orthogonal group, for dependent u, v."""
    if u == (0, 0):
        if v == (0, 0):
            return ((0, 0), (0, 0))
        return ((0, 0), _orbit_min_vector(p, v))
    w = _orbit_min_vector(p, u)
    if u[0] != 0:
        t = (v[0] * pow(u[0], p - 2, p)) % p
    else:
        t = (v[1] * pow(u[1], p - 2, p)) % p
    return (w, ((t * w[0]) % p, (t * w[1]) % p))


def _degenerate_triangle_key(p: int, u: Point, v: Point, mode: str) -> Key:
    origin = (0, 0)
    if mode == MODE_ORDERED:
        a, b = _dependent_pair_min(p, u, v)
        return (ORBIT, (origin, a, b))
    ux, uy = u
    vx, vy = v
    pairs = (
        (u, v),
        (v, u),
        (((-ux) % p, (-uy) % p), ((vx - ux) % p, (vy - uy) % p)),
        (((vx - ux) % p, (vy - uy) % p), ((-ux) % p, (-uy) % p)),
        (((-vx) % p, (-vy) % p), ((ux - vx) % p, (uy - vy) % p)),
        (((ux - vx) % p, (uy - vy) % p), ((-vx) % p, (-vy) % p)),
    )
    a, b = min(_dependent_pair_min(p, pu, pv) for pu, pv in pairs)
    return (ORBIT, (origin, a, b))


def simplex_key(s: Simplex, fp: FieldParams, oracle: bool = False) -> Key:
    """Classification key: gram fast path with orbit fallback.

    ``oracle=True`` forces the group-scan orbit key for everything.
    """
    _check_simplex(s)
    if oracle:
        return orbit_canonical_key(s, fp)
    if len(s.vertices) == 2:
        return segment_key(s, fp)
    k = gram_key(s, fp)
    if k != DEGENERATE:
        return k
    v1, v2, v3 = s.vertices
    return _degenerate_triangle_key(fp.p, sub(v2, v1, fp), sub(v3, v1, fp), s.mode)


def are_congruent(s: Simplex, t: Simplex, fp: FieldParams) -> bool:
    """True iff some isometry maps s onto t under the simplex's mode."""
    _check_simplex(s)
    _check_simplex(t)
    if len(s.vertices) != len(t.vertices) or s.mode != t.mode:
        raise ValueError("cannot compare simplices of different shape or mode")
    group = enumerate_orthogonal(fp)
    if s.mode == MODE_ORDERED:
        return bool(solve_isometry(s.vertices, t.vertices, fp, group))
    return any(solve_isometry(s.vertices, perm, fp, group) for perm in permutations(t.vertices))


def key_is_degenerate(key: Key, p: int) -> bool:
    """Does this class consist of collinear / repeated-vertex triangles?"""
    kind, payload = key
    if kind == GRAM:
        return len(payload) == 2 and payload[1] == 1  # zero segment
    if len(payload) == 2:  # orbit segment key
        return payload[1] == (0, 0)
    _, a, b = payload
    return (a[0] * b[1] - a[1] * b[0]) % p == 0


# ---------------------------------------------------------------------------
# class counting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassCount:
    """Congruence classes of the k-simplices drawn from a point set.

    ``multiplicities`` maps each class key to the number of simplices it
    absorbed, under the stated (mode, distinct) convention.
    ``degenerate_classes`` counts the collinear / repeated-vertex
    classes, so both the inclusive and the nondegenerate class totals
    are reported.
    """

    p: int
    k: int
    mode: str
    distinct: bool
    n_points: int
    total_classes: int
    multiplicities: dict
    degenerate_classes: int

    @property
    def total_simplices(self) -> int:
        return sum(self.multiplicities.values())

    @property
    def nondegenerate_classes(self) -> int:
        return self.total_classes - self.degenerate_classes


def expected_simplex_count(m: int, k: int, mode: str, distinct: bool) -> int:
    if mode == MODE_ORDERED:
        return math.perm(m, k + 1) if distinct else m ** (k + 1)
    return math.comb(m, k + 1) if distinct else math.comb(m + k, k + 1)


def _mult_factors(k: int, mode: str) -> dict[int, int]:
    # stratum = number of distinct vertices; ordered tuples per unordered simplex
    if mode == MODE_ORDERED:
        return {1: 1, 2: 1, 3: 1}
    if k == 1:
        return {1: 1, 2: 2}
    return {1: 1, 2: 3, 3: 6}


def count_classes(
    E: Iterable[Point],
    k: int,
    mode: str,
    distinct: bool,
    fp: FieldParams,
    workers: int = 1,
    oracle: bool | None = None,
) -> ClassCount:
    """Classify every k-simplex drawn from E into congruence classes.

    Ordered mode streams tuples from E^(k+1) (repeats excluded when
    ``distinct``); unordered mode streams vertex subsets (multisets when
    repeats are allowed).  Input order is irrelevant: E is deduplicated
    and sorted first.  ``oracle`` forces the group-scan key path (also
    triggered by FPC_ORACLE=1), which is gated to |E| <= 40.
    """
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    if mode not in (MODE_ORDERED, MODE_UNORDERED):
        raise ValueError(f"unknown mode {mode!r}")
    if oracle is None:
        oracle = os.environ.get(ORACLE_ENV) == "1"
    p = fp.p
    pts = sorted({(x % p, y % p) for x, y in E})
    m = len(pts)

    if oracle:
        if m > ORACLE_MAX_POINTS:
            raise ValueError(f"oracle-only classification is gated to |E| <= {ORACLE_MAX_POINTS}")
        mults = _oracle_multiplicities(pts, k, mode, distinct, fp)
    else:
        if p > FAST_MAX_MODULUS:
            raise ValueError(f"fast classification supports p <= {FAST_MAX_MODULUS}")
        raw = _classify_fast(pts, k, mode, distinct, p, workers)
        factors = _mult_factors(k, mode)
        mults = {}
        for (stratum, key), w in raw.items():
            f = factors[stratum]
            if w % f:
                raise AssertionError(f"weight {w} not divisible by orbit factor {f}")
            mults[key] = mults.get(key, 0) + w // f

    total = sum(mults.values())
    expected = expected_simplex_count(m, k, mode, distinct)
    if total != expected:
        raise AssertionError(f"classified {total} simplices, expected {expected}")
    if expected >= COUNTER_LIMIT:
        raise ValueError("simplex count exceeds 64-bit desk scale")
    # Cauchy-Schwarz sanity on every table: (sum m_c)^2 <= classes * sum m_c^2
    if mults:
        sq = sum(v * v for v in mults.values())
        if total * total > len(mults) * sq:
            raise AssertionError("multiplicity table violates Cauchy-Schwarz")
    ordered_mults = dict(sorted(mults.items()))
    degenerate = sum(1 for key in ordered_mults if key_is_degenerate(key, p))
    return ClassCount(
        p=p,
        k=k,
        mode=mode,
        distinct=distinct,
        n_points=m,
        total_classes=len(ordered_mults),
        multiplicities=ordered_mults,
        degenerate_classes=degenerate,
    )


def congruent_pair_count(cc: ClassCount) -> int:
    """Number of ordered pairs of congruent simplices: sum of multiplicity^2.

    Only meaningful for the ordered-with-repeats convention (the count
    the Cauchy-Schwarz argument divides by), so anything else is
    rejected.
    """
    if cc.mode != MODE_ORDERED or cc.distinct:
        raise ValueError("pair count requires ordered counting with repeats allowed")
    return sum(v * v for v in cc.multiplicities.values())


# --- oracle path -----------------------------------------------------------

def _oracle_multiplicities(pts, k, mode, distinct, fp):
    if mode == MODE_ORDERED:
        stream = permutations(pts, k + 1) if distinct else product(pts, repeat=k + 1)
    else:
        stream = combinations(pts, k + 1) if distinct else combinations_with_replacement(pts, k + 1)
    out: Counter = Counter()
    for verts in stream:
        out[orbit_canonical_key(Simplex(tuple(verts), mode), fp)] += 1
    return dict(out)


# --- fast path -------------------------------------------------------------

def _chunk_ranges(m: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, m)) if m else 1
    step = -(-m // workers)
    return [(lo, min(lo + step, m)) for lo in range(0, m, step)] or [(0, 0)]


def _classify_fast(pts, k, mode, distinct, p, workers):
    m = len(pts)
    if m == 0 or (distinct and m < k + 1):
        return {}
    chunks = _chunk_ranges(m, workers)
    args = [(tuple(pts), p, k, mode, distinct, lo, hi) for lo, hi in chunks]
    if len(args) == 1:
        parts = [_classify_chunk(args[0])]
    else:
        with ProcessPoolExecutor(max_workers=len(args)) as pool:
            parts = list(pool.map(_classify_chunk, args))
    merged: Counter = Counter()
    for part in parts:
        merged.update(part)
    return dict(merged)


def _classify_chunk(args):
    """Key the simplices whose first vertex lies in one base-point slice.

    Returns a map (stratum, key) -> ordered-tuple weight; merging these
    maps by addition is associative and commutative, so results are
    independent of the chunking.
    """
    pts, p, k, mode, distinct, lo, hi = args
    xs = np.array([pt[0] for pt in pts], dtype=np.int64)
    ys = np.array([pt[1] for pt in pts], dtype=np.int64)
    if k == 1:
        dx = (xs[None, :] - xs[lo:hi, None]) % p
        dy = (ys[None, :] - ys[lo:hi, None]) % p
        codes = (dx * p + dy).ravel()
        uniq, cnt = np.unique(codes, return_counts=True)
        return _classify_segment_codes(uniq, cnt.astype(np.int64), p, mode, distinct)

    p2 = p * p
    # batch base points so each batch holds at most ~4M pair codes
    batch = max(1, (4_000_000 // max(1, len(pts) ** 2)))
    merged: Counter = Counter()
    for start in range(lo, hi, batch):
        stop = min(start + batch, hi)
        dx = (xs[None, :] - xs[start:stop, None]) % p
        dy = (ys[None, :] - ys[start:stop, None]) % p
        ucodes = dx * p + dy  # (batch, m)
        pair = ucodes[:, :, None] * p2 + ucodes[:, None, :]
        uniq, cnt = np.unique(pair.ravel(), return_counts=True)
        merged.update(
            _classify_pair_codes(uniq, cnt.astype(np.int64), p, mode, distinct)
        )
    return dict(merged)


def _classify_segment_codes(codes, weights, p, mode, distinct):
    if distinct:
        keep = codes != 0
        codes, weights = codes[keep], weights[keep]
    if codes.size == 0:
        return {}
    x = codes // p
    y = codes % p
    q = (x * x + y * y) % p
    zero = codes == 0
    gcodes = q * 2 + zero
    uq, inv = np.unique(gcodes, return_inverse=True)
    sums = np.zeros(len(uq), dtype=np.int64)
    np.add.at(sums, inv, weights)
    out = {}
    for code, w in zip(uq.tolist(), sums.tolist()):
        lam, z = code // 2, code % 2
        stratum = 1 if z else 2
        out[(stratum, (GRAM, (lam, z)))] = w
    return out


def _classify_pair_codes(codes, weights, p, mode, distinct):
    p2 = p * p
    u = codes // p2
    v = codes % p2
    if distinct:
        keep = (u != 0) & (v != 0) & (u != v)
        codes, weights, u, v = codes[keep], weights[keep], u[keep], v[keep]
    if codes.size == 0:
        return {}
    ux, uy = u // p, u % p
    vx, vy = v // p, v % p
    cross = (ux * vy - uy * vx) % p
    indep = cross != 0
    out: dict = {}

    if np.any(indep):
        iux, iuy, ivx, ivy = ux[indep], uy[indep], vx[indep], vy[indep]
        qu = (iux * iux + iuy * iuy) % p
        qv = (ivx * ivx + ivy * ivy) % p
        b = (iux * ivx + iuy * ivy) % p
        if mode == MODE_ORDERED:
            g = (qu * p + qv) * p + b
        else:
            c = (qu + qv - 2 * b) % p
            d = (qu - b) % p
            e = (qv - b) % p
            g = np.minimum.reduce(
                [
                    (qu * p + qv) * p + b,
                    (qv * p + qu) * p + b,
                    (qu * p + c) * p + d,
                    (c * p + qv) * p + e,
                    (c * p + qu) * p + d,
                    (qv * p + c) * p + e,
                ]
            )
        uq, inv = np.unique(g, return_inverse=True)
        sums = np.zeros(len(uq), dtype=np.int64)
        np.add.at(sums, inv, weights[indep])
        for code, w in zip(uq.tolist(), sums.tolist()):
            q1, rest = code // p2, code % p2
            key = (GRAM, (q1, rest // p, rest % p))
            out[(3, key)] = out.get((3, key), 0) + w

    dep_idx = np.nonzero(~indep)[0]
    if dep_idx.size:
        dux, duy = ux[dep_idx].tolist(), uy[dep_idx].tolist()
        dvx, dvy = vx[dep_idx].tolist(), vy[dep_idx].tolist()
        dw = weights[dep_idx].tolist()
        for i in range(len(dw)):
            uu = (dux[i], duy[i])
            vv = (dvx[i], dvy[i])
            if uu == (0, 0) and vv == (0, 0):
                stratum = 1
            elif uu == (0, 0) or vv == (0, 0) or uu == vv:
                stratum = 2
            else:
                stratum = 3
            key = _degenerate_triangle_key(p, uu, vv, mode)
            sk = (stratum, key)
            out[sk] = out.get(sk, 0) + dw[i]
    return out
