"""Distance and hinge statistics of a point set E in F_p^2.

nu(lam)   -- ordered pairs of E x E at squared distance lam.  The
             diagonal (x = x, distance 0) is included by default; the
             exclude flag subtracts |E| from nu(0).
H(lam)    -- hinges: ordered triples (p, q1, q2) with both distances
             equal to lam, computed as sum over p of d_p(lam)^2 from
             per-point tallies (quadratic, never cubic).
Delta(E)  -- squared distances realized by *distinct* points.

Counts are exact integers.  Histograms use dense length-p arrays at
desk scale and fall back to keyed tallies for large moduli.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .field import FieldParams, Point

DIAGONAL_INCLUDED = "included"
DIAGONAL_EXCLUDED = "excluded"

DENSE_LIMIT = 10**4


@dataclass(frozen=True)
class DistanceHistogram:
    p: int
    total_points: int
    diagonal: str
    counts: dict = field(default_factory=dict)  # lam -> nu(lam), zero entries omitted

    def nu(self, lam: int) -> int:
        return self.counts.get(lam % self.p, 0)


@dataclass(frozen=True)
class HingeHistogram:
    p: int
    total_points: int
    counts: dict = field(default_factory=dict)  # lam -> H(lam), zero entries omitted

    def hinges(self, lam: int) -> int:
        return self.counts.get(lam % self.p, 0)


def _canonical_points(E: Iterable[Point], p: int) -> list[Point]:
    return sorted({(x % p, y % p) for x, y in E})


def _distance_matrix(pts: list[Point], p: int) -> np.ndarray:
    xs = np.array([pt[0] for pt in pts], dtype=np.int64)
    ys = np.array([pt[1] for pt in pts], dtype=np.int64)
    dx = (xs[:, None] - xs[None, :]) % p
    dy = (ys[:, None] - ys[None, :]) % p
    # square then reduce componentwise: keeps everything well inside int64
    return ((dx * dx) % p + (dy * dy) % p) % p


def nu_histogram(
    E: Iterable[Point], fp: FieldParams, include_diagonal: bool = True
) -> DistanceHistogram:
    """Exact pair counts nu(lam) over E x E.

    With the diagonal included the total is |E|^2; excluding it drops
    the |E| self-pairs from nu(0).
    """
    p = fp.p
    pts = _canonical_points(E, p)
    m = len(pts)
    if m == 0:
        return DistanceHistogram(p, 0, DIAGONAL_INCLUDED if include_diagonal else DIAGONAL_EXCLUDED)
    dmat = _distance_matrix(pts, p)
    if p <= DENSE_LIMIT:
        dense = np.bincount(dmat.ravel(), minlength=p)
        counts = {int(lam): int(c) for lam, c in enumerate(dense) if c}
    else:
        counts = dict(Counter(dmat.ravel().tolist()))
    if not include_diagonal:
        counts[0] -= m
        if counts[0] == 0:
            del counts[0]
    return DistanceHistogram(
        p=p,
        total_points=m,
        diagonal=DIAGONAL_INCLUDED if include_diagonal else DIAGONAL_EXCLUDED,
        counts=dict(sorted(counts.items())),
    )


def hinge_histogram(E: Iterable[Point], fp: FieldParams) -> HingeHistogram:
    """H(lam) = sum over p in E of (#q at distance lam from p)^2.

    Literal triple counting: q1 = q2 and q = p are allowed, so the
    hinge (p, p, p) contributes to H(0).
    """
    p = fp.p
    pts = _canonical_points(E, p)
    m = len(pts)
    if m == 0:
        return HingeHistogram(p, 0)
    dmat = _distance_matrix(pts, p)
    if p <= DENSE_LIMIT:
        acc = np.zeros(p, dtype=np.int64)
        for row in dmat:
            tallies = np.bincount(row, minlength=p)
            acc += tallies * tallies
        counts = {int(lam): int(c) for lam, c in enumerate(acc) if c}
    else:
        acc: Counter = Counter()
        for row in dmat:
            for lam, d in Counter(row.tolist()).items():
                acc[lam] += d * d
        counts = dict(acc)
    return HingeHistogram(p=p, total_points=m, counts=dict(sorted(counts.items())))


def distinct_distances(E: Iterable[Point], fp: FieldParams) -> set[int]:
    """Squared distances realized by pairs of distinct points of E."""
    p = fp.p
    pts = _canonical_points(E, p)
    if len(pts) < 2:
        return set()
    dmat = _distance_matrix(pts, p)
    off = ~np.eye(len(pts), dtype=bool)
    return set(np.unique(dmat[off]).tolist())


def sum_nu_squared(h: DistanceHistogram) -> int:
    return sum(c * c for c in h.counts.values())


def sum_hinges(h: HingeHistogram) -> int:
    return sum(h.counts.values())
