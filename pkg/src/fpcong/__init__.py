"""Exact congruence-class geometry over prime fields F_p.

Counts congruence classes of segments and triangles in subsets of the
plane F_p^2, computes distance/hinge statistics, and machine-checks the
counting inequalities that relate them.  All arithmetic is exact.
"""

__version__ = "0.1.0"

from .field import FieldParams, Point, distance, legendre_symbol
from .isometry import (
    Isometry,
    apply,
    compose,
    enumerate_orthogonal,
    identity_isometry,
    inverse,
    is_orthogonal,
    solve_isometry,
)
from .congruence import (
    MODE_ORDERED,
    MODE_UNORDERED,
    ClassCount,
    Simplex,
    are_congruent,
    congruent_pair_count,
    count_classes,
    gram_key,
    orbit_canonical_key,
    segment_key,
)
from .stats import (
    DistanceHistogram,
    HingeHistogram,
    distinct_distances,
    hinge_histogram,
    nu_histogram,
    sum_hinges,
    sum_nu_squared,
)

__all__ = [
    "FieldParams",
    "Point",
    "distance",
    "legendre_symbol",
    "Isometry",
    "apply",
    "compose",
    "enumerate_orthogonal",
    "identity_isometry",
    "inverse",
    "is_orthogonal",
    "solve_isometry",
    "MODE_ORDERED",
    "MODE_UNORDERED",
    "ClassCount",
    "Simplex",
    "are_congruent",
    "congruent_pair_count",
    "count_classes",
    "gram_key",
    "orbit_canonical_key",
    "segment_key",
    "DistanceHistogram",
    "HingeHistogram",
    "distinct_distances",
    "hinge_histogram",
    "nu_histogram",
    "sum_hinges",
    "sum_nu_squared",
]
