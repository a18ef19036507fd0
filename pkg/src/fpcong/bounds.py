"""Machine checks of the counting inequalities tying classes to statistics.

Each check produces a BoundReport.  Inequalities stated with an explicit
or absent constant are *hard assertions* (verdict holds/violated, and a
violation is a red run); inequalities that only hold up to an
unspecified constant are *report-only*: the lhs/rhs ratio is recorded
and never judged.  Power-law thresholds like |A|^(3/2) are evaluated in
floating point with an exactness guard -- near-ties are settled by
integer comparison of the squared quantities.

Quantities (for a scalar set A with grid E = A x A, or a bare set E):

    T_ordered   classes of ordered triangles from E^3, repeats allowed
    N           ordered pairs of congruent such triangles (sum mult^2)
    T_unordered classes of unordered triangles on distinct vertices,
                collinear triangles included
    Snu2        sum of nu(lam)^2       SH  sum of H(lam)
    Delta       number of distinct distances of E
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .congruence import (
    MODE_ORDERED,
    MODE_UNORDERED,
    congruent_pair_count,
    count_classes,
)
from .field import FieldParams, Point
from .stats import (
    distinct_distances,
    hinge_histogram,
    nu_histogram,
    sum_hinges,
    sum_nu_squared,
)

HOLDS = "holds"
VIOLATED = "violated"
REPORT_ONLY = "report-only"

NEAR_TIE = 1e-9


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    lhs: int
    rhs: float
    ratio: Optional[float]
    verdict: str
    hard: bool  # violated + hard => the run fails
    context: dict = field(default_factory=dict)

    def flat(self) -> dict:
        conv = self.context.get("conventions", {})
        row = {
            "bound_id": self.bound_id,
            "p": self.context.get("p"),
            "set_spec": self.context.get("set_spec"),
            "seed": self.context.get("seed"),
            "mode": conv.get("mode"),
            "distinctness": conv.get("distinctness"),
            "diagonal": conv.get("diagonal"),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "verdict": self.verdict,
        }
        notes = self.context.get("notes")
        row["notes"] = notes if notes else ""
        return row


@dataclass(frozen=True)
class Symbols:
    """The aggregate quantities for one set, computed once and shared."""

    p: int
    n_points: int
    n_scalars: Optional[int]
    rho: float
    t_ordered: int
    n_pairs: int
    t_unordered: int
    t_unordered_nondegenerate: int
    sum_nu_sq: int
    sum_hinges: int
    n_distances: int


def grid_points(A: Iterable[int], fp: FieldParams) -> list[Point]:
    vals = sorted({a % fp.p for a in A})
    return [(a, b) for a in vals for b in vals]


def point_symbols(
    E: Iterable[Point], fp: FieldParams, n_scalars: Optional[int] = None, workers: int = 1
) -> Symbols:
    pts = sorted({(x % fp.p, y % fp.p) for x, y in E})
    nu = nu_histogram(pts, fp)
    hinges = hinge_histogram(pts, fp)
    delta = distinct_distances(pts, fp)
    ordered = count_classes(pts, 2, MODE_ORDERED, False, fp, workers=workers)
    unordered = count_classes(pts, 2, MODE_UNORDERED, True, fp, workers=workers)
    return Symbols(
        p=fp.p,
        n_points=len(pts),
        n_scalars=n_scalars,
        rho=len(pts) / fp.p**2,
        t_ordered=ordered.total_classes,
        n_pairs=congruent_pair_count(ordered),
        t_unordered=unordered.total_classes,
        t_unordered_nondegenerate=unordered.nondegenerate_classes,
        sum_nu_sq=sum_nu_squared(nu),
        sum_hinges=sum_hinges(hinges),
        n_distances=len(delta),
    )


def grid_symbols(A: Iterable[int], fp: FieldParams, workers: int = 1) -> Symbols:
    vals = sorted({a % fp.p for a in A})
    return point_symbols(grid_points(vals, fp), fp, n_scalars=len(vals), workers=workers)


# ---------------------------------------------------------------------------
# comparison helpers
# ---------------------------------------------------------------------------

def _meets_power(lhs: int, base: int, num: int, den: int) -> bool:
    """lhs >= base^(num/den), exact integer arithmetic on near-ties."""
    rhs = float(base) ** (num / den)
    if abs(lhs - rhs) > NEAR_TIE * max(abs(rhs), 1.0):
        return lhs >= rhs
    return lhs**den >= base**num


def _ratio(lhs, rhs) -> Optional[float]:
    if rhs == 0:
        return None
    return float(Fraction(lhs) / Fraction(rhs))


def _base_context(fp, set_spec, seed, mode, distinctness, diagonal, **extra) -> dict:
    ctx = {
        "p": fp.p,
        "set_spec": set_spec,
        "seed": seed,
        "conventions": {"mode": mode, "distinctness": distinctness, "diagonal": diagonal},
    }
    ctx.update(extra)
    return ctx


def _in_hypothesis(n_scalars: int, p: int) -> bool:
    # |A| <= p^(2/3), settled exactly
    return n_scalars**3 <= p**2


# ---------------------------------------------------------------------------
# the checks
# ---------------------------------------------------------------------------

def verify_cauchy_schwarz_chain(
    A: Iterable[int],
    fp: FieldParams,
    set_spec: str = "",
    seed: Optional[int] = None,
    workers: int = 1,
    sym: Optional[Symbols] = None,
) -> list[BoundReport]:
    """The ordered-triangle chain: T >= |A|^12 / N, N vs |E|.Snu2, T vs |A|^3.5.

    The first inequality is an algebraic identity of the multiplicity
    table and is asserted exactly (T * N >= |A|^12 in integers).  The
    other two steps hide constants, so only their ratios are reported.
    """
    vals = sorted({a % fp.p for a in A})
    if not vals:
        raise ValueError("cannot verify an empty set")
    if sym is None:
        sym = grid_symbols(vals, fp, workers=workers)
    na, e = len(vals), sym.n_points
    hypo = _in_hypothesis(na, fp.p)
    notes = "" if hypo else "out-of-hypothesis: |A| > p^(2/3)"

    def ctx(**extra):
        return _base_context(
            fp, set_spec, seed, MODE_ORDERED, "repeats-allowed", "included",
            in_hypothesis=hypo, notes=notes, n_scalars=na, **extra,
        )

    reports = []
    cs_rhs = float(Fraction(na**12, sym.n_pairs))
    holds = sym.t_ordered * sym.n_pairs >= na**12
    reports.append(
        BoundReport(
            bound_id="cauchy_schwarz_class_bound",
            lhs=sym.t_ordered,
            rhs=cs_rhs,
            ratio=float(Fraction(sym.t_ordered * sym.n_pairs, na**12)),
            verdict=HOLDS if holds else VIOLATED,
            hard=True,
            context=ctx(counterexample=None if holds else {"A": vals, "T": sym.t_ordered, "N": sym.n_pairs}),
        )
    )
    pair_rhs = e * sym.sum_nu_sq
    reports.append(
        BoundReport(
            bound_id="pair_count_vs_point_energy",
            lhs=sym.n_pairs,
            rhs=pair_rhs,
            ratio=_ratio(sym.n_pairs, pair_rhs),
            verdict=REPORT_ONLY,
            hard=False,
            context=ctx(),
        )
    )
    pow72 = float(na) ** 3.5
    reports.append(
        BoundReport(
            bound_id="class_count_vs_pow72",
            lhs=sym.t_ordered,
            rhs=pow72,
            ratio=_ratio(sym.t_ordered, pow72),
            verdict=REPORT_ONLY,
            hard=False,
            context=ctx(),
        )
    )
    return reports


def verify_hinge_lemma(
    E: Iterable[Point],
    fp: FieldParams,
    set_spec: str = "",
    seed: Optional[int] = None,
) -> BoundReport:
    """Ratio of Snu2 against (|E|/4).SH + |E|^3 (constant unspecified)."""
    pts = sorted({(x % fp.p, y % fp.p) for x, y in E})
    m = len(pts)
    snu2 = sum_nu_squared(nu_histogram(pts, fp))
    sh = sum_hinges(hinge_histogram(pts, fp))
    rhs = Fraction(m * sh, 4) + m**3
    return BoundReport(
        bound_id="nu_energy_vs_hinges",
        lhs=snu2,
        rhs=float(rhs),
        ratio=_ratio(snu2, rhs),
        verdict=REPORT_ONLY,
        hard=False,
        context=_base_context(fp, set_spec, seed, MODE_ORDERED, "repeats-allowed", "included", n_points=m),
    )


def verify_petridis(
    A: Iterable[int],
    fp: FieldParams,
    set_spec: str = "",
    seed: Optional[int] = None,
    sym: Optional[Symbols] = None,
) -> list[BoundReport]:
    """Hinge-sum ratio vs |A|^4.5, and |Delta| >= min(p, |A|^1.5).

    The distance bound is stated constant-free, so it is asserted
    exactly -- but a violation is recorded as an experimental finding
    (flagged in summaries), not a failed run: on structured sets the
    outcome *is* the data point.
    """
    vals = sorted({a % fp.p for a in A})
    if not vals:
        raise ValueError("cannot verify an empty set")
    if sym is None:
        sym = grid_symbols(vals, fp)
    na = len(vals)
    hypo = _in_hypothesis(na, fp.p)
    base_notes = "" if hypo else "out-of-hypothesis: |A| > p^(2/3)"

    pow92 = float(na) ** 4.5
    hinge_report = BoundReport(
        bound_id="hinge_sum_vs_pow92",
        lhs=sym.sum_hinges,
        rhs=pow92,
        ratio=_ratio(sym.sum_hinges, pow92),
        verdict=REPORT_ONLY,
        hard=False,
        context=_base_context(
            fp, set_spec, seed, MODE_ORDERED, "repeats-allowed", "included",
            in_hypothesis=hypo, notes=base_notes, n_scalars=na,
        ),
    )

    # min(p, |A|^1.5): pick the branch exactly via p^2 <= |A|^3
    if fp.p**2 <= na**3:
        rhs = float(fp.p)
        holds = sym.n_distances >= fp.p
    else:
        rhs = float(na) ** 1.5
        holds = _meets_power(sym.n_distances, na, 3, 2)
    notes = base_notes
    if not holds:
        finding = f"distance-count finding: |Delta|={sym.n_distances} < min(p, |A|^1.5)={rhs}"
        notes = f"{base_notes}; {finding}" if base_notes else finding
    dist_report = BoundReport(
        bound_id="min_distinct_distances",
        lhs=sym.n_distances,
        rhs=rhs,
        ratio=_ratio(sym.n_distances, rhs),
        verdict=HOLDS if holds else VIOLATED,
        hard=False,
        context=_base_context(
            fp, set_spec, seed, MODE_UNORDERED, "distinct", "excluded",
            in_hypothesis=hypo, notes=notes, n_scalars=na,
        ),
    )
    return [hinge_report, dist_report]


def verify_dezeeuw(
    A: Iterable[int],
    fp: FieldParams,
    set_spec: str = "",
    seed: Optional[int] = None,
    workers: int = 1,
    sym: Optional[Symbols] = None,
) -> BoundReport:
    """Exact assertion 6 * T_unordered >= (|A|^2 - 2) * |Delta|.

    Unordered triangles on distinct vertices, collinear triangles
    included.  Vacuous when the grid has fewer than three points.
    """
    vals = sorted({a % fp.p for a in A})
    if sym is None:
        sym = grid_symbols(vals, fp, workers=workers)
    na = len(vals)
    rhs_num = (na**2 - 2) * sym.n_distances
    rhs = rhs_num / 6
    vacuous = na**2 < 3
    holds = 6 * sym.t_unordered >= rhs_num
    notes = "vacuous: fewer than 3 grid points" if vacuous else ""
    return BoundReport(
        bound_id="dezeeuw_lower_bound",
        lhs=sym.t_unordered,
        rhs=rhs,
        ratio=_ratio(sym.t_unordered, Fraction(rhs_num, 6)) if rhs_num > 0 else None,
        verdict=HOLDS if holds else VIOLATED,
        hard=True,
        context=_base_context(
            fp, set_spec, seed, MODE_UNORDERED, "distinct", "excluded",
            vacuous=vacuous, notes=notes, n_scalars=na,
            counterexample=None if holds else {
                "A": vals, "T_unordered": sym.t_unordered, "Delta": sym.n_distances,
            },
        ),
    )


def verify_covert_recovery(
    E: Iterable[Point],
    fp: FieldParams,
    set_spec: str = "",
    seed: Optional[int] = None,
    workers: int = 1,
    sym: Optional[Symbols] = None,
) -> list[BoundReport]:
    """The same base-counting chain on a bare point set E.

    Asserts 6 * T_unordered(E) >= (|E| - 2) * |Delta(E)| exactly, and
    when E is dense enough (|E| >= p^(3/2), i.e. rho >= p^(-1/2))
    additionally reports |Delta(E)| against p - 1.
    """
    pts = sorted({(x % fp.p, y % fp.p) for x, y in E})
    if sym is None:
        sym = point_symbols(pts, fp, workers=workers)
    m = sym.n_points
    rhs_num = (m - 2) * sym.n_distances
    vacuous = m < 3
    holds = 6 * sym.t_unordered >= rhs_num
    reports = [
        BoundReport(
            bound_id="dense_triangle_chain",
            lhs=sym.t_unordered,
            rhs=rhs_num / 6,
            ratio=_ratio(sym.t_unordered, Fraction(rhs_num, 6)) if rhs_num > 0 else None,
            verdict=HOLDS if holds else VIOLATED,
            hard=True,
            context=_base_context(
                fp, set_spec, seed, MODE_UNORDERED, "distinct", "excluded",
                vacuous=vacuous, rho=sym.rho,
                notes="vacuous: fewer than 3 points" if vacuous else "",
                counterexample=None if holds else {
                    "E": pts, "T_unordered": sym.t_unordered, "Delta": sym.n_distances,
                },
            ),
        )
    ]
    if m**2 >= fp.p**3:  # rho >= p^(-1/2), settled exactly
        reports.append(
            BoundReport(
                bound_id="dense_distinct_distances",
                lhs=sym.n_distances,
                rhs=float(fp.p - 1),
                ratio=_ratio(sym.n_distances, fp.p - 1),
                verdict=REPORT_ONLY,
                hard=False,
                context=_base_context(
                    fp, set_spec, seed, MODE_UNORDERED, "distinct", "excluded", rho=sym.rho,
                ),
            )
        )
    return reports


def verify_all_for_scalars(
    A: Iterable[int],
    fp: FieldParams,
    set_spec: str = "",
    seed: Optional[int] = None,
    workers: int = 1,
) -> list[BoundReport]:
    """Every check that applies to a scalar set A (grid E = A x A)."""
    vals = sorted({a % fp.p for a in A})
    sym = grid_symbols(vals, fp, workers=workers)
    reports = verify_cauchy_schwarz_chain(vals, fp, set_spec, seed, workers, sym=sym)
    reports.append(verify_hinge_lemma(grid_points(vals, fp), fp, set_spec, seed))
    reports.extend(verify_petridis(vals, fp, set_spec, seed, sym=sym))
    reports.append(verify_dezeeuw(vals, fp, set_spec, seed, workers, sym=sym))
    return reports


def verify_all_for_points(
    E: Iterable[Point],
    fp: FieldParams,
    set_spec: str = "",
    seed: Optional[int] = None,
    workers: int = 1,
) -> list[BoundReport]:
    """Every check that applies to a bare point set E."""
    pts = sorted({(x % fp.p, y % fp.p) for x, y in E})
    sym = point_symbols(pts, fp, workers=workers)
    reports = [verify_hinge_lemma(pts, fp, set_spec, seed)]
    reports.extend(verify_covert_recovery(pts, fp, set_spec, seed, workers, sym=sym))
    return reports


def hard_violations(reports: Iterable[BoundReport]) -> list[BoundReport]:
    return [r for r in reports if r.hard and r.verdict == VIOLATED]


def findings(reports: Iterable[BoundReport]) -> list[BoundReport]:
    """Non-fatal violations worth flagging in summaries."""
    return [r for r in reports if not r.hard and r.verdict == VIOLATED]
