"""Command-line front end: set construction, experiments, CSV/JSON emission.

Set grammar (--set):
    interval:<a>..<b>     residues a, a+1, ..., b-1 reduced mod p
    random:<n>[:<seed>]   n distinct residues from the portable LCG
    explicit:v1,v2,...    literal values, reduced and deduplicated
    file:<path>           one integer per line, or "x,y" pairs (points)

A scalar set A is expanded to the grid E = A x A wherever a point set is
needed; --points <file> supplies E directly.

Random draws come from a fixed 64-bit linear congruential generator
(Knuth's MMIX constants, see README) so that runs reproduce bit-for-bit
on any platform.  Every artifact starts with a reproducibility header of
"# key=value" lines covering the semantic configuration; worker count
and output destination are deliberately excluded, since they never
change results.

Exit codes: 0 success, 1 usage error, 2 infeasible request,
3 exact-assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from . import __version__
from .bounds import (
    BoundReport,
    findings,
    grid_symbols,
    hard_violations,
    verify_all_for_points,
    verify_all_for_scalars,
)
from .congruence import MODE_ORDERED, MODE_UNORDERED, count_classes
from .field import FieldParams, Point
from .isometry import det, enumerate_orthogonal
from .stats import (
    distinct_distances,
    hinge_histogram,
    nu_histogram,
    sum_hinges,
    sum_nu_squared,
)


class UsageError(Exception):
    """Malformed request; exits 1."""


class InfeasibleError(Exception):
    """Well-formed but unsatisfiable request; exits 2."""


# ---------------------------------------------------------------------------
# portable RNG
# ---------------------------------------------------------------------------

_MASK64 = (1 << 64) - 1
_MULT = 6364136223846793005
_INC = 1442695040888963407


class Lcg64:
    """Knuth's MMIX linear congruential generator on 64-bit state.

    state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64),
    seeded with one warm-up step.  ``below(n)`` uses rejection sampling,
    so sequences are identical on every platform.
    """

    def __init__(self, seed: int):
        self.state = ((seed & _MASK64) * _MULT + _INC) & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state * _MULT + _INC) & _MASK64
        return self.state

    def below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = ((1 << 64) // n) * n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def distinct(self, n: int, bound: int) -> list[int]:
        """n distinct integers in [0, bound), ascending."""
        if n > bound:
            raise InfeasibleError(f"cannot draw {n} distinct values below {bound}")
        seen: set[int] = set()
        while len(seen) < n:
            seen.add(self.below(bound))
        return sorted(seen)


def sample_scalars(n: int, fp: FieldParams, seed: int) -> list[int]:
    return Lcg64(seed).distinct(n, fp.p)


def sample_points(n: int, fp: FieldParams, seed: int) -> list[Point]:
    codes = Lcg64(seed).distinct(n, fp.p * fp.p)
    return [(c // fp.p, c % fp.p) for c in codes]


# ---------------------------------------------------------------------------
# set specs
# ---------------------------------------------------------------------------

SCALARS = "scalars"
POINTS = "points"


@dataclass(frozen=True)
class SetSpec:
    source: str
    kind: str  # scalars | points
    values: tuple  # sorted, deduplicated, reduced mod p


def parse_set_spec(spec: str, fp: FieldParams, seed: int = 0) -> SetSpec:
    """Resolve a set grammar string deterministically."""
    head, _, rest = spec.partition(":")
    p = fp.p
    if head == "interval":
        a, sep, b = rest.partition("..")
        if not sep:
            raise UsageError(f"interval spec needs <a>..<b>, got {spec!r}")
        try:
            lo, hi = int(a), int(b)
        except ValueError as exc:
            raise UsageError(f"bad interval bounds in {spec!r}") from exc
        if hi < lo:
            raise UsageError(f"empty interval in {spec!r}")
        vals = sorted({v % p for v in range(lo, hi)})
        return SetSpec(spec, SCALARS, tuple(vals))
    if head == "random":
        parts = rest.split(":") if rest else []
        if not parts or not parts[0]:
            raise UsageError(f"random spec needs a count, got {spec!r}")
        try:
            n = int(parts[0])
            use_seed = int(parts[1]) if len(parts) > 1 else seed
        except ValueError as exc:
            raise UsageError(f"bad random spec {spec!r}") from exc
        if n < 0:
            raise UsageError("random count must be nonnegative")
        if n > p:
            raise InfeasibleError(f"cannot draw {n} distinct residues mod {p}")
        return SetSpec(spec, SCALARS, tuple(sample_scalars(n, fp, use_seed)))
    if head == "explicit":
        if not rest:
            raise UsageError("explicit spec needs at least one value")
        try:
            vals = sorted({int(v) % p for v in rest.split(",")})
        except ValueError as exc:
            raise UsageError(f"bad explicit value in {spec!r}") from exc
        return SetSpec(spec, SCALARS, tuple(vals))
    if head == "file":
        return _parse_set_file(spec, rest, fp)
    raise UsageError(f"unknown set spec {spec!r}")


def _parse_set_file(spec: str, path: str, fp: FieldParams) -> SetSpec:
    if not path:
        raise UsageError("file spec needs a path")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as exc:
        raise UsageError(f"cannot read set file {path!r}: {exc}") from exc
    rows = [ln for ln in lines if ln and not ln.startswith("#")]
    if not rows:
        raise UsageError(f"set file {path!r} is empty")
    p = fp.p
    try:
        if any("," in ln for ln in rows):
            pts = sorted({(int(x) % p, int(y) % p) for x, y in (ln.split(",") for ln in rows)})
            return SetSpec(spec, POINTS, tuple(pts))
        vals = sorted({int(ln) % p for ln in rows})
        return SetSpec(spec, SCALARS, tuple(vals))
    except ValueError as exc:
        raise UsageError(f"bad entry in set file {path!r}") from exc


def resolve_point_set(args, fp: FieldParams) -> tuple[str, tuple[Point, ...], Optional[tuple[int, ...]]]:
    """(source string, E, A-or-None) from --set / --points."""
    if getattr(args, "points", None):
        spec = parse_set_spec(f"file:{args.points}", fp, args.seed)
        if spec.kind != POINTS:
            raise UsageError("--points file must contain x,y pairs")
        return spec.source, spec.values, None
    if not getattr(args, "set", None):
        raise UsageError("one of --set or --points is required")
    spec = parse_set_spec(args.set, fp, args.seed)
    if spec.kind == POINTS:
        return spec.source, spec.values, None
    grid = tuple((a, b) for a in spec.values for b in spec.values)
    return spec.source, grid, spec.values


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _header_lines(meta: dict) -> list[str]:
    return [f"# {k}={v}" for k, v in meta.items()]


def write_csv(out: io.TextIOBase, meta: dict, fieldnames: list[str], rows: list[dict]) -> None:
    for line in _header_lines(meta):
        out.write(line + "\n")
    writer = csv.DictWriter(out, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def write_json(out: io.TextIOBase, meta: dict, rows: list[dict]) -> None:
    json.dump({"meta": meta, "rows": rows}, out, indent=2, sort_keys=True)
    out.write("\n")


def emit(args, meta: dict, fieldnames: list[str], rows: list[dict]) -> None:
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            _emit_to(fh, args.format, meta, fieldnames, rows)
    else:
        _emit_to(sys.stdout, args.format, meta, fieldnames, rows)


def _emit_to(fh, fmt: str, meta: dict, fieldnames: list[str], rows: list[dict]) -> None:
    if fmt == "json":
        write_json(fh, meta, rows)
    else:
        write_csv(fh, meta, fieldnames, rows)


def _base_meta(command: str, **cfg) -> dict:
    meta = {"fpcong_version": __version__, "command": command}
    meta.update({k: v for k, v in cfg.items() if v is not None})
    return meta


def format_key(key: tuple) -> str:
    kind, payload = key
    if kind == "gram":
        return "gram:" + ",".join(str(v) for v in payload)
    return "orbit:" + ";".join(f"{x} {y}" for x, y in payload)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_group(args) -> int:
    fp = FieldParams(args.p)
    group = enumerate_orthogonal(fp)
    rows = [
        {"m11": m[0], "m12": m[1], "m21": m[2], "m22": m[3], "det": det(m, fp)}
        for m in group
    ]
    meta = _base_meta("group", p=args.p, order=len(group))
    emit(args, meta, ["m11", "m12", "m21", "m22", "det"], rows)
    return 0


def cmd_stats(args) -> int:
    fp = FieldParams(args.p)
    source, pts, _ = resolve_point_set(args, fp)
    nu = nu_histogram(pts, fp, include_diagonal=args.include_diagonal)
    hinges = hinge_histogram(pts, fp)
    delta = distinct_distances(pts, fp)
    lams = sorted(set(nu.counts) | set(hinges.counts))
    rows = [
        {"lambda": lam, "nu": nu.counts.get(lam, 0), "hinge": hinges.counts.get(lam, 0)}
        for lam in lams
    ]
    meta = _base_meta(
        "stats",
        p=args.p,
        set=source,
        seed=args.seed,
        nu_diagonal=nu.diagonal,
        delta_diagonal="excluded",
        n_points=len(pts),
        sum_nu_sq=sum_nu_squared(nu),
        sum_hinges=sum_hinges(hinges),
        distinct_distances=len(delta),
    )
    emit(args, meta, ["lambda", "nu", "hinge"], rows)
    return 0


def cmd_classes(args) -> int:
    fp = FieldParams(args.p)
    source, pts, _ = resolve_point_set(args, fp)
    distinct = args.mode == MODE_UNORDERED if args.distinct is None else args.distinct
    cc = count_classes(pts, args.k, args.mode, distinct, fp, workers=args.workers)
    rows = [
        {"key": format_key(key), "multiplicity": mult}
        for key, mult in cc.multiplicities.items()
    ]
    meta = _base_meta(
        "classes",
        p=args.p,
        set=source,
        seed=args.seed,
        k=args.k,
        mode=args.mode,
        distinct=distinct,
        n_points=cc.n_points,
        total_classes=cc.total_classes,
        nondegenerate_classes=cc.nondegenerate_classes,
        total_simplices=cc.total_simplices,
    )
    emit(args, meta, ["key", "multiplicity"], rows)
    return 0


def cmd_verify(args) -> int:
    fp = FieldParams(args.p)
    source, pts, scalars = resolve_point_set(args, fp)
    if scalars is not None:
        reports = verify_all_for_scalars(scalars, fp, set_spec=source, seed=args.seed, workers=args.workers)
    else:
        reports = verify_all_for_points(pts, fp, set_spec=source, seed=args.seed, workers=args.workers)
    rows = [r.flat() for r in reports]
    meta = _base_meta(
        "verify",
        p=args.p,
        set=source,
        seed=args.seed,
        conventions="nu-diagonal=included;delta-diagonal=excluded;"
        "ordered-classes=repeats-allowed;unordered-classes=distinct-inclusive",
    )
    fieldnames = [
        "bound_id", "p", "set_spec", "seed", "mode", "distinctness",
        "diagonal", "lhs", "rhs", "ratio", "verdict", "notes",
    ]
    emit(args, meta, fieldnames, rows)
    for r in findings(reports):
        print(f"finding: {r.bound_id}: {r.context.get('notes')}", file=sys.stderr)
    bad = hard_violations(reports)
    if bad:
        for r in bad:
            print(
                f"assertion failed: {r.bound_id} p={fp.p} set={source} "
                f"lhs={r.lhs} rhs={r.rhs} counterexample={r.context.get('counterexample')}",
                file=sys.stderr,
            )
        return 3
    return 0


SWEEP_COLUMNS = [
    "p", "n", "seed", "distinct_distances", "classes_unordered", "classes_ordered",
    "sum_nu_sq", "sum_hinges", "N_pairs", "cs_lower", "dezeeuw_lower",
    "pow_7_2", "ratio_T_over_pow",
]


def sweep_trial(p: int, n: int, seed: int) -> dict:
    """One seeded random-grid trial; pure function of (p, n, seed)."""
    fp = FieldParams(p)
    vals = sample_scalars(n, fp, seed)
    sym = grid_symbols(vals, fp)
    cs_lower = float(n**12) / sym.n_pairs
    dezeeuw_lower = (n**2 - 2) * sym.n_distances / 6
    pow72 = float(n) ** 3.5
    return {
        "p": p,
        "n": n,
        "seed": seed,
        "distinct_distances": sym.n_distances,
        "classes_unordered": sym.t_unordered,
        "classes_ordered": sym.t_ordered,
        "sum_nu_sq": sym.sum_nu_sq,
        "sum_hinges": sym.sum_hinges,
        "N_pairs": sym.n_pairs,
        "cs_lower": cs_lower,
        "dezeeuw_lower": dezeeuw_lower,
        "pow_7_2": pow72,
        "ratio_T_over_pow": sym.t_ordered / pow72,
    }


def _sweep_trial_args(args_tuple) -> dict:
    return sweep_trial(*args_tuple)


def sweep_rows(p: int, n: int, trials: int, seed: int, workers: int = 1) -> list[dict]:
    """Trial i uses seed + i; rows come back in trial order regardless of workers."""
    tasks = [(p, n, seed + i) for i in range(trials)]
    if workers <= 1 or len(tasks) <= 1:
        return [sweep_trial(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_sweep_trial_args, tasks))


def cmd_sweep(args) -> int:
    fp = FieldParams(args.p)
    if args.n > fp.p:
        raise InfeasibleError(f"cannot draw {args.n} distinct residues mod {fp.p}")
    rows = sweep_rows(args.p, args.n, args.trials, args.seed, args.workers)
    meta = _base_meta(
        "sweep",
        p=args.p,
        n=args.n,
        trials=args.trials,
        seed=args.seed,
        set=f"random:{args.n}",
        conventions="nu-diagonal=included;delta-diagonal=excluded;"
        "ordered-classes=repeats-allowed;unordered-classes=distinct-inclusive",
    )
    emit(args, meta, SWEEP_COLUMNS, rows)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(sub, points_input=False, classify=False):
    sub.add_argument("--p", type=int, required=True, help="odd prime modulus")
    sub.add_argument("--seed", type=int, default=0, help="seed for random set specs")
    sub.add_argument("--out", default="-", help="output path ('-' for stdout)")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    if points_input:
        sub.add_argument("--set", help="scalar set spec; expands to the grid A x A")
        sub.add_argument("--points", help="file of x,y pairs giving E directly")
    if classify:
        sub.add_argument("--workers", type=int, default=1, help="parallel workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpcong",
        description="Congruence-class counting and inequality checks over prime fields.",
    )
    parser.add_argument("--version", action="version", version=f"fpcong {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    g = subs.add_parser("group", help="dump the orthogonal group as CSV")
    _add_common(g)
    g.set_defaults(func=cmd_group)

    s = subs.add_parser("stats", help="distance / hinge histograms and summaries")
    _add_common(s, points_input=True)
    s.add_argument(
        "--include-diagonal",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="count self-pairs in nu(0) (default: include)",
    )
    s.set_defaults(func=cmd_stats)

    c = subs.add_parser("classes", help="congruence-class count and multiplicities")
    _add_common(c, points_input=True, classify=True)
    c.add_argument("--k", type=int, choices=[1, 2], default=2, help="1 = segments, 2 = triangles")
    c.add_argument("--mode", choices=[MODE_ORDERED, MODE_UNORDERED], default=MODE_UNORDERED)
    dgrp = c.add_mutually_exclusive_group()
    dgrp.add_argument("--distinct", dest="distinct", action="store_true", default=None,
                      help="require pairwise distinct vertices")
    dgrp.add_argument("--allow-repeats", dest="distinct", action="store_false",
                      help="admit repeated vertices")
    c.set_defaults(func=cmd_classes)

    v = subs.add_parser("verify", help="run every inequality check for one set")
    _add_common(v, points_input=True, classify=True)
    v.set_defaults(func=cmd_verify)

    w = subs.add_parser("sweep", help="seeded random-grid trials, one CSV row each")
    _add_common(w, classify=True)
    w.add_argument("--n", type=int, required=True, help="scalar set size per trial")
    w.add_argument("--trials", type=int, default=1)
    w.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
