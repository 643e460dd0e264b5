"""Contraction-class verdicts with witnesses and estimated moduli.

On finite spaces every verdict is exact: the space is fully enumerated, so a
passing check is a proof and a failing one carries a concrete witness.  On
sampled spaces a failure witness is still conclusive (it refutes a claim
quantified over the whole space), but passing checks are scope evidence only.

Sampled scopes additionally treat a modulus estimate that is not bounded away
from 1 as refuting evidence: a truncation of a genuinely large contraction
keeps delta(eps) <= 1 - eps/(1+eps) at each fixed eps, whereas the known
failure modes (ratio families approaching 1 at a fixed separation) push the
estimate arbitrarily close to 1.  The margin used is max(49/50, 1 - eps/4),
which excuses near-1 moduli at small eps (legitimate for large contractions)
by a factor-4 slack while flagging them at fixed separations.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from . import scan
from .map_catalog import SelfMap, apply
from .metric_core import (
    InputError,
    InternalConsistencyError,
    SampledSpace,
    format_scalar,
)

DEFAULT_EPS_GRID = tuple(Fraction(1, 2 ** k) for k in range(9, 0, -1)) + (
    Fraction(1), Fraction(2), Fraction(4))

NEAR_ONE_RATIO = Fraction(49, 50)   # sampled-scope "indistinguishable from 1"
EPS_MARGIN_DIVISOR = 4              # slack factor on the 1/(1+eps) decay shape


def scope_threshold(eps) -> Fraction:
    """Sampled-scope failure threshold for a modulus estimate at eps."""
    eps = Fraction(eps)
    return max(NEAR_ONE_RATIO, 1 - min(eps, Fraction(1)) / EPS_MARGIN_DIVISOR)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    conclusive: bool
    reason: str
    witness: dict = None

    def to_json(self) -> dict:
        doc = {"passed": self.passed, "conclusive": self.conclusive, "reason": self.reason}
        if self.witness is not None:
            doc["witness"] = {k: _fmt(v) for k, v in self.witness.items()}
        return doc


@dataclass(frozen=True)
class ModulusEntry:
    eps: object
    delta: object          # None when vacuous
    count: int
    witness: dict = None

    @property
    def vacuous(self) -> bool:
        return self.delta is None


@dataclass(frozen=True)
class ModulusTable:
    kind: str              # "pairwise" | "triple"
    entries: tuple

    def lookup_at_or_below(self, eps):
        """Last non-vacuous entry with grid eps <= the requested value.

        Moduli are non-increasing in eps, so stepping down to a smaller grid
        value is conservative: it can only make a decay bound harder to meet.
        """
        chosen = None
        for entry in self.entries:
            if entry.eps <= eps and not entry.vacuous:
                chosen = entry
        if chosen is None:
            raise InputError(
                f"modulus table has no usable entry at or below eps={format_scalar(Fraction(eps))}")
        return chosen

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "entries": [
                {
                    "eps": _fmt(e.eps),
                    "delta": None if e.vacuous else _fmt(e.delta),
                    "vacuous": e.vacuous,
                    "count": e.count,
                    **({"witness": {k: _fmt(v) for k, v in e.witness.items()}}
                       if e.witness else {}),
                }
                for e in self.entries
            ],
        }

    def csv_rows(self):
        for e in self.entries:
            yield {
                "kind": self.kind,
                "eps": _fmt(e.eps),
                "delta": "" if e.vacuous else _fmt(e.delta),
                "count": e.count,
            }


@dataclass(frozen=True)
class ContractionReport:
    scope: str              # "exact" | "sampled"
    n_points: int
    eps_grid: tuple
    pairwise_strict: Verdict
    large_contraction: Verdict
    pairwise_moduli: ModulusTable
    tpc_alpha: object
    tpc_alpha_witness: dict
    uniform_tpc: Verdict
    triple_strict: Verdict
    large_tpc: Verdict
    triple_moduli: ModulusTable
    pairs_enumerated: int
    triples_enumerated: int

    def to_json(self) -> dict:
        return {
            "enumeration_scope": self.scope,
            "n_points": self.n_points,
            "eps_grid": [_fmt(e) for e in self.eps_grid],
            "pairwise_strict": self.pairwise_strict.to_json(),
            "large_contraction": self.large_contraction.to_json(),
            "pairwise_moduli": self.pairwise_moduli.to_json(),
            "tpc_alpha": _fmt(self.tpc_alpha),
            "tpc_alpha_witness": {k: _fmt(v) for k, v in (self.tpc_alpha_witness or {}).items()},
            "uniform_tpc": self.uniform_tpc.to_json(),
            "triple_strict": self.triple_strict.to_json(),
            "large_tpc": self.large_tpc.to_json(),
            "triple_moduli": self.triple_moduli.to_json(),
            "pairs_enumerated": self.pairs_enumerated,
            "triples_enumerated": self.triples_enumerated,
        }

    def moduli_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["kind", "eps", "delta", "count"])
        writer.writeheader()
        for table in (self.pairwise_moduli, self.triple_moduli):
            for row in table.csv_rows():
                writer.writerow(row)
        return buf.getvalue()


def _fmt(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return [_fmt(v) for v in value]
    return value


# ---------------------------------------------------------------------------
# enumeration plumbing

def _subset_points(space, point_set):
    if point_set is None:
        return space.point_set()
    pts = list(point_set)
    if isinstance(space, SampledSpace):
        sample = set(space.point_set())
        out = []
        for p in pts:
            q = Fraction(p)
            if q not in sample:
                raise InputError(f"point {p!r} is not in the sampled point set")
            out.append(q)
        return tuple(sorted(set(out)))
    order = {}
    for p in pts:
        order[space.index(p)] = p
    return tuple(order[i] for i in sorted(order))


def _pair_analysis(space, mapping, point_set, eps_grid, workers=1):
    pts = _subset_points(space, point_set)
    if isinstance(space, SampledSpace):
        den = space.denominator
        nums = [int(p * den) for p in pts]
        images = [apply(mapping, p) for p in pts]
        return scan.line_pair_analysis(nums, den, pts, images, eps_grid, workers)
    nodes = [space.index(p) for p in pts]
    images = [space.index(apply(mapping, q)) for q in space.points]
    return scan.table_pair_analysis(space.dist_table, nodes, images, eps_grid,
                                    pts, space.exact, workers)


def _triple_analysis(space, mapping, point_set, eps_grid, workers=1):
    pts = _subset_points(space, point_set)
    if isinstance(space, SampledSpace):
        den = space.denominator
        nums = [int(p * den) for p in pts]
        images = [apply(mapping, p) for p in pts]
        return scan.line_triple_analysis(nums, den, pts, images, eps_grid, workers)
    nodes = [space.index(p) for p in pts]
    images = [space.index(apply(mapping, q)) for q in space.points]
    return scan.table_triple_analysis(space.dist_table, nodes, images, eps_grid,
                                      pts, space.exact, workers)


def _scope_of(space) -> str:
    return "sampled" if isinstance(space, SampledSpace) else "exact"


def _pair_witness(packed):
    if packed is None:
        return None
    (x, y), image_measure, measure = packed
    return {"x": x, "y": y, "distance": measure, "image_distance": image_measure,
            "ratio": _ratio(image_measure, measure)}


def _triple_witness(packed):
    if packed is None:
        return None
    (x, y, z), image_measure, measure = packed
    return {"x": x, "y": y, "z": z, "perimeter": measure,
            "image_perimeter": image_measure, "ratio": _ratio(image_measure, measure)}


def _ratio(num, den):
    if isinstance(num, Fraction) or isinstance(den, Fraction) or (
            isinstance(num, int) and isinstance(den, int)):
        return Fraction(num, den)
    return num / den


def _strict_witness(analysis):
    if analysis.strict_violation is None:
        return None
    points, measure, image_measure = analysis.strict_violation
    if len(points) == 2:
        return {"x": points[0], "y": points[1], "distance": measure,
                "image_distance": image_measure}
    return {"x": points[0], "y": points[1], "z": points[2], "perimeter": measure,
            "image_perimeter": image_measure}


def _modulus_table(analysis, witness_fn) -> ModulusTable:
    entries = []
    for eps, delta, wit, count in zip(analysis.eps, analysis.deltas,
                                      analysis.delta_witnesses, analysis.counts):
        entries.append(ModulusEntry(eps=eps, delta=delta, count=count,
                                    witness=witness_fn(wit)))
    return ModulusTable(kind=analysis.kind, entries=tuple(entries))


# ---------------------------------------------------------------------------
# verdict construction

def _strict_verdict(analysis, scope, what) -> Verdict:
    witness = _strict_witness(analysis)
    if witness is None:
        qualifier = "" if scope == "exact" else " on the enumerated scope"
        return Verdict(True, scope == "exact",
                       f"strict {what} decrease holds for all {analysis.total} "
                       f"enumerated items{qualifier}")
    return Verdict(False, True, f"{what} does not strictly decrease at the witness",
                   witness)


def _modulus_verdict(analysis, table, scope, strict: Verdict, what) -> Verdict:
    if not strict.passed:
        return Verdict(False, True,
                       f"strict {what} decrease fails, so no modulus below 1 exists",
                       strict.witness)
    if scope == "exact":
        bad = [e for e in table.entries if not e.vacuous and not e.delta < 1]
        if bad:  # unreachable once strictness holds on a fully enumerated space
            return Verdict(False, True,
                           f"delta({_fmt(bad[0].eps)}) = {_fmt(bad[0].delta)} is not below 1",
                           bad[0].witness)
        return Verdict(True, True, "all grid moduli are below 1 on the fully "
                                   "enumerated space")
    for e in table.entries:
        if e.vacuous:
            continue
        threshold = scope_threshold(e.eps)
        if e.delta >= threshold:
            return Verdict(
                False, False,
                f"delta({_fmt(e.eps)}) = {_fmt(e.delta)} is not bounded away from 1 "
                f"on the sampled scope (threshold {_fmt(threshold)})",
                e.witness)
    return Verdict(True, False, "grid moduli stay bounded away from 1 on the "
                                "sampled scope")


def _uniform_verdict(alpha, witness, scope) -> Verdict:
    if alpha is None:
        raise InputError("no triples enumerated")
    if not alpha < 1:
        return Verdict(False, True, f"perimeter ratio {_fmt(alpha)} reaches 1 at the witness",
                       witness)
    if scope == "exact":
        return Verdict(True, True,
                       f"perimeter ratio supremum {_fmt(alpha)} < 1 on the fully "
                       f"enumerated space")
    if alpha >= NEAR_ONE_RATIO:
        return Verdict(False, False,
                       f"perimeter ratio supremum {_fmt(alpha)} is not bounded away "
                       f"from 1 on the sampled scope (threshold {_fmt(NEAR_ONE_RATIO)})",
                       witness)
    return Verdict(True, False,
                   f"perimeter ratio supremum {_fmt(alpha)} stays bounded away from 1 "
                   f"on the sampled scope")


# ---------------------------------------------------------------------------
# public operations

def check_pairwise_strict(space, mapping: SelfMap, point_set=None, workers=1) -> Verdict:
    """Does every distinct pair move strictly closer under the map?"""
    analysis = _pair_analysis(space, mapping, point_set, DEFAULT_EPS_GRID, workers)
    return _strict_verdict(analysis, _scope_of(space), "distance")


def estimate_large_contraction_modulus(space, mapping: SelfMap, point_set=None,
                                       eps_grid=None, workers=1):
    """Pairwise modulus table delta(eps) plus the large-contraction verdict."""
    eps_grid = tuple(eps_grid) if eps_grid is not None else DEFAULT_EPS_GRID
    analysis = _pair_analysis(space, mapping, point_set, eps_grid, workers)
    scope = _scope_of(space)
    table = _modulus_table(analysis, _pair_witness)
    strict = _strict_verdict(analysis, scope, "distance")
    verdict = _modulus_verdict(analysis, table, scope, strict, "distance")
    return table, verdict


def estimate_tpc_alpha(space, mapping: SelfMap, point_set=None, workers=1):
    """Supremum of image-to-original perimeter ratios with attaining witness."""
    analysis = _triple_analysis(space, mapping, point_set, DEFAULT_EPS_GRID, workers)
    witness = _triple_witness(analysis.sup_witness)
    verdict = _uniform_verdict(analysis.sup_ratio, witness, _scope_of(space))
    return analysis.sup_ratio, witness, verdict


def estimate_large_tpc_modulus(space, mapping: SelfMap, point_set=None,
                               eps_grid=None, workers=1):
    """Triple modulus table delta(eps) plus the large perimeter-contraction verdict."""
    eps_grid = tuple(eps_grid) if eps_grid is not None else DEFAULT_EPS_GRID
    analysis = _triple_analysis(space, mapping, point_set, eps_grid, workers)
    scope = _scope_of(space)
    table = _modulus_table(analysis, _triple_witness)
    strict = _strict_verdict(analysis, scope, "perimeter")
    verdict = _modulus_verdict(analysis, table, scope, strict, "perimeter")
    return table, verdict


def full_report(space, mapping: SelfMap, point_set=None, eps_grid=None,
                workers=1) -> ContractionReport:
    """Run all classifiers on one enumeration pass and cross-check implications."""
    eps_grid = tuple(eps_grid) if eps_grid is not None else DEFAULT_EPS_GRID
    scope = _scope_of(space)
    pair = _pair_analysis(space, mapping, point_set, eps_grid, workers)
    triple = _triple_analysis(space, mapping, point_set, eps_grid, workers)

    pairwise_strict = _strict_verdict(pair, scope, "distance")
    pair_table = _modulus_table(pair, _pair_witness)
    large_contraction = _modulus_verdict(pair, pair_table, scope, pairwise_strict,
                                         "distance")

    triple_strict = _strict_verdict(triple, scope, "perimeter")
    triple_table = _modulus_table(triple, _triple_witness)
    large_tpc = _modulus_verdict(triple, triple_table, scope, triple_strict,
                                 "perimeter")
    alpha_witness = _triple_witness(triple.sup_witness)
    uniform_tpc = _uniform_verdict(triple.sup_ratio, alpha_witness, scope)

    if large_contraction.passed and not pairwise_strict.passed:
        raise InternalConsistencyError(
            "large-contraction verdict passed while the pairwise strict check failed")
    if large_tpc.passed and not triple_strict.passed:
        raise InternalConsistencyError(
            "large perimeter-contraction verdict passed while the strict triple check failed")
    if uniform_tpc.passed and not large_tpc.passed:
        raise InternalConsistencyError(
            "uniform perimeter verdict passed while the large perimeter verdict failed")

    return ContractionReport(
        scope=scope,
        n_points=len(_subset_points(space, point_set)),
        eps_grid=eps_grid,
        pairwise_strict=pairwise_strict,
        large_contraction=large_contraction,
        pairwise_moduli=pair_table,
        tpc_alpha=triple.sup_ratio,
        tpc_alpha_witness=alpha_witness,
        uniform_tpc=uniform_tpc,
        triple_strict=triple_strict,
        large_tpc=large_tpc,
        triple_moduli=triple_table,
        pairs_enumerated=pair.total,
        triples_enumerated=triple.total,
    )
