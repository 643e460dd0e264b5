"""Self-maps and the catalog of worked examples.

Maps are total and deterministic: table-backed on finite spaces,
formula-backed on sampled spaces.  Formula maps evaluate exactly on rational
inputs, and their images may fall off the sample grid; distances to off-grid
images stay computable because sampled spaces use the absolute-difference
metric.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .metric_core import (
    FiniteMetricSpace,
    InputError,
    SampledSpace,
    parse_scalar,
)

# default truncation parameters for the sampled catalog spaces
DEFAULT_UNIT_GRID_STEP = Fraction(1, 512)
DEFAULT_INTEGER_MAX = 256
DEFAULT_COMPOSITE_INDEX_MAX = 50

CATALOG_IDS = ("burton_logistic", "floor_half", "period2_counterexample", "composite")


@dataclass(frozen=True)
class SelfMap:
    """A total deterministic map from a space's points to itself."""

    space: object
    name: str
    table: tuple = None        # image label per point index (finite spaces)
    func: object = None        # point -> point (sampled spaces)

    def __post_init__(self):
        if (self.table is None) == (self.func is None):
            raise InputError("a self-map is either table-backed or formula-backed")
        if self.table is not None:
            if len(self.table) != self.space.size:
                raise InputError("map table must cover every point")
            index = self.space._index
            for img in self.table:
                if img not in index:
                    raise InputError(f"map image {img!r} is not a point of the space")

    def __call__(self, x):
        return apply(self, x)

    def to_json(self) -> dict:
        if self.table is None:
            raise InputError("only table-backed maps serialize to JSON")
        idx = self.space._index
        return {
            "space": self.space.to_json(),
            "map": [idx[img] for img in self.table],
            "name": self.name,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SelfMap":
        try:
            space = FiniteMetricSpace.from_json(doc["space"])
            images = doc["map"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed map document: {exc}") from exc
        if len(images) != space.size:
            raise InputError("map table must cover every point")
        try:
            table = tuple(space.points[int(i)] for i in images)
        except (IndexError, ValueError) as exc:
            raise InputError(f"map image index out of range: {exc}") from exc
        return cls(space=space, name=doc.get("name", "table_map"), table=table)


def apply(mapping: SelfMap, x):
    """Evaluate T(x)."""
    if mapping.table is not None:
        return mapping.table[mapping.space.index(x)]
    return mapping.func(x)


def iterate(mapping: SelfMap, x, k: int):
    """Evaluate T^k(x); k = 0 returns x unchanged."""
    if k < 0:
        raise InputError("iteration count must be nonnegative")
    for _ in range(k):
        x = apply(mapping, x)
    return x


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    space: object
    map: SelfMap
    expected: tuple = ()
    params: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# catalog spaces

def unit_interval_grid(step: Fraction, include_one: bool) -> tuple:
    step = Fraction(step)
    if step <= 0 or 1 % step != 0:
        raise InputError("grid step must divide 1")
    den = int(1 / step)
    top = den if include_one else den - 1
    return den, tuple(range(top + 1))


def burton_space(step: Fraction = DEFAULT_UNIT_GRID_STEP) -> SampledSpace:
    """[0, 1) sampled on a uniform grid (not complete: sup point missing)."""
    den, nums = unit_interval_grid(step, include_one=False)
    return SampledSpace(
        description=f"[0,1) grid step 1/{den}",
        denominator=den,
        numerators=nums,
        complete=False,
    )


def integer_space(max_n: int = DEFAULT_INTEGER_MAX) -> SampledSpace:
    if max_n < 2:
        raise InputError("integer range must contain at least {0,1,2}")
    return SampledSpace(
        description=f"{{0,...,{max_n}}}",
        denominator=1,
        numerators=tuple(range(max_n + 1)),
        complete=True,
    )


def composite_space(step: Fraction = DEFAULT_UNIT_GRID_STEP,
                    index_max: int = DEFAULT_COMPOSITE_INDEX_MAX) -> SampledSpace:
    """[0,1] grid plus the integer tail {4n, 4n+1 : 1 <= n <= index_max}."""
    if index_max < 1:
        raise InputError("index_max must be at least 1")
    den, nums = unit_interval_grid(step, include_one=True)
    tail = []
    for n in range(1, index_max + 1):
        tail.append(4 * n * den)
        tail.append((4 * n + 1) * den)
    return SampledSpace(
        description=f"[0,1] grid step 1/{den} + {{4n,4n+1 : n<={index_max}}}",
        denominator=den,
        numerators=nums + tuple(tail),
        complete=True,
    )


def period2_space() -> FiniteMetricSpace:
    pts = (0, 1, 2)
    table = tuple(tuple(Fraction(abs(i - j)) for j in pts) for i in pts)
    return FiniteMetricSpace(points=pts, dist_table=table, mode="exact")


# ---------------------------------------------------------------------------
# catalog map formulas (module-level so maps stay picklable)

def logistic_ratio(x):
    x = Fraction(x)
    return x / (1 + x)


def floor_half(x):
    return Fraction(int(Fraction(x)) // 2)


def composite_action(x):
    x = Fraction(x)
    if 0 <= x <= 1:
        return x / (1 + x)
    if x.denominator == 1 and x >= 4:
        k = int(x)
        n, r = divmod(k, 4)
        if r == 0:
            return Fraction(0)
        if r == 1:
            return 1 - Fraction(1, n)
    raise InputError(f"{x} is not a point of the composite space")


def catalog(entry_id: str,
            grid_step: Fraction = None,
            integer_max: int = None,
            index_max: int = None) -> CatalogEntry:
    """Build a catalog instance, optionally overriding truncation parameters."""
    if entry_id == "burton_logistic":
        step = Fraction(grid_step) if grid_step is not None else DEFAULT_UNIT_GRID_STEP
        space = burton_space(step)
        return CatalogEntry(
            id=entry_id,
            space=space,
            map=SelfMap(space=space, name="x/(1+x)", func=logistic_ratio),
            expected=(
                "pairwise strict contraction with modulus 1/(1+eps)",
                "no uniform perimeter ratio bounded below 1 on fine grids",
                "perimeter modulus bounded by 1/(1+eps) on qualifying triples",
            ),
            params={"grid_step": str(step)},
        )
    if entry_id == "floor_half":
        top = integer_max if integer_max is not None else DEFAULT_INTEGER_MAX
        space = integer_space(top)
        return CatalogEntry(
            id=entry_id,
            space=space,
            map=SelfMap(space=space, name="floor(n/2)", func=floor_half),
            expected=(
                "not a pairwise strict contraction (adjacent odd/even pair)",
                "uniform perimeter ratio below 1 (exhaustive)",
                "unique fixed point 0",
            ),
            params={"integer_max": top},
        )
    if entry_id == "period2_counterexample":
        space = period2_space()
        return CatalogEntry(
            id=entry_id,
            space=space,
            map=SelfMap(space=space, name="0->1,1->0,2->1", table=(1, 0, 1)),
            expected=(
                "uniform perimeter ratio exactly 1/2",
                "no fixed points; prime period-2 points {0, 1}",
            ),
            params={},
        )
    if entry_id == "composite":
        step = Fraction(grid_step) if grid_step is not None else DEFAULT_UNIT_GRID_STEP
        top = index_max if index_max is not None else DEFAULT_COMPOSITE_INDEX_MAX
        space = composite_space(step, top)
        return CatalogEntry(
            id=entry_id,
            space=space,
            map=SelfMap(space=space, name="composite", func=composite_action),
            expected=(
                "pairwise modulus approaches 1 at distance 1 along the tail",
                "no uniform perimeter ratio bounded below 1 on fine grids",
                "perimeter modulus 1/(1+eps) below 1, 1/2 above 1 (bounds)",
            ),
            params={"grid_step": str(step), "index_max": top},
        )
    raise InputError(f"unknown catalog id {entry_id!r}; known: {', '.join(CATALOG_IDS)}")


def load_instance(path) -> tuple:
    """Read a JSON instance file holding a finite space and a table map."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON in {path}: {exc}") from exc
    mapping = SelfMap.from_json(doc)
    return mapping.space, mapping


def resolve_point(space, text):
    """Interpret a CLI point argument for the given space."""
    if isinstance(space, FiniteMetricSpace):
        for candidate in (text, *(f(text) for f in (int,) if _parses(f, text))):
            if candidate in space._index:
                return candidate
        raise InputError(f"unknown point identifier {text!r}")
    value = parse_scalar(text, exact=True)
    return Fraction(value)


def _parses(f, text):
    try:
        f(text)
        return True
    except (TypeError, ValueError):
        return False
