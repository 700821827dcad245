"""Consensus-zone computation, admissible-ray search, and the theorem
classifier.

The classifier runs a ledger of named conditions (connectivity, zone
emptiness, chord-slope bounds, ray existence, self-mapped box) and maps the
ledger to a verdict. Ray search is a bounded deterministic grid search;
"not found" is recorded as inconclusive, never as a disproof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constraints import difference_quotient_bounds, fixed_point_set, sector_membership
from .dynamics import System
from .errors import (
    EmptyFixedPointSetError,
    UnboundedRegionError,
    UnresolvableEnclosureError,
)
from .graph import is_strongly_connected
from .intervals import IntervalSet
from .rays import BoxRaySpec, GeometryReport, ray_geometry_check  # noqa: F401

QUOTIENT_EDGE_TOL = 1e-12


def consensus_zone(system: System) -> IntervalSet:
    """Intersection of the fixed-point sets over all edges."""
    zone = IntervalSet.reals()
    for _, fn in sorted(system.constraints.items()):
        zone = zone.intersect(fixed_point_set(fn))
        if zone.is_empty:
            return zone
    return zone


# ---------------------------------------------------------------------------
# ray search

SLOPE_GRID = tuple(-(2.0**j) for j in range(-6, 7))
ANCHOR_COUNT = 33


def _contains_interval(s: IntervalSet, lo: float, hi: float) -> bool:
    return any(a - 1e-12 <= lo and hi <= b + 1e-12 for a, b in s.pieces)


def _candidate_boxes(system: System, phi: IntervalSet) -> list[tuple[float, float]]:
    boxes: list[tuple[float, float]] = []
    if not phi.is_empty and phi.is_bounded:
        boxes.append(phi.hull())
        boxes.extend((lo, hi) for lo, hi in phi.pieces)
    elif not phi.is_empty:
        # unbounded zone (identity-like edges): try small degenerate boxes
        boxes.append((0.0, 0.0))
        boxes.extend((lo, hi) for lo, hi in phi.pieces if math.isfinite(lo) and math.isfinite(hi))
    # geometric expansions of the union-of-fixed-points hull
    lo = math.inf
    hi = -math.inf
    for _, fn in sorted(system.constraints.items()):
        try:
            theta = fixed_point_set(fn)
        except UnresolvableEnclosureError:
            continue
        if theta.is_empty or not theta.is_bounded:
            continue
        a, b = theta.hull()
        lo, hi = min(lo, a), max(hi, b)
    if math.isfinite(lo) and math.isfinite(hi):
        c = 0.5 * (lo + hi)
        h = max(0.5 * (hi - lo), 0.5)
        for scale in (1.0, 1.5, 2.0, 4.0):
            boxes.append((c - scale * h, c + scale * h))
        boxes.append((lo, hi))
    seen = set()
    out = []
    for b in boxes:
        key = (round(b[0], 12), round(b[1], 12))
        if key not in seen:
            seen.add(key)
            out.append(b)
    return out


def _slope_pairs(mode: str) -> list[tuple[float, float]]:
    pairs = []
    if mode == "theorem1":
        for k1 in SLOPE_GRID:
            pairs.append((k1, 1.0 / k1))
    elif mode == "theorem2":
        for k1 in SLOPE_GRID:
            for k2 in SLOPE_GRID:
                if k1 * k2 <= 1.0 + 1e-12:
                    pairs.append((k1, k2))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return pairs


def _spec_admits_all(
    system: System, spec: BoxRaySpec, mode: str, phi: IntervalSet, grid: float
) -> bool:
    if mode == "theorem1" and not spec.check_unit_product(1e-9):
        return False
    if mode == "theorem2":
        if spec.slope_product > 1.0 + 1e-9:
            return False
        # middle condition: identity on the box, i.e. the box sits in the zone
        if not _contains_interval(phi, spec.box_lo, spec.box_hi):
            return False
    for _, fn in sorted(system.constraints.items()):
        report = sector_membership(fn, spec, grid=grid)
        if mode == "theorem2":
            if not (report.lower.passed and report.upper.passed):
                return False
        elif not report.passed:
            return False
    return True


def find_admissible_rays(
    system: System,
    mode: str = "theorem2",
    hints: tuple[BoxRaySpec, ...] = (),
    grid: float = 5e-3,
) -> BoxRaySpec | None:
    """Search for a box-and-ray spec admitting every edge under ``mode``.

    ``theorem1`` enforces negative slopes with product one and the box-range
    condition; ``theorem2`` enforces slope product at most one and identity
    on the box. Hint specs are verified first. Returns ``None`` when the
    bounded search fails; absence is not a proof of non-existence.
    """
    phi = consensus_zone(system)
    for hint in hints:
        if _spec_admits_all(system, hint, mode, phi, grid):
            return hint
    for box_lo, box_hi in _candidate_boxes(system, phi):
        if box_hi < box_lo:
            continue
        anchors = (
            [box_lo]
            if box_hi == box_lo
            else list(np.linspace(box_lo, box_hi, ANCHOR_COUNT))
        )
        for k1, k2 in _slope_pairs(mode):
            for anchor in anchors:
                spec = BoxRaySpec(box_lo, box_hi, float(anchor), k1, k2)
                if _spec_admits_all(system, spec, mode, phi, grid):
                    return spec
    return None


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class ConditionResult:
    status: str  # "pass" | "fail" | "inconclusive"
    witness: object = None
    note: str = ""


@dataclass(frozen=True)
class TheoremVerdict:
    classification: str  # Consensus | UniqueEquilibrium | EquilibriumExists | Inconclusive
    conditions: dict[str, ConditionResult]
    zone: IntervalSet
    rays: BoxRaySpec | None = None

    def to_dict(self) -> dict:
        def _coerce(v):
            if isinstance(v, IntervalSet):
                return [list(p) for p in v.pieces]
            if isinstance(v, BoxRaySpec):
                return {
                    "box_lo": v.box_lo,
                    "box_hi": v.box_hi,
                    "anchor": v.anchor,
                    "k1": v.k1,
                    "k2": v.k2,
                }
            if isinstance(v, (tuple, list)):
                return [_coerce(x) for x in v]
            if isinstance(v, (np.floating, np.integer)):
                return float(v)
            return v

        return {
            "classification": self.classification,
            "conditions": {
                name: {
                    "status": c.status,
                    "witness": _coerce(c.witness),
                    "note": c.note,
                }
                for name, c in self.conditions.items()
            },
            "consensus_zone": _coerce(self.zone),
            "rays": _coerce(self.rays),
        }


def _quotient_condition(system: System, strict: bool) -> ConditionResult:
    """Chord-slope ledger entry.

    Non-strict form: every edge quotient in (-1, 1], everywhere. Strict
    form: quotient in (-1, 1) for chords anchored off the edge's fixed-point
    set (vacuous for edges fixed everywhere).
    """
    worst = (math.inf, -math.inf)
    for edge, fn in sorted(system.constraints.items()):
        try:
            qb = difference_quotient_bounds(
                fn, IntervalSet.reals(), exclude_fixed=strict
            )
        except UnboundedRegionError:
            return ConditionResult(
                "inconclusive", note=f"edge {edge}: unbounded region for sampling"
            )
        if qb is None:
            continue
        lo_ok = qb.lo > -1.0 + QUOTIENT_EDGE_TOL or (
            qb.lo >= -1.0 - QUOTIENT_EDGE_TOL and not qb.lo_attained
        )
        if strict:
            hi_ok = qb.hi < 1.0 - QUOTIENT_EDGE_TOL or (
                qb.hi <= 1.0 + QUOTIENT_EDGE_TOL and not qb.hi_attained
            )
        else:
            hi_ok = qb.hi <= 1.0 + QUOTIENT_EDGE_TOL
        if not (lo_ok and hi_ok):
            return ConditionResult(
                "fail",
                witness=(qb.lo, qb.hi),
                note=f"edge {edge} quotient bounds outside the admissible range",
            )
        worst = (min(worst[0], qb.lo), max(worst[1], qb.hi))
    return ConditionResult("pass", witness=worst)


def classify_system(
    system: System, hints: tuple[BoxRaySpec, ...] = ()
) -> TheoremVerdict:
    """Classify a system by running the consensus/equilibrium condition
    ledger and mapping it to a verdict."""
    from .equilibrium import invariant_box

    conditions: dict[str, ConditionResult] = {}

    sc = is_strongly_connected(system.graph)
    conditions["strongly_connected"] = ConditionResult("pass" if sc else "fail")

    try:
        zone = consensus_zone(system)
        conditions["consensus_zone_nonempty"] = ConditionResult(
            "pass" if not zone.is_empty else "fail", witness=zone
        )
    except UnresolvableEnclosureError as err:
        zone = IntervalSet.empty()
        conditions["consensus_zone_nonempty"] = ConditionResult(
            "inconclusive", note=str(err)
        )

    conditions["quotient_in_unit_sector"] = _quotient_condition(system, strict=False)
    conditions["strict_quotient_off_fixed_set"] = _quotient_condition(
        system, strict=True
    )

    rays = None
    if sc and not zone.is_empty:
        if hints or conditions["quotient_in_unit_sector"].status != "pass":
            rays = find_admissible_rays(system, "theorem2", hints=hints)
            conditions["admissible_rays"] = (
                ConditionResult("pass", witness=rays)
                if rays is not None
                else ConditionResult(
                    "inconclusive",
                    note="bounded search found no rays; absence is not a proof",
                )
            )
        else:
            conditions["admissible_rays"] = ConditionResult(
                "inconclusive",
                note="not searched; chord-slope bounds already certify consensus",
            )
    else:
        conditions["admissible_rays"] = ConditionResult(
            "inconclusive", note="ray search only runs for a non-empty zone"
        )

    try:
        box = invariant_box(system)
    except (EmptyFixedPointSetError, UnresolvableEnclosureError):
        box = None
    conditions["self_mapped_box"] = (
        ConditionResult("pass", witness=box)
        if box is not None
        else ConditionResult("inconclusive", note="no self-mapped box certified")
    )

    if sc and not zone.is_empty and (
        conditions["quotient_in_unit_sector"].status == "pass"
        or conditions["admissible_rays"].status == "pass"
    ):
        cls = "Consensus"
    elif (
        sc
        and zone.is_empty
        and conditions["strict_quotient_off_fixed_set"].status == "pass"
        and conditions["consensus_zone_nonempty"].status == "fail"
    ):
        cls = "UniqueEquilibrium"
    elif box is not None:
        cls = "EquilibriumExists"
    else:
        cls = "Inconclusive"
        failing = [n for n, c in conditions.items() if c.status != "pass"]
        conditions["inconclusive_because"] = ConditionResult(
            "inconclusive", witness=failing
        )

    return TheoremVerdict(cls, conditions, zone, rays)
