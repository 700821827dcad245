"""Catalog of per-edge transmission constraint functions.

Each variant is an immutable scalar map with extras needed by the
verification machinery: an exact piecewise-linear representation where one
exists, fixed-point sets, difference-quotient bounds, and sector-membership
checks against a :class:`~tcconsensus.rays.BoxRaySpec`.

Arbitrary user closures are deliberately unsupported: every variant here
serializes to a tagged record and admits either exact or certified-enclosure
fixed-point computation.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import (
    UnboundedRegionError,
    UnresolvableEnclosureError,
)
from .intervals import IntervalSet
from .rays import BoxRaySpec

STRICT_MARGIN = 1e-12
ANALYTIC_FP_TOL = 0.0
BISECTION_FP_TOL = 1e-8


# ---------------------------------------------------------------------------
# piecewise-linear representation


@dataclass(frozen=True)
class PWLRep:
    """Continuous piecewise-linear function: knots plus affine tails."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]
    left_slope: float
    right_slope: float

    def __post_init__(self):
        if not self.xs:
            raise ValueError("PWLRep needs at least one knot")
        if any(b <= a for a, b in zip(self.xs, self.xs[1:])):
            raise ValueError("knot x-coordinates must be strictly increasing")
        object.__setattr__(self, "_axs", np.asarray(self.xs, dtype=np.float64))
        object.__setattr__(self, "_ays", np.asarray(self.ys, dtype=np.float64))
        # per-piece slope/intercept tables indexed by searchsorted bin
        pieces = self.pieces()
        object.__setattr__(
            self, "_slopes", np.array([p[2] for p in pieces], dtype=np.float64)
        )
        object.__setattr__(
            self, "_intercepts", np.array([p[3] for p in pieces], dtype=np.float64)
        )

    def pieces(self) -> list[tuple[float, float, float, float]]:
        """Affine pieces ``(a, b, slope, intercept)`` covering the real line."""
        xs, ys = self.xs, self.ys
        out = [
            (
                -math.inf,
                xs[0],
                self.left_slope,
                ys[0] - self.left_slope * xs[0],
            )
        ]
        for i in range(len(xs) - 1):
            a, b = xs[i], xs[i + 1]
            slope = (ys[i + 1] - ys[i]) / (b - a)
            out.append((a, b, slope, ys[i] - slope * a))
        out.append(
            (
                xs[-1],
                math.inf,
                self.right_slope,
                ys[-1] - self.right_slope * xs[-1],
            )
        )
        return out

    def eval(self, x: float) -> float:
        xs, ys = self.xs, self.ys
        if x <= xs[0]:
            return ys[0] + self.left_slope * (x - xs[0])
        if x >= xs[-1]:
            return ys[-1] + self.right_slope * (x - xs[-1])
        i = bisect.bisect_right(xs, x) - 1
        t = (x - xs[i]) / (xs[i + 1] - xs[i])
        return ys[i] + t * (ys[i + 1] - ys[i])

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        idx = self._axs.searchsorted(x, side="right")
        return self._slopes[idx] * x + self._intercepts[idx]

    def fixed_point_set(self) -> IntervalSet:
        found = []
        for a, b, slope, intercept in self.pieces():
            if slope == 1.0:
                if intercept == 0.0:
                    found.append((a, b))
                continue
            root = intercept / (1.0 - slope)
            if a - 1e-15 <= root <= b + 1e-15:
                root = min(max(root, a), b)
                found.append((root, root))
        return IntervalSet.from_pieces(found, ANALYTIC_FP_TOL)

    def slope_range(
        self, hull_lo: float, hull_hi: float, exclude_identity: bool = False
    ):
        """Min/max piece slope over pieces overlapping ``[hull_lo, hull_hi]``.

        Chord slopes between any two points of the hull are convex
        combinations of piece slopes, so these extremes are exact bounds.
        Returns ``(lo, hi, lo_attained, hi_attained)`` or ``None`` when
        ``exclude_identity`` leaves no piece to attain a bound on.
        """
        lo = math.inf
        hi = -math.inf
        lo_att = hi_att = False
        any_non_identity = False
        for a, b, slope, intercept in self.pieces():
            if min(b, hull_hi) - max(a, hull_lo) <= 0:
                continue
            is_identity = slope == 1.0 and intercept == 0.0
            attainable = not (exclude_identity and is_identity)
            if attainable:
                any_non_identity = True
            if slope < lo:
                lo, lo_att = slope, attainable
            elif slope == lo and attainable:
                lo_att = True
            if slope > hi:
                hi, hi_att = slope, attainable
            elif slope == hi and attainable:
                hi_att = True
        if exclude_identity and not any_non_identity:
            return None
        return lo, hi, lo_att, hi_att

    def range_over(self, lo: float, hi: float) -> tuple[float, float]:
        pts = [lo, hi] + [x for x in self.xs if lo < x < hi]
        vals = [self.eval(p) if math.isfinite(p) else self._limit(p) for p in pts]
        return min(vals), max(vals)

    def _limit(self, p: float) -> float:
        if p == math.inf:
            s = self.right_slope
            return self.ys[-1] if s == 0 else math.copysign(math.inf, s)
        s = self.left_slope
        return self.ys[0] if s == 0 else math.copysign(math.inf, -s)

    def bounded_range(self):
        if self.left_slope == 0.0 and self.right_slope == 0.0:
            return min(self.ys), max(self.ys)
        return None


# ---------------------------------------------------------------------------
# variants


class ConstraintFn:
    """Base class for catalog variants. Instances are immutable values."""

    variant: str = ""
    is_gate: bool = False

    def evaluate(self, x: float) -> float:
        raise NotImplementedError

    def eval_array(self, x: np.ndarray) -> np.ndarray:
        return np.array([self.evaluate(float(v)) for v in np.ravel(x)]).reshape(
            np.shape(x)
        )

    def pwl(self) -> PWLRep | None:
        return None

    def discontinuities(self) -> tuple[float, ...]:
        return ()

    def bounded_range(self):
        p = self.pwl()
        return p.bounded_range() if p is not None else None

    def to_dict(self) -> dict:
        out = {"variant": self.variant}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, ConstraintFn):
                v = v.to_dict()
            elif isinstance(v, tuple):
                v = [list(k) if isinstance(k, tuple) else k for k in v]
            out[f.name] = v
        return out


@dataclass(frozen=True)
class Identity(ConstraintFn):
    variant = "identity"

    def evaluate(self, x: float) -> float:
        return x

    def eval_array(self, x):
        return np.asarray(x, dtype=float)

    def pwl(self):
        return PWLRep((0.0,), (0.0,), 1.0, 1.0)


@dataclass(frozen=True)
class Affine(ConstraintFn):
    variant = "affine"
    k: float
    m: float = 0.0

    def evaluate(self, x: float) -> float:
        return self.k * x + self.m

    def eval_array(self, x):
        return self.k * np.asarray(x, dtype=float) + self.m

    def pwl(self):
        return PWLRep((0.0,), (self.m,), self.k, self.k)


@dataclass(frozen=True)
class Saturation(ConstraintFn):
    variant = "saturation"
    lo: float
    hi: float

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("saturation bounds out of order")

    def evaluate(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)

    def eval_array(self, x):
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def pwl(self):
        if self.lo == self.hi:
            return PWLRep((self.lo,), (self.lo,), 0.0, 0.0)
        return PWLRep((self.lo, self.hi), (self.lo, self.hi), 0.0, 0.0)


@dataclass(frozen=True)
class IntervalProjection(ConstraintFn):
    """Identity on ``[p, q]``; outside, contracts toward the nearer end with
    rate ``rho``: ``rho*x + (1-rho)*q`` above ``q``, mirrored below ``p``."""

    variant = "interval_projection"
    p: float
    q: float
    rho: float

    def __post_init__(self):
        if self.p > self.q:
            raise ValueError("interval ends out of order")
        if not (0.0 < self.rho < 1.0):
            raise ValueError("contraction rate must be in (0, 1)")

    def evaluate(self, x: float) -> float:
        if x > self.q:
            return self.rho * x + (1.0 - self.rho) * self.q
        if x < self.p:
            return self.rho * x + (1.0 - self.rho) * self.p
        return x

    def eval_array(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(
            x > self.q,
            self.rho * x + (1.0 - self.rho) * self.q,
            np.where(x < self.p, self.rho * x + (1.0 - self.rho) * self.p, x),
        )

    def pwl(self):
        if self.p == self.q:
            return PWLRep((self.p,), (self.p,), self.rho, self.rho)
        return PWLRep((self.p, self.q), (self.p, self.q), self.rho, self.rho)


@dataclass(frozen=True)
class ScaledSine(ConstraintFn):
    """``amplitude * sin(x + phase)``."""

    variant = "scaled_sine"
    amplitude: float
    phase: float = 0.0

    def evaluate(self, x: float) -> float:
        return self.amplitude * math.sin(x + self.phase)

    def eval_array(self, x):
        return self.amplitude * np.sin(np.asarray(x, dtype=float) + self.phase)

    def bounded_range(self):
        a = abs(self.amplitude)
        return -a, a

    def derivative_range(self, lo: float, hi: float) -> tuple[float, float]:
        """Exact range of the derivative ``amplitude*cos(x+phase)`` on
        ``[lo, hi]``; equals the closure of the chord-slope range there."""
        a = self.amplitude
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi - lo >= 2 * math.pi:
            return -abs(a), abs(a)
        c_lo, c_hi = _cos_range(lo + self.phase, hi + self.phase)
        vals = (a * c_lo, a * c_hi)
        return min(vals), max(vals)


def _cos_range(lo: float, hi: float) -> tuple[float, float]:
    vals = [math.cos(lo), math.cos(hi)]
    # critical points k*pi inside [lo, hi]
    k = math.ceil(lo / math.pi)
    while k * math.pi <= hi:
        vals.append(1.0 if k % 2 == 0 else -1.0)
        k += 1
    return min(vals), max(vals)


@dataclass(frozen=True)
class PiecewiseLinear(ConstraintFn):
    """Continuous piecewise-linear map given by knots ``(x, y)`` with linear
    extension slopes beyond the first/last knot."""

    variant = "piecewise_linear"
    knots: tuple[tuple[float, float], ...]
    left_slope: float = 0.0
    right_slope: float = 0.0

    def __post_init__(self):
        knots = tuple((float(a), float(b)) for a, b in self.knots)
        object.__setattr__(self, "knots", knots)
        rep = PWLRep(
            tuple(k[0] for k in knots),
            tuple(k[1] for k in knots),
            self.left_slope,
            self.right_slope,
        )
        object.__setattr__(self, "_rep", rep)

    def evaluate(self, x: float) -> float:
        return self._rep.eval(x)

    def eval_array(self, x):
        return self._rep.eval_array(np.asarray(x, dtype=float))

    def pwl(self):
        return self._rep


@dataclass(frozen=True)
class GatedIdentity(ConstraintFn):
    """Identity transmission gated by an accepted interval.

    Evaluation is total (returns ``x``); the dynamics module consults
    :meth:`gate_mask` and drops the whole edge contribution when the sender
    state falls outside the accepted interval.
    """

    variant = "gated_identity"
    lo: float
    hi: float
    is_gate = True

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("gate interval out of order")

    def evaluate(self, x: float) -> float:
        return x

    def eval_array(self, x):
        return np.asarray(x, dtype=float)

    def gate_open(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def gate_mask(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self.lo) & (x <= self.hi)

    def pwl(self):
        return PWLRep((0.0,), (0.0,), 1.0, 1.0)

    def discontinuities(self):
        return (self.lo, self.hi)


@dataclass(frozen=True)
class Tabulated(ConstraintFn):
    """Samples plus an interpolation rule. ``linear`` interpolation (with
    flat tails) is exactly piecewise linear; ``pchip`` falls back to the
    sampled/bisection machinery."""

    variant = "tabulated"
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    interpolation: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "xs", tuple(float(v) for v in self.xs))
        object.__setattr__(self, "ys", tuple(float(v) for v in self.ys))
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("need matching xs/ys with at least two samples")
        if self.interpolation == "linear":
            object.__setattr__(
                self, "_rep", PWLRep(self.xs, self.ys, 0.0, 0.0)
            )
        elif self.interpolation == "pchip":
            from scipy.interpolate import PchipInterpolator

            object.__setattr__(
                self,
                "_interp",
                PchipInterpolator(np.asarray(self.xs), np.asarray(self.ys)),
            )
        else:
            raise ValueError(f"unknown interpolation rule {self.interpolation!r}")

    def evaluate(self, x: float) -> float:
        if self.interpolation == "linear":
            return self._rep.eval(x)
        x = min(max(x, self.xs[0]), self.xs[-1])
        return float(self._interp(x))

    def eval_array(self, x):
        x = np.asarray(x, dtype=float)
        if self.interpolation == "linear":
            return self._rep.eval_array(x)
        return np.asarray(self._interp(np.clip(x, self.xs[0], self.xs[-1])))

    def pwl(self):
        return self._rep if self.interpolation == "linear" else None

    def bounded_range(self):
        return min(self.ys), max(self.ys)


@dataclass(frozen=True)
class Mix(ConstraintFn):
    """Pointwise convex combination ``weight*first + (1-weight)*second``."""

    variant = "mix"
    first: ConstraintFn
    second: ConstraintFn
    weight: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.weight <= 1.0):
            raise ValueError("mix weight must lie in [0, 1]")
        merged = None
        p1 = self.first.pwl()
        p2 = self.second.pwl()
        if p1 is not None and p2 is not None:
            w = self.weight
            xs = tuple(sorted(set(p1.xs) | set(p2.xs)))
            ys = tuple(w * p1.eval(x) + (1.0 - w) * p2.eval(x) for x in xs)
            merged = PWLRep(
                xs,
                ys,
                w * p1.left_slope + (1.0 - w) * p2.left_slope,
                w * p1.right_slope + (1.0 - w) * p2.right_slope,
            )
        object.__setattr__(self, "_merged", merged)

    def evaluate(self, x: float) -> float:
        w = self.weight
        return w * self.first.evaluate(x) + (1.0 - w) * self.second.evaluate(x)

    def eval_array(self, x):
        if self._merged is not None:
            return self._merged.eval_array(np.asarray(x, dtype=float))
        w = self.weight
        return w * self.first.eval_array(x) + (1.0 - w) * self.second.eval_array(x)

    def pwl(self):
        return self._merged

    def bounded_range(self):
        r1 = self.first.bounded_range()
        r2 = self.second.bounded_range()
        if r1 is None or r2 is None:
            return None
        w = self.weight
        return (
            w * r1[0] + (1.0 - w) * r2[0],
            w * r1[1] + (1.0 - w) * r2[1],
        )


# ---------------------------------------------------------------------------
# serialization

_VARIANTS = {
    cls.variant: cls
    for cls in (
        Identity,
        Affine,
        Saturation,
        IntervalProjection,
        ScaledSine,
        PiecewiseLinear,
        GatedIdentity,
        Tabulated,
        Mix,
    )
}


def from_dict(record: dict) -> ConstraintFn:
    from .errors import UnknownConstraintVariantError

    rec = dict(record)
    name = rec.pop("variant", None)
    cls = _VARIANTS.get(name)
    if cls is None:
        raise UnknownConstraintVariantError(f"unknown constraint variant {name!r}")
    kwargs = {}
    for f in fields(cls):
        if f.name not in rec:
            continue
        v = rec[f.name]
        if isinstance(v, dict) and "variant" in v:
            v = from_dict(v)
        elif isinstance(v, list):
            v = tuple(tuple(k) if isinstance(k, list) else k for k in v)
        kwargs[f.name] = v
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# operations


def evaluate(f: ConstraintFn, x: float) -> float:
    return f.evaluate(float(x))


def fixed_point_set(f: ConstraintFn, domain: IntervalSet | None = None) -> IntervalSet:
    """Fixed points of ``f`` restricted to ``domain`` (whole line by default).

    Exact for piecewise-linear-representable variants and for gates (whose
    fixed set is the accepted interval); otherwise a scan-plus-bisection
    enclosure with its tolerance recorded on the result.
    """
    if domain is None:
        domain = IntervalSet.reals()
    if domain.is_empty:
        return IntervalSet.empty()
    if isinstance(f, GatedIdentity):
        return IntervalSet.closed(f.lo, f.hi).intersect(domain)
    rep = f.pwl()
    if rep is not None:
        return rep.fixed_point_set().intersect(domain)
    return _scan_fixed_points(f, domain)


def _scan_window(f: ConstraintFn, domain: IntervalSet) -> tuple[float, float]:
    lo, hi = domain.hull()
    rng = f.bounded_range()
    if rng is not None:
        # fixed points satisfy x = f(x), so they lie inside the range of f
        lo = max(lo, rng[0] - 1e-9)
        hi = min(hi, rng[1] + 1e-9)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UnresolvableEnclosureError(
            "cannot bound the fixed-point search window for this variant"
        )
    return lo, hi


def _scan_fixed_points(
    f: ConstraintFn, domain: IntervalSet, resolution: float = 1e-3
) -> IntervalSet:
    from scipy.optimize import brentq

    lo, hi = _scan_window(f, domain)
    if hi < lo:
        return IntervalSet.empty()
    if hi == lo:
        g = f.evaluate(lo) - lo
        return (
            IntervalSet.point(lo, BISECTION_FP_TOL)
            if abs(g) <= BISECTION_FP_TOL
            else IntervalSet.empty()
        )
    n = max(int(math.ceil((hi - lo) / resolution)) + 1, 16)
    xs = np.linspace(lo, hi, n)
    g = f.eval_array(xs) - xs
    pieces = []
    flat = np.abs(g) <= 1e-12
    i = 0
    while i < n:
        if flat[i]:
            j = i
            while j + 1 < n and flat[j + 1]:
                j += 1
            pieces.append((xs[i], xs[j]))
            i = j + 1
            continue
        if i + 1 < n and not flat[i + 1] and g[i] * g[i + 1] < 0:
            root = brentq(
                lambda x: f.evaluate(x) - x, xs[i], xs[i + 1], xtol=1e-12
            )
            pieces.append((root, root))
        i += 1
    out = IntervalSet.from_pieces(pieces, BISECTION_FP_TOL)
    return out.intersect(domain)


@dataclass(frozen=True)
class QuotientBounds:
    """Bounds on the difference quotient ``(f(x+w)-f(x))/w`` over a region.

    ``lo_attained``/``hi_attained`` say whether an actual chord attains the
    bound (piece slopes do; smooth-function derivative extremes do not).
    """

    lo: float
    hi: float
    lo_attained: bool
    hi_attained: bool
    exact: bool
    grid: float | None = None


def difference_quotient_bounds(
    f: ConstraintFn,
    region: IntervalSet | None = None,
    grid: float = 1e-3,
    exclude_fixed: bool = False,
) -> QuotientBounds | None:
    """Chord-slope bounds for ``f`` with both endpoints in ``region``.

    Exact for piecewise-linear-representable variants (piece slopes over the
    region hull) and for the sine variant (analytic derivative range);
    conservative sampled estimate otherwise. ``exclude_fixed`` restricts the
    attainment flags to chords anchored off the fixed-point set, the form
    needed by the strict equilibrium-uniqueness hypothesis; it returns
    ``None`` when the whole region is fixed (the condition is vacuous).
    """
    if region is None:
        region = IntervalSet.reals()
    if region.is_empty:
        return None
    hull_lo, hull_hi = region.hull()

    rep = f.pwl()
    if rep is not None:
        r = rep.slope_range(hull_lo, hull_hi, exclude_identity=exclude_fixed)
        if r is None:
            return None
        lo, hi, lo_att, hi_att = r
        return QuotientBounds(lo, hi, lo_att, hi_att, exact=True)

    if isinstance(f, ScaledSine):
        lo, hi = f.derivative_range(hull_lo, hull_hi)
        return QuotientBounds(lo, hi, False, False, exact=True)

    if isinstance(f, Mix):
        b1 = difference_quotient_bounds(f.first, region, grid, exclude_fixed)
        b2 = difference_quotient_bounds(f.second, region, grid, exclude_fixed)
        if b1 is None or b2 is None:
            return b1 or b2
        w = f.weight
        return QuotientBounds(
            w * b1.lo + (1.0 - w) * b2.lo,
            w * b1.hi + (1.0 - w) * b2.hi,
            False,
            False,
            exact=b1.exact and b2.exact,
            grid=b1.grid or b2.grid,
        )

    if not (math.isfinite(hull_lo) and math.isfinite(hull_hi)):
        raise UnboundedRegionError(
            f"{f.variant} has no affine tails; bound the region"
        )
    step = grid * max(hull_hi - hull_lo, 1.0)
    n = max(int(math.ceil((hull_hi - hull_lo) / step)) + 1, 16)
    xs = np.linspace(hull_lo, hull_hi, n)
    vals = f.eval_array(xs)
    slopes = np.diff(vals) / np.diff(xs)
    pad = 1e-9 + 0.0 * step
    return QuotientBounds(
        float(slopes.min()) - pad,
        float(slopes.max()) + pad,
        False,
        False,
        exact=False,
        grid=float(xs[1] - xs[0]),
    )


# ---------------------------------------------------------------------------
# sector membership


@dataclass(frozen=True)
class SectorVerdict:
    passed: bool
    first_violation: float | None
    exact: bool


@dataclass(frozen=True)
class SectorReport:
    lower: SectorVerdict
    box: SectorVerdict
    upper: SectorVerdict

    @property
    def passed(self) -> bool:
        return self.lower.passed and self.box.passed and self.upper.passed


def _linear_ok(ga, gb, a_inc, b_inc, strict) -> bool:
    # g is linear on [a, b]; require g <= 0 (or < 0 if strict) on the
    # region points, which include the endpoints per the inclusion flags.
    m = STRICT_MARGIN
    if not strict:
        return ga <= m and gb <= m
    if ga > m or gb > m:
        return False
    if abs(ga) <= m and abs(gb) <= m:
        return False  # g vanishes on the whole segment
    if a_inc and ga >= -m:
        return False
    if b_inc and gb >= -m:
        return False
    return True


def _check_pwl_region(rep, lo, hi, lo_inc, hi_inc, conditions):
    """Exact check of linear inequalities over [lo, hi].

    ``conditions`` is a list of ``(coef_x, const, coef_f, strict)`` meaning
    require ``coef_x*x + const + coef_f*f(x) <= 0`` (< 0 when strict).
    """
    if hi < lo or (hi == lo and not (lo_inc and hi_inc)):
        return True, None
    cuts = sorted({lo, hi} | {x for x in rep.xs if lo < x < hi})
    segs = list(zip(cuts, cuts[1:])) if len(cuts) > 1 else [(lo, hi)]
    for a, b in segs:
        fa, fb = rep.eval(a), rep.eval(b)
        a_inc = lo_inc if a == lo else True
        b_inc = hi_inc if b == hi else True
        for cx, c0, cf, strict in conditions:
            ga = cx * a + c0 + cf * fa
            gb = cx * b + c0 + cf * fb
            if not _linear_ok(ga, gb, a_inc, b_inc, strict):
                # report the worse endpoint as the witness
                return False, a if ga >= gb else b
    return True, None


def _check_sampled_region(f, lo, hi, lo_inc, hi_inc, conditions, step):
    if hi < lo or (hi == lo and not (lo_inc and hi_inc)):
        return True, None
    n = max(int(math.ceil((hi - lo) / step)) + 1, 8) if hi > lo else 1
    xs = np.linspace(lo, hi, n)
    vals = f.eval_array(xs)
    m = STRICT_MARGIN
    for cx, c0, cf, strict in conditions:
        g = cx * xs + c0 + cf * vals
        bad = g >= -m if strict else g > m
        if not lo_inc and n > 1:
            bad[0] = g[0] > m
        if not hi_inc and n > 1:
            bad[-1] = g[-1] > m
        idx = np.flatnonzero(bad)
        if idx.size:
            return False, float(xs[idx[0]])
    return True, None


def sector_membership(
    f: ConstraintFn,
    spec: BoxRaySpec,
    grid: float = 1e-3,
    horizon: float | None = None,
) -> SectorReport:
    """Check the three sector conditions of the box-and-ray geometry.

    Lower region ``(anchor - horizon, box_lo)``: ``x <= f(x) < L1(x)``.
    Box ``[box_lo, box_hi]``: ``box_lo <= f(x) <= box_hi``.
    Upper region ``(box_hi, anchor + horizon)``: ``L2(x) < f(x) <= x``.

    Exact for piecewise-linear-representable variants, grid-sampled
    otherwise. Violations are data (reported with a witness point), never
    errors.
    """
    if horizon is None:
        horizon = max(10.0, 4.0 * (spec.box_hi - spec.box_lo))
    w_lo = spec.anchor - horizon
    w_hi = spec.anchor + horizon
    step = grid * 2.0 * horizon

    # conditions as coef_x*x + const + coef_f*f(x) <= 0 (strict flag last)
    lower_conds = [
        (1.0, 0.0, -1.0, False),  # x - f(x) <= 0
        (-spec.k1, -(1.0 - spec.k1) * spec.anchor, 1.0, True),  # f - L1 < 0
    ]
    box_conds = [
        (0.0, spec.box_lo, -1.0, False),  # box_lo - f <= 0
        (0.0, -spec.box_hi, 1.0, False),  # f - box_hi <= 0
    ]
    upper_conds = [
        (spec.k2, (1.0 - spec.k2) * spec.anchor, -1.0, True),  # L2 - f < 0
        (-1.0, 0.0, 1.0, False),  # f - x <= 0
    ]

    rep = f.pwl()
    if rep is not None:
        lo_ok, lo_viol = _check_pwl_region(
            rep, w_lo, spec.box_lo, True, False, lower_conds
        )
        box_ok, box_viol = _check_pwl_region(
            rep, spec.box_lo, spec.box_hi, True, True, box_conds
        )
        up_ok, up_viol = _check_pwl_region(
            rep, spec.box_hi, w_hi, False, True, upper_conds
        )
        exact = True
    else:
        lo_ok, lo_viol = _check_sampled_region(
            f, w_lo, spec.box_lo, True, False, lower_conds, step
        )
        box_ok, box_viol = _check_sampled_region(
            f, spec.box_lo, spec.box_hi, True, True, box_conds, step
        )
        up_ok, up_viol = _check_sampled_region(
            f, spec.box_hi, w_hi, False, True, upper_conds, step
        )
        exact = False

    return SectorReport(
        lower=SectorVerdict(lo_ok, lo_viol, exact),
        box=SectorVerdict(box_ok, box_viol, exact),
        upper=SectorVerdict(up_ok, up_viol, exact),
    )
