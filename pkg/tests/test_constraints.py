import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tcconsensus import (
    Affine,
    BoxRaySpec,
    GatedIdentity,
    Identity,
    IntervalProjection,
    IntervalSet,
    Mix,
    PiecewiseLinear,
    Saturation,
    ScaledSine,
    Tabulated,
    difference_quotient_bounds,
    fixed_point_set,
    from_dict,
    sector_membership,
)
from tcconsensus.constraints import evaluate
from tcconsensus.errors import UnboundedRegionError, UnknownConstraintVariantError

CATALOG = [
    Identity(),
    Affine(-0.5, 1.0),
    Affine(1.0, 0.5),
    Saturation(-1.0, 1.0),
    IntervalProjection(-1.0, 1.0, 0.5),
    ScaledSine(1.0, math.pi),
    ScaledSine(0.5, 0.0),
    PiecewiseLinear(((-1.0, -1.0), (1.0, 1.0)), -0.5, -0.5),
    PiecewiseLinear(((0.0, 0.0),), -0.9, -0.7),
    GatedIdentity(-2.0, 2.0),
    Tabulated((-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0)),
    Tabulated((-2.0, -1.0, 1.0, 2.0), (-1.5, -1.0, 1.0, 1.5), "pchip"),
    Mix(Affine(0.5, 0.0), Saturation(-1.0, 1.0)),
    Mix(ScaledSine(0.8, math.pi), Affine(-0.5, 0.0), 0.5),
]


class TestEvaluate:
    def test_interval_projection_above(self):
        f = IntervalProjection(-1.0, 1.0, 0.5)
        assert evaluate(f, 2.0) == pytest.approx(1.5)

    def test_interval_projection_below_and_inside(self):
        f = IntervalProjection(-1.0, 1.0, 0.5)
        assert evaluate(f, -3.0) == pytest.approx(0.5 * -3.0 + 0.5 * -1.0)
        assert evaluate(f, 0.25) == 0.25

    def test_scaled_sine_at_origin(self):
        assert evaluate(ScaledSine(1.0, math.pi), 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_saturation_interior(self):
        assert evaluate(Saturation(-1.0, 1.0), 0.3) == 0.3

    def test_saturation_clamps(self):
        assert evaluate(Saturation(-1.0, 1.0), 5.0) == 1.0

    def test_piecewise_linear_tails(self):
        f = PiecewiseLinear(((0.0, 0.0),), -0.9, -0.7)
        assert evaluate(f, -2.0) == pytest.approx(1.8)
        assert evaluate(f, 3.0) == pytest.approx(-2.1)

    def test_mix_is_pointwise_average(self):
        f = Mix(Affine(1.0, 0.0), Affine(0.0, 2.0), 0.25)
        assert evaluate(f, 4.0) == pytest.approx(0.25 * 4.0 + 0.75 * 2.0)

    @pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.variant)
    def test_eval_array_matches_scalar(self, f):
        xs = np.linspace(-3, 3, 41)
        got = f.eval_array(xs)
        want = np.array([f.evaluate(float(x)) for x in xs])
        assert np.abs(got - want).max() < 1e-12

    def test_interval_projection_validation(self):
        with pytest.raises(ValueError):
            IntervalProjection(1.0, -1.0, 0.5)
        with pytest.raises(ValueError):
            IntervalProjection(-1.0, 1.0, 1.5)

    def test_piecewise_linear_knots_must_increase(self):
        with pytest.raises(ValueError):
            PiecewiseLinear(((1.0, 0.0), (0.0, 1.0)))


class TestFixedPointSet:
    def test_saturation(self):
        assert fixed_point_set(Saturation(-1.0, 1.0)).pieces == ((-1.0, 1.0),)

    def test_affine_linear_oracle(self):
        # solve -0.5x + 1 = x independently: x = 1 / 1.5
        theta = fixed_point_set(Affine(-0.5, 1.0))
        (lo, hi), = theta.pieces
        assert lo == hi == pytest.approx(2.0 / 3.0)

    def test_scaled_sine_origin(self):
        theta = fixed_point_set(ScaledSine(1.0, math.pi))
        assert len(theta.pieces) == 1
        assert theta.contains(0.0, slack=1e-8)

    def test_identity_is_whole_line(self):
        assert fixed_point_set(Identity()).pieces == ((-math.inf, math.inf),)

    def test_gated_identity_is_accepted_interval(self):
        assert fixed_point_set(GatedIdentity(-2.0, 2.0)).pieces == ((-2.0, 2.0),)

    def test_affine_slope_one_nonzero_offset_empty(self):
        assert fixed_point_set(Affine(1.0, 0.5)).is_empty

    def test_pwl_identity_segment_plus_tails(self):
        f = PiecewiseLinear(((-1.0, -1.0), (1.0, 1.0)), -0.5, -0.5)
        assert fixed_point_set(f).pieces == ((-1.0, 1.0),)

    def test_offset_identity_segment_single_root(self):
        # identity-slope middle with offset 0.2: the only fixed point sits on
        # the right tail, at x = 1 + 0.2/1.5
        f = PiecewiseLinear(((-1.0, -0.8), (1.0, 1.2)), -0.5, -0.5)
        (lo, hi), = fixed_point_set(f).pieces
        assert lo == hi == pytest.approx(1.0 + 0.2 / 1.5)

    def test_domain_restriction(self):
        theta = fixed_point_set(Saturation(-1.0, 1.0), IntervalSet.closed(0.0, 5.0))
        assert theta.pieces == ((0.0, 1.0),)

    def test_tabulated_linear_exact(self):
        # linear table y = x/2 on [-2, 2]: the only fixed point is 0
        f = Tabulated((-2.0, 0.0, 2.0), (-1.0, 0.0, 1.0))
        assert fixed_point_set(f).pieces == ((0.0, 0.0),)

    @pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.variant)
    def test_sign_scan_oracle(self, f):
        """Every certified fixed point has a scan witness and vice versa."""
        xs = np.arange(-20.0, 20.0 + 1e-9, 1e-4)
        if isinstance(f, GatedIdentity):
            g = np.where((xs >= f.lo) & (xs <= f.hi), 0.0, 1.0)
        else:
            g = f.eval_array(xs) - xs
        theta = fixed_point_set(f, IntervalSet.closed(-20.0, 20.0))
        near_zero = np.abs(g) <= 2e-4
        tol = max(theta.tolerance, 1e-3)
        for x, flag in zip(xs[::50], near_zero[::50]):
            if flag and abs(g[int(round((x + 20.0) / 1e-4))]) <= 1e-9:
                assert theta.contains(float(x), slack=tol)
        for lo, hi in theta.pieces:
            mid = 0.5 * (lo + hi)
            idx = int(round((min(max(mid, -20.0), 20.0) + 20.0) / 1e-4))
            assert abs(g[idx]) <= 2e-3

    def test_fixed_points_actually_fixed(self):
        for f in CATALOG:
            if isinstance(f, GatedIdentity):
                continue
            theta = fixed_point_set(f, IntervalSet.closed(-50.0, 50.0))
            tol = theta.tolerance
            for lo, hi in theta.pieces:
                for x in (lo, hi, 0.5 * (lo + hi)):
                    assert abs(f.evaluate(x) - x) <= max(tol * 2, 1e-9)


class TestDifferenceQuotientBounds:
    def test_affine_constant_slope(self):
        qb = difference_quotient_bounds(Affine(-0.5, 0.0))
        assert (qb.lo, qb.hi) == (-0.5, -0.5)
        assert qb.exact and qb.lo_attained and qb.hi_attained

    def test_saturation_chords(self):
        qb = difference_quotient_bounds(Saturation(-1.0, 1.0))
        assert (qb.lo, qb.hi) == (0.0, 1.0)
        assert qb.lo_attained and qb.hi_attained

    def test_scaled_sine_dense_grid_oracle(self):
        f = ScaledSine(0.5, 0.0)
        region = IntervalSet.closed(-10.0, 10.0)
        qb = difference_quotient_bounds(f, region)
        xs = np.arange(-10.0, 10.0, 1e-3)
        chords = np.diff(f.eval_array(xs)) / np.diff(xs)
        assert qb.lo <= chords.min() + 1e-6 and qb.hi >= chords.max() - 1e-6
        assert -0.5 - 1e-12 <= qb.lo and qb.hi <= 0.5 + 1e-12

    def test_sine_bounds_not_attained(self):
        qb = difference_quotient_bounds(ScaledSine(1.0, math.pi))
        assert (qb.lo, qb.hi) == (-1.0, 1.0)
        assert not qb.lo_attained and not qb.hi_attained

    def test_exclude_fixed_for_identity_is_vacuous(self):
        assert difference_quotient_bounds(Identity(), exclude_fixed=True) is None

    def test_exclude_fixed_keeps_offset_identity_piece(self):
        # slope-1 middle with nonzero offset is not the identity; the strict
        # off-fixed-set bound must still see slope 1 as attained
        f = PiecewiseLinear(((-1.0, -0.8), (1.0, 1.2)), -0.5, -0.5)
        qb = difference_quotient_bounds(f, exclude_fixed=True)
        assert qb.hi == 1.0 and qb.hi_attained

    def test_pchip_needs_bounded_region(self):
        f = Tabulated((-2.0, -1.0, 1.0, 2.0), (-1.5, -1.0, 1.0, 1.5), "pchip")
        with pytest.raises(UnboundedRegionError):
            difference_quotient_bounds(f, IntervalSet.reals())
        qb = difference_quotient_bounds(f, IntervalSet.closed(-2, 2))
        assert not qb.exact and qb.grid is not None

    def test_empty_region_is_none(self):
        assert difference_quotient_bounds(Affine(0.5), IntervalSet.empty()) is None

    @given(
        st.floats(-5, 0),
        st.floats(0.1, 5),
        st.floats(0.5, 3),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_in_region(self, lo, width, grow):
        f = PiecewiseLinear(
            ((-2.0, 1.0), (-0.5, -0.5), (1.0, 0.5), (3.0, -1.0)), 0.3, -0.6
        )
        small = IntervalSet.closed(lo, lo + width)
        large = IntervalSet.closed(lo - grow, lo + width + grow)
        qs = difference_quotient_bounds(f, small)
        ql = difference_quotient_bounds(f, large)
        assert ql.lo <= qs.lo + 1e-12 and ql.hi >= qs.hi - 1e-12


SPEC = BoxRaySpec(-1.0, 1.0, 0.0, -1.0, -1.0)


class TestSectorMembership:
    def test_affine_contraction_passes(self):
        report = sector_membership(Affine(-0.5, 0.0), SPEC)
        assert report.passed and report.lower.exact

    def test_identity_boundary_case_passes(self):
        report = sector_membership(Identity(), SPEC)
        assert report.lower.passed and report.box.passed and report.upper.passed

    def test_offset_identity_box_violation(self):
        report = sector_membership(Affine(1.0, 0.5), SPEC)
        assert not report.box.passed
        assert report.box.first_violation == pytest.approx(1.0)

    def test_expansion_fails_lower_sector(self):
        report = sector_membership(Affine(-2.0, 0.0), SPEC)
        assert not report.lower.passed and not report.upper.passed

    def test_strict_ray_contact_is_violation(self):
        # f coincides with L1 on the whole lower region: strict bound fails
        report = sector_membership(Affine(-1.0, 0.0), SPEC)
        assert not report.lower.passed

    def test_sampled_variant_reports_inexact(self):
        report = sector_membership(
            Tabulated((-2.0, -1.0, 1.0, 2.0), (-1.5, -1.0, 1.0, 1.5), "pchip"),
            SPEC,
        )
        assert not report.lower.exact

    def test_box_pass_implies_range_invariance(self):
        for f in CATALOG:
            if isinstance(f, GatedIdentity):
                continue
            report = sector_membership(f, SPEC)
            if report.box.passed:
                xs = np.linspace(-1.0, 1.0, 501)
                vals = f.eval_array(xs)
                assert vals.min() >= -1.0 - 1e-9 and vals.max() <= 1.0 + 1e-9

    def test_degenerate_box_spec(self):
        spec = BoxRaySpec(0.0, 0.0, 0.0, -1.0, -0.8)
        report = sector_membership(ScaledSine(0.8, math.pi), spec)
        assert report.passed


class TestSerialization:
    @pytest.mark.parametrize("f", CATALOG, ids=lambda f: f.variant)
    def test_round_trip(self, f):
        rec = f.to_dict()
        json.dumps(rec)  # must be JSON-serializable as-is
        back = from_dict(rec)
        assert back == f

    def test_unknown_variant(self):
        with pytest.raises(UnknownConstraintVariantError):
            from_dict({"variant": "warp-drive"})

    def test_nested_mix(self):
        f = Mix(Mix(Affine(0.5), Identity()), Saturation(-1, 1), 0.3)
        assert from_dict(f.to_dict()) == f
